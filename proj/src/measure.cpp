namespace rilab {
}
