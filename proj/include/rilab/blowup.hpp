#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rilab/compact_set.hpp"
#include "rilab/point.hpp"

namespace rilab {

// Lattice blow-up of a continuum target: A_N = (N*A) cap Z^d together with the
// separating shell S_N = { |x|_inf = floor(M*N) } and the observation window
// B(0, floor(M*N)). Membership x in N*A is evaluated as x/N in A (inclusive).
struct BlowUpPair {
  std::vector<LatticePoint> target;  // A_N
  int32_t shell_radius = 0;          // S_N = linf sphere of this radius
  DiscreteBox window;                // B(0, shell_radius)
  int32_t N = 1;
  double M = 2.0;

  std::vector<LatticePoint> shell() const {
    return linf_sphere(window.dim(), LatticePoint::zero(window.dim()), shell_radius);
  }
};

inline BlowUpPair blow_up(const CompactSetSpec& A, double M, int32_t N) {
  if (N < 1) throw std::invalid_argument("blow_up: N must be >= 1");
  if (!(M > 0)) throw std::invalid_argument("blow_up: M must be positive");
  if (!A.strictly_inside_sym_box(M))
    throw std::invalid_argument("blow_up: target must lie strictly inside (-M, M)^d");

  BlowUpPair out;
  out.N = N;
  out.M = M;
  out.shell_radius = static_cast<int32_t>(std::floor(M * static_cast<double>(N)));
  out.window = DiscreteBox::linf_ball(LatticePoint::zero(A.d), out.shell_radius);

  ContinuumBox bb = A.bounding_box();
  LatticePoint lo = LatticePoint::zero(A.d), hi = LatticePoint::zero(A.d);
  for (int i = 0; i < A.d; ++i) {
    lo.c[i] = static_cast<int32_t>(std::floor(bb.lo[i] * N));
    hi.c[i] = static_cast<int32_t>(std::ceil(bb.hi[i] * N)) + 1;
  }
  DiscreteBox scan = DiscreteBox::from_corners(lo, hi);
  std::array<double, kMaxDim> z{};
  scan.for_each([&](const LatticePoint& p) {
    for (int i = 0; i < A.d; ++i) z[i] = static_cast<double>(p.c[i]) / N;
    if (A.contains(z)) out.target.push_back(p);
  });
  return out;
}

}  // namespace rilab
