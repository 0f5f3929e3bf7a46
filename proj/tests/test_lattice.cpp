#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <unordered_set>

#include "rilab/blowup.hpp"
#include "rilab/compact_set.hpp"
#include "rilab/point.hpp"

using namespace rilab;

TEST_CASE("neighbors enumerate the 2d unit steps exactly once") {
  for (int d : {3, 4, 5}) {
    LatticePoint p = LatticePoint::zero(d);
    p.c[0] = 7;
    p.c[d - 1] = -2;
    std::set<LatticePoint> seen;
    for (const auto& q : p.neighbors()) {
      CHECK((q - p).l1() == 1);
      seen.insert(q);
    }
    CHECK(seen.size() == static_cast<size_t>(2 * d));
  }
}

TEST_CASE("box indexing round-trips and volume matches enumeration") {
  DiscreteBox b = DiscreteBox::from_corners(LatticePoint::of({-2, 0, 5}), LatticePoint::of({1, 4, 7}));
  CHECK(b.volume() == 3 * 4 * 2);
  int64_t count = 0;
  b.for_each([&](const LatticePoint& p) {
    CHECK(b.contains(p));
    CHECK(b.index_of(p) == count);
    CHECK(b.site_at(count) == p);
    ++count;
  });
  CHECK(count == b.volume());
  CHECK(!b.contains(LatticePoint::of({1, 0, 5})));  // upper corner is exclusive
  CHECK(b.contains(LatticePoint::of({-2, 0, 5})));
}

TEST_CASE("inner boundary of a cube has side^d - (side-2)^d sites") {
  for (int side : {1, 2, 3, 5}) {
    DiscreteBox c = DiscreteBox::cube(LatticePoint::of({-1, -1, -1}), side);
    int64_t inner = side > 2 ? static_cast<int64_t>(side - 2) * (side - 2) * (side - 2) : 0;
    CHECK(static_cast<int64_t>(c.inner_boundary().size()) == c.volume() - inner);
  }
}

TEST_CASE("linf sphere cardinality matches shell volume difference") {
  for (int d : {3, 4}) {
    for (int r : {1, 2, 3}) {
      auto s = linf_sphere(d, LatticePoint::zero(d), r);
      double outer = std::pow(2.0 * r + 1, d), inner = std::pow(2.0 * r - 1, d);
      CHECK(static_cast<double>(s.size()) == outer - inner);
      std::unordered_set<LatticePoint, PointHash> uniq(s.begin(), s.end());
      CHECK(uniq.size() == s.size());
    }
  }
}

TEST_CASE("ball blow-up matches a direct membership scan") {
  auto A = CompactSetSpec::make_ball(3, {0.1, 0.0, -0.2}, 0.8);
  const int N = 12;
  auto pair = blow_up(A, 2.0, N);
  CHECK(pair.shell_radius == 24);

  int64_t direct = 0;
  DiscreteBox scan = DiscreteBox::linf_ball(LatticePoint::zero(3), 2 * N);
  scan.for_each([&](const LatticePoint& p) {
    double s = 0;
    double z[3] = {p.c[0] / double(N) - 0.1, p.c[1] / double(N), p.c[2] / double(N) + 0.2};
    for (double v : z) s += v * v;
    if (s <= 0.64) ++direct;
  });
  CHECK(static_cast<int64_t>(pair.target.size()) == direct);
  for (const auto& p : pair.target) CHECK(pair.window.contains(p));
}

TEST_CASE("blow-up rejects targets touching the shell box") {
  auto A = CompactSetSpec::make_ball(3, {0.0, 0.0, 0.0}, 1.0);
  CHECK_THROWS(blow_up(A, 1.0, 10));   // boundary reaches the box edge
  CHECK_NOTHROW(blow_up(A, 1.5, 10));
}

TEST_CASE("compact set distance and containment agree across kinds") {
  ContinuumBox b1{};
  b1.lo = {0, 0, 0};
  b1.hi = {1, 1, 1};
  ContinuumBox b2{};
  b2.lo = {2, 0, 0};
  b2.hi = {3, 1, 1};
  auto u = CompactSetSpec::make_union(3, {b1, b2});

  CHECK(u.contains({0.5, 0.5, 0.5}));
  CHECK(u.contains({1.0, 1.0, 1.0}));  // boundary inclusive
  CHECK(!u.contains({1.5, 0.5, 0.5}));
  CHECK(u.dist({1.5, 0.5, 0.5}) == doctest::Approx(0.5));
  CHECK(u.dist({0.5, 0.5, 0.5}) == 0.0);
  CHECK(u.euclid_diam() == doctest::Approx(std::sqrt(9.0 + 1 + 1)));

  std::array<double, kMaxDim> c{};
  double r = 0;
  u.enclosing_ball(c, r);
  CHECK(c[0] == doctest::Approx(1.5));
  for (const auto& corner : {std::array<double, kMaxDim>{0, 0, 0}, {3, 1, 1}, {0, 1, 0}}) {
    double s = 0;
    for (int i = 0; i < 3; ++i) s += (corner[i] - c[i]) * (corner[i] - c[i]);
    CHECK(std::sqrt(s) <= r + 1e-12);
  }
}
