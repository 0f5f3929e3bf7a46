#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "rilab/continuum.hpp"
#include "rilab/equilibrium.hpp"
#include "rilab/green.hpp"

using namespace rilab;

namespace {

constexpr double kTwoPi = 6.283185307179586;

const GreenTable& table3() {
  static GreenTable t = GreenTable::build(3, 48, 1e-10, ".");
  return t;
}

double norm3(const RealPoint& z) {
  return std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
}

using PointSet = std::unordered_set<LatticePoint, PointHash>;

}  // namespace

TEST_CASE("shape predicates, metrics and constructors") {
  const auto ball = CompactShape::ball(3, real_point(0, 0, 0), 1.5);
  CHECK(ball.contains(real_point(1, 1, 0)));
  CHECK(ball.contains(real_point(1.5, 0, 0)));  // closed
  CHECK(!ball.contains(real_point(1.5, 1, 0)));
  CHECK(ball.distance(real_point(3, 0, 0)) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(ball.distance(real_point(0.2, 0, 0)) == 0.0);
  CHECK(ball.diameter() == doctest::Approx(3.0).epsilon(1e-12));
  RealPoint c{};
  double r = 0;
  ball.enclosing(&c, &r);
  CHECK(r == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(norm3(c) == doctest::Approx(0).epsilon(1e-12));

  const auto box = CompactShape::box(3, real_point(0, 0, 0), real_point(1, 2, 3));
  CHECK(box.contains(real_point(0.5, 1, 2)));
  CHECK(box.contains(real_point(1, 2, 3)));  // closed corner
  CHECK(!box.contains(real_point(1.01, 1, 1)));
  CHECK(box.distance(real_point(2, 3, 4)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(box.diameter() == doctest::Approx(std::sqrt(14.0)).epsilon(1e-12));
  double side = 0;
  CHECK(!box.is_cube(&side));
  const auto cube = CompactShape::box(3, real_point(0, 0, 0), real_point(1, 1, 1));
  CHECK(cube.is_cube(&side));
  CHECK(side == doctest::Approx(1.0).epsilon(1e-12));

  const auto uni = CompactShape::box_union(3, {real_point(0, 0, 0), real_point(2, 0, 0)},
                                           {real_point(1, 1, 1), real_point(3, 1, 1)});
  CHECK(uni.contains(real_point(0.5, 0.5, 0.5)));
  CHECK(uni.contains(real_point(2.5, 0.5, 0.5)));
  CHECK(!uni.contains(real_point(1.5, 0.5, 0.5)));
  CHECK(uni.distance(real_point(1.5, 0.5, 0.5)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(uni.diameter() == doctest::Approx(std::sqrt(11.0)).epsilon(1e-12));
  uni.enclosing(&c, &r);
  CHECK(c[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(r == doctest::Approx(std::sqrt(2.75)).epsilon(1e-12));
  CHECK(!uni.is_cube(&side));

  CHECK_THROWS_AS(CompactShape::ball(3, real_point(0, 0, 0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(CompactShape::ball(2, real_point(0, 0, 0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CompactShape::box(3, real_point(0, 0, 0), real_point(1, 0, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompactShape::box_union(3, {real_point(0, 0, 0)}, {}),
                  std::invalid_argument);
}

TEST_CASE("discretize_shape matches a direct predicate scan") {
  const auto ball = CompactShape::ball(3, real_point(0, 0, 0), 1.0);
  for (int N : {3, 5}) {
    const auto sites = discretize_shape(ball, N);
    PointSet got(sites.begin(), sites.end());
    CHECK(got.size() == sites.size());  // no duplicates
    size_t expect = 0;
    for (int x = -N - 2; x <= N + 2; ++x)
      for (int y = -N - 2; y <= N + 2; ++y)
        for (int z = -N - 2; z <= N + 2; ++z) {
          const bool in = x * x + y * y + z * z <= N * N;
          if (in) ++expect;
          LatticePoint p = LatticePoint::zero(3);
          p.c[0] = x;
          p.c[1] = y;
          p.c[2] = z;
          CHECK(got.count(p) == (in ? 1u : 0u));
        }
    CHECK(sites.size() == expect);
  }

  const auto cube = CompactShape::box(3, real_point(0, 0, 0), real_point(1, 1, 1));
  CHECK(discretize_shape(cube, 4).size() == 125);  // {0..4}^3

  // disjoint union: counts add
  const auto two = CompactShape::box_union(3, {real_point(0, 0, 0), real_point(2, 0, 0)},
                                           {real_point(1, 1, 1), real_point(3, 1, 1)});
  CHECK(discretize_shape(two, 2).size() == 54);
  // overlapping union: no double counting
  const auto lap = CompactShape::box_union(3, {real_point(0, 0, 0), real_point(0.5, 0, 0)},
                                           {real_point(1, 1, 1), real_point(1.5, 1, 1)});
  CHECK(discretize_shape(lap, 2).size() == 36);  // x in {0..3}, y,z in {0..2}
}

TEST_CASE("exact ball potential is the radial power law") {
  PotentialQuery q;
  q.method = PotentialMethod::kExactBall;
  const auto ball = CompactShape::ball(3, real_point(0, 0, 0), 1.0);
  CHECK(harmonic_potential(ball, real_point(2, 0, 0), q).value ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(harmonic_potential(ball, real_point(100, 0, 0), q).value ==
        doctest::Approx(0.01).epsilon(1e-14));
  const auto inside = harmonic_potential(ball, real_point(0.3, 0.2, 0.1), q);
  CHECK(inside.value == 1.0);
  CHECK(inside.se == 0.0);

  const auto off = CompactShape::ball(3, real_point(1, 0, 0), 2.0);
  CHECK(harmonic_potential(off, real_point(5, 0, 0), q).value ==
        doctest::Approx(0.5).epsilon(1e-14));

  const auto cube = CompactShape::box(3, real_point(0, 0, 0), real_point(1, 1, 1));
  CHECK_THROWS_AS(harmonic_potential(cube, real_point(3, 0, 0), q), std::invalid_argument);
}

TEST_CASE("walk on spheres reproduces the exact ball law") {
  const auto ball = CompactShape::ball(3, real_point(0, 0, 0), 1.0);
  for (double r : {1.5, 2.5, 5.0}) {
    const auto e = harmonic_potential(ball, real_point(r, 0, 0));
    CHECK(e.se > 0);
    CHECK(e.truncated == 0);
    CHECK(std::fabs(e.value - 1.0 / r) <= 3.0 * e.se);
  }
  // inside short-circuits
  const auto in = harmonic_potential(ball, real_point(0, 0.5, 0));
  CHECK(in.value == 1.0);
  CHECK(in.samples == 0);

  // far field decays
  PotentialQuery q;
  const auto far = harmonic_potential(ball, real_point(100, 0, 0), q);
  CHECK(far.value < 0.02);

  // early stop honors the SE target
  PotentialQuery qe;
  qe.wos.target_se = 0.02;
  const auto fast = harmonic_potential(ball, real_point(2, 0, 0), qe);
  CHECK(fast.samples < 20000);
  CHECK(fast.se <= 0.02);

  // deterministic for a fixed seed, sensitive to the seed
  const auto a = harmonic_potential(ball, real_point(2, 0, 0));
  const auto b = harmonic_potential(ball, real_point(2, 0, 0));
  CHECK(a.value == b.value);
  CHECK(a.se == b.se);
  PotentialQuery qs;
  qs.wos.seed = 999;
  CHECK(harmonic_potential(ball, real_point(2, 0, 0), qs).value != a.value);

  // a one-step cap truncates everything and counts it as escape
  PotentialQuery qt;
  qt.wos.max_steps = 1;
  const auto t = harmonic_potential(ball, real_point(2, 0, 0), qt);
  CHECK(t.truncated == t.samples);
  CHECK(t.value == 0.0);
}

TEST_CASE("ball capacity: analytic, scaling, wos and discrete-limit routes") {
  const auto ball = CompactShape::ball(3, real_point(0, 0, 0), 1.0);

  CapacityQuery qa;
  qa.method = CapacityMethod::kDirichletEnergy;
  CHECK(brownian_capacity(ball, qa).value == doctest::Approx(kTwoPi).epsilon(1e-14));
  const auto big = CompactShape::ball(3, real_point(2, -1, 0), 2.5);
  CHECK(brownian_capacity(big, qa).value == doctest::Approx(2.5 * kTwoPi).epsilon(1e-14));
  const auto cube = CompactShape::box(3, real_point(0, 0, 0), real_point(1, 1, 1));
  CHECK_THROWS_AS(brownian_capacity(cube, qa), std::invalid_argument);

  CapacityQuery qs;
  qs.method = CapacityMethod::kScaling;
  CHECK(brownian_capacity(big, qs).value == doctest::Approx(2.5 * kTwoPi).epsilon(1e-14));

  CapacityQuery qw;
  qw.method = CapacityMethod::kWosHitting;
  const auto w = brownian_capacity(ball, qw);
  CHECK(w.se > 0);
  CHECK(w.se < 0.05);
  CHECK(std::fabs(w.value - kTwoPi) <= 3.0 * w.se);

  CapacityQuery qd;
  qd.method = CapacityMethod::kDiscreteLimit;
  qd.table = &table3();
  qd.scales = {8, 12, 16};
  const auto d = brownian_capacity(ball, qd);
  REQUIRE(d.ladder.size() == 3);
  // lattice capacities approach the continuum value from below at these scales
  CHECK(d.ladder[0] < d.ladder[1]);
  CHECK(d.ladder[1] < d.ladder[2]);
  CHECK(d.ladder[2] < kTwoPi);
  CHECK(std::fabs(d.ladder[2] - kTwoPi) / kTwoPi < 0.025);
  CHECK(std::fabs(d.value - kTwoPi) / kTwoPi < 0.03);

  // two-point Richardson fallback
  CapacityQuery qr = qd;
  qr.scales = {12, 16};
  const auto rr = brownian_capacity(ball, qr);
  CHECK(std::fabs(rr.value - kTwoPi) / kTwoPi < 0.02);

  CapacityQuery bad = qd;
  bad.scales = {8};
  CHECK_THROWS_AS(brownian_capacity(ball, bad), std::invalid_argument);
  CapacityQuery notab = qd;
  notab.table = nullptr;
  CHECK_THROWS_AS(brownian_capacity(ball, notab), std::invalid_argument);
}

TEST_CASE("cube capacity: stored constant, scaling law and recompute") {
  const double golden = unit_cube_capacity_d3();
  CHECK(golden == doctest::Approx(4.15115).epsilon(1e-12));

  CapacityQuery qs;
  qs.method = CapacityMethod::kScaling;
  const auto cube2 = CompactShape::box(3, real_point(0, 0, 0), real_point(2, 2, 2));
  CHECK(brownian_capacity(cube2, qs).value == doctest::Approx(2 * golden).epsilon(1e-14));
  const auto shifted =
      CompactShape::box(3, real_point(-1, 4, 2), real_point(-0.5, 4.5, 2.5));
  CHECK(brownian_capacity(shifted, qs).value == doctest::Approx(0.5 * golden).epsilon(1e-14));
  const auto slab = CompactShape::box(3, real_point(0, 0, 0), real_point(2, 1, 1));
  CHECK_THROWS_AS(brownian_capacity(slab, qs), std::invalid_argument);

  // recompute the constant from scratch on a small ladder; the extrapolation
  // at these scales is known to sit a few parts in 10^3 low
  const auto cube = CompactShape::box(3, real_point(0, 0, 0), real_point(1, 1, 1));
  CapacityQuery qd;
  qd.method = CapacityMethod::kDiscreteLimit;
  qd.table = &table3();
  qd.scales = {16, 24, 32};
  const auto d = brownian_capacity(cube, qd);
  CHECK(std::fabs(d.value - golden) < 5e-3);

  // wos agrees within noise
  CapacityQuery qw;
  qw.method = CapacityMethod::kWosHitting;
  const auto w = brownian_capacity(cube, qw);
  CHECK(std::fabs(w.value - golden) <= 3.0 * w.se);
}

TEST_CASE("discrete potential converges to the continuum ball law") {
  const auto ball = CompactShape::ball(3, real_point(0, 0, 0), 1.0);
  const std::vector<RealPoint> probes = {
      real_point(1.6, 0.2, -0.1), real_point(0.4, 1.5, 0.8), real_point(-2.1, 0.3, 0.4),
      real_point(2.2, -1.1, 0.9), real_point(0.0, 0.0, 1.9)};
  EquilibriumParams ep;
  std::vector<double> sup_err;
  for (int N : {4, 8, 16}) {
    const auto sites = discretize_shape(ball, N);
    const auto eq = equilibrium(sites, table3(), EquilibriumBackend::kExact, ep);
    REQUIRE(eq.residual < 1e-10);
    double sup = 0;
    for (const auto& z : probes) {
      LatticePoint x = LatticePoint::zero(3);
      for (int i = 0; i < 3; ++i) x.c[i] = static_cast<int32_t>(std::floor(z[i] * N));
      sup = std::max(sup, std::fabs(harmonic_at(eq, table3(), x) - 1.0 / norm3(z)));
    }
    sup_err.push_back(sup);

    // the query API returns the same number as the direct solve
    PotentialQuery q;
    q.method = PotentialMethod::kDiscreteLimit;
    q.discrete_scale = N;
    q.table = &table3();
    const auto via = harmonic_potential(ball, probes[0], q);
    LatticePoint x0 = LatticePoint::zero(3);
    for (int i = 0; i < 3; ++i) x0.c[i] = static_cast<int32_t>(std::floor(probes[0][i] * N));
    CHECK(via.value == doctest::Approx(harmonic_at(eq, table3(), x0)).epsilon(1e-12));
  }
  CHECK(sup_err[1] < sup_err[0]);
  CHECK(sup_err[2] < sup_err[1]);
  CHECK(sup_err[2] < 0.02);

  PotentialQuery q;
  q.method = PotentialMethod::kDiscreteLimit;
  CHECK_THROWS_AS(harmonic_potential(ball, real_point(2, 0, 0), q), std::invalid_argument);
}

TEST_CASE("union capacity sits strictly between one box and the sum") {
  const auto uni = CompactShape::box_union(3, {real_point(0, 0, 0), real_point(3, 0, 0)},
                                           {real_point(1, 1, 1), real_point(4, 1, 1)});
  CapacityQuery qw;
  qw.method = CapacityMethod::kWosHitting;
  const auto u = brownian_capacity(uni, qw);
  const double one = unit_cube_capacity_d3();
  CHECK(u.value - 3.0 * u.se > one);        // monotonicity
  CHECK(u.value + 3.0 * u.se < 2.0 * one);  // strong subadditivity at gap 2
}

TEST_CASE("profile arithmetic, range, monotonicity and rejection") {
  CHECK(profile_value(0.25, 1.0, 0.5) == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(profile_value(0.25, 1.0, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(profile_value(0.25, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(profile_value(0.1, 0.9, 1.0 + 5e-10) == doctest::Approx(0.9).epsilon(1e-8));

  double prev = -1;
  for (int k = 0; k <= 20; ++k) {
    const double v = profile_value(0.3, 2.0, k / 20.0);
    CHECK(v >= 0.3 - 1e-12);
    CHECK(v <= 2.0 + 1e-12);
    CHECK(v > prev);
    prev = v;
  }

  CHECK_THROWS_AS(profile_value(0.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(profile_value(1.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(profile_value(1.5, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(profile_value(0.25, 1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(profile_value(0.25, 1.0, 1.1), std::invalid_argument);

  // through the continuum potential of a ball
  const auto ball = CompactShape::ball(3, real_point(0, 0, 0), 1.0);
  PotentialQuery q;
  q.method = PotentialMethod::kExactBall;
  CHECK(profile_at(0.25, 1.0, ball, real_point(2, 0, 0), q) ==
        doctest::Approx(0.5625).epsilon(1e-14));
  CHECK(profile_at(0.25, 1.0, ball, real_point(0.1, 0, 0), q) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // through a discrete equilibrium table: exactly u_bar on the set
  EquilibriumParams ep;
  const auto eq = equilibrium({LatticePoint::zero(3)}, table3(),
                              EquilibriumBackend::kExact, ep);
  CHECK(profile_at_discrete(0.25, 1.0, eq, table3(), LatticePoint::zero(3)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  LatticePoint e1 = LatticePoint::zero(3);
  e1.c[0] = 1;
  const double h = harmonic_at(eq, table3(), e1);
  CHECK(h > 0);
  CHECK(h < 1);
  CHECK(profile_at_discrete(0.25, 1.0, eq, table3(), e1) ==
        doctest::Approx(profile_value(0.25, 1.0, h)).epsilon(1e-12));
}
