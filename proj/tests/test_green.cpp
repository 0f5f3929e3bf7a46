#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <vector>

#include "rilab/green.hpp"
#include "rilab/point.hpp"

using namespace rilab;

namespace {

constexpr double kPi = std::numbers::pi;

// Local Gauss-Legendre rule (Newton on the Legendre recurrence), cached.
const std::pair<std::vector<double>, std::vector<double>>& gl_rule(int n) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0;
    for (int k = 0; k < 100; ++k) {
      double p0 = 1, p1 = t;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1 - t * t) * dp * dp);
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

// Corner constants over [0,1]^d for the scale-invariant integrands
//   k2 = int |u|^-2 du,   a4 = int (sum_i u_i^4)/|u|^4 du,
// by dyadic graded panels plus the exact self-similar remainder: the omitted
// corner cube [0,2^-m]^d contributes delta^{d-2} k2 (resp. delta^d a4).
struct CornerConstants {
  double k2 = 0, a4 = 0;
};

CornerConstants corner_constants(int d) {
  const int m = 6, order = d == 3 ? 16 : 12;
  const auto& [gx, gw] = gl_rule(order);
  std::vector<double> lo(m + 1), hi(m + 1);
  lo[0] = 0;
  hi[0] = std::pow(0.5, m);
  for (int j = 1; j <= m; ++j) {
    lo[j] = hi[j - 1];
    hi[j] = lo[j] * 2;
  }
  double s2 = 0, s4 = 0;
  std::vector<int> lev(d, 0);
  while (true) {
    bool corner = true;
    for (int i = 0; i < d; ++i) corner = corner && lev[i] == 0;
    if (!corner) {
      // nodes per axis
      std::vector<std::vector<double>> t(d), wt(d);
      for (int i = 0; i < d; ++i) {
        double half = 0.5 * (hi[lev[i]] - lo[lev[i]]), mid = 0.5 * (hi[lev[i]] + lo[lev[i]]);
        for (int q = 0; q < order; ++q) {
          t[i].push_back(mid + half * gx[q]);
          wt[i].push_back(half * gw[q]);
        }
      }
      std::vector<int> ix(d, 0);
      while (true) {
        double w = 1, r2 = 0, q4 = 0;
        for (int i = 0; i < d; ++i) {
          w *= wt[i][ix[i]];
          double u = t[i][ix[i]];
          r2 += u * u;
          q4 += u * u * u * u;
        }
        s2 += w / r2;
        s4 += w * q4 / (r2 * r2);
        int a = 0;
        while (a < d && ++ix[a] == order) ix[a++] = 0;
        if (a == d) break;
      }
    }
    int a = 0;
    while (a < d && ++lev[a] == m + 1) lev[a++] = 0;
    if (a == d) break;
  }
  const double delta = std::pow(0.5, m);
  CornerConstants c;
  c.k2 = s2 / (1.0 - std::pow(delta, d - 2));
  c.a4 = s4 / (1.0 - std::pow(delta, d));
  return c;
}

// Independent oracle: the torus integral
//   g(x) = pi^-d int_{[0,pi]^d} prod_i cos(theta_i x_i) / (1 - phi) dtheta,
// phi = (1/d) sum cos theta_i, after symmetrizing the plane wave. Dyadic
// panels grade toward the corner singularity; the innermost cube is replaced
// by its analytic expansion 2d k2 eps^{d-2} + eps^d (2d a4 / 12 - |x|^2).
double torus_green(int d, const LatticePoint& x) {
  REQUIRE((d == 3 || d == 4));
  static CornerConstants cc3 = corner_constants(3);
  static CornerConstants cc4 = corner_constants(4);
  const CornerConstants& cc = d == 3 ? cc3 : cc4;
  const int m = d == 3 ? 16 : 9;
  const int base = d == 3 ? 12 : 10;
  const double eps = kPi * std::pow(0.5, m);

  std::vector<double> lo(m + 1), hi(m + 1);
  lo[0] = 0;
  hi[0] = eps;
  for (int j = 1; j <= m; ++j) {
    lo[j] = hi[j - 1];
    hi[j] = lo[j] * 2;
  }

  double acc = 0;
  std::vector<int> lev(d, 0);
  std::vector<std::vector<double>> ct(d), px(d), wt(d);
  while (true) {
    bool corner = true;
    for (int i = 0; i < d; ++i) corner = corner && lev[i] == 0;
    if (!corner) {
      for (int i = 0; i < d; ++i) {
        ct[i].clear();
        px[i].clear();
        wt[i].clear();
        const double width = hi[lev[i]] - lo[lev[i]];
        const int n = std::min(48, base + static_cast<int>(std::ceil(
                                             0.6 * width * std::abs(double(x.c[i])))));
        const auto& [gx, gw] = gl_rule(n);
        const double half = 0.5 * width, mid = 0.5 * (hi[lev[i]] + lo[lev[i]]);
        for (int q = 0; q < n; ++q) {
          double th = mid + half * gx[q];
          ct[i].push_back(std::cos(th));
          px[i].push_back(std::cos(th * x.c[i]));
          wt[i].push_back(half * gw[q]);
        }
      }
      if (d == 3) {
        for (size_t i0 = 0; i0 < ct[0].size(); ++i0)
          for (size_t i1 = 0; i1 < ct[1].size(); ++i1) {
            const double c01 = ct[0][i0] + ct[1][i1];
            const double wp01 = wt[0][i0] * px[0][i0] * wt[1][i1] * px[1][i1];
            for (size_t i2 = 0; i2 < ct[2].size(); ++i2)
              acc += wp01 * wt[2][i2] * px[2][i2] / (1.0 - (c01 + ct[2][i2]) / 3.0);
          }
      } else {
        for (size_t i0 = 0; i0 < ct[0].size(); ++i0)
          for (size_t i1 = 0; i1 < ct[1].size(); ++i1) {
            const double c01 = ct[0][i0] + ct[1][i1];
            const double wp01 = wt[0][i0] * px[0][i0] * wt[1][i1] * px[1][i1];
            for (size_t i2 = 0; i2 < ct[2].size(); ++i2) {
              const double c012 = c01 + ct[2][i2];
              const double wp012 = wp01 * wt[2][i2] * px[2][i2];
              for (size_t i3 = 0; i3 < ct[3].size(); ++i3)
                acc += wp012 * wt[3][i3] * px[3][i3] / (1.0 - (c012 + ct[3][i3]) / 4.0);
            }
          }
      }
    }
    int a = 0;
    while (a < d && ++lev[a] == m + 1) lev[a++] = 0;
    if (a == d) break;
  }

  const double inner = 2.0 * d * cc.k2 * std::pow(eps, d - 2.0) +
                       std::pow(eps, double(d)) *
                           (2.0 * d * cc.a4 / 12.0 - double(x.norm2_sq()));
  return (acc + inner) / std::pow(kPi, d);
}

const GreenTable& table3() {
  static GreenTable g = GreenTable::build(3, 48, 1e-10, ".");
  return g;
}

}  // namespace

TEST_CASE("origin value matches the closed-form gamma product") {
  // Lattice Green value at the origin in d=3 has a classical evaluation
  // sqrt(6)/(32 pi^3) * Gamma(1/24) Gamma(5/24) Gamma(7/24) Gamma(11/24).
  const double closed = std::sqrt(6.0) / (32.0 * kPi * kPi * kPi) *
                        std::exp(std::lgamma(1.0 / 24) + std::lgamma(5.0 / 24) +
                                 std::lgamma(7.0 / 24) + std::lgamma(11.0 / 24));
  CHECK(closed == doctest::Approx(1.5163860591).epsilon(1e-9));
  CHECK(table3().origin() == doctest::Approx(closed).epsilon(1e-10));
  CHECK(std::abs(table3().origin() - 1.5163860591) < 1e-6);
}

TEST_CASE("neighbor identity g(e1) = g(0) - 1 holds across dimensions") {
  CHECK(std::abs(table3().at(LatticePoint::unit(3, 0)) - (table3().origin() - 1.0)) < 1e-9);
  for (int d : {4, 5}) {
    GreenTable g = GreenTable::build(d, 2);
    CHECK(std::abs(g.at(LatticePoint::unit(d, 0)) - (g.origin() - 1.0)) < 1e-9);
  }
}

TEST_CASE("spectral values agree with the torus quadrature oracle, d=3") {
  const std::vector<LatticePoint> pts = {
      LatticePoint::of({0, 0, 0}),  LatticePoint::of({1, 0, 0}),  LatticePoint::of({1, 1, 0}),
      LatticePoint::of({1, 1, 1}),  LatticePoint::of({2, 0, 0}),  LatticePoint::of({3, 2, 1}),
      LatticePoint::of({5, 0, 0}),  LatticePoint::of({8, 4, 2}),  LatticePoint::of({13, 11, 7}),
      LatticePoint::of({20, 0, 0})};
  for (const auto& p : pts) {
    double oracle = torus_green(3, p);
    INFO("x = ", p.str(), " oracle = ", oracle);
    CHECK(std::abs(table3().at(p) - oracle) < 1e-9);
  }
}

TEST_CASE("spectral values agree with the torus quadrature oracle, d=4") {
  GreenTable g = GreenTable::build(4, 3);
  for (const auto& p : {LatticePoint::of({0, 0, 0, 0}), LatticePoint::of({1, 0, 0, 0}),
                        LatticePoint::of({1, 1, 0, 0}), LatticePoint::of({2, 1, 0, 0})}) {
    double oracle = torus_green(4, p);
    INFO("x = ", p.str(), " oracle = ", oracle);
    CHECK(std::abs(g.at(p) - oracle) < 1e-8);
  }
}

TEST_CASE("table is invariant under coordinate permutation and sign flips") {
  CHECK(table3().at(LatticePoint::of({3, -2, 1})) == table3().at(LatticePoint::of({1, 2, 3})));
  CHECK(table3().at(LatticePoint::of({-5, 0, 4})) == table3().at(LatticePoint::of({4, 5, 0})));
}

TEST_CASE("power-law asymptotics: ratio near 1 and improving with distance") {
  const double cd = green_asymptotic_constant(3);
  CHECK(cd == doctest::Approx(3.0 / (2.0 * kPi)).epsilon(1e-14));
  CHECK(green_asymptotic_constant(4) == doctest::Approx(2.0 / (kPi * kPi)).epsilon(1e-12));
  for (const auto& p : {LatticePoint::of({20, 0, 0}), LatticePoint::of({14, 14, 0}),
                        LatticePoint::of({12, 12, 12})}) {
    double ratio = table3().at(p) * p.norm2() / cd;
    CHECK(ratio > 0.98);
    CHECK(ratio < 1.02);
  }
  double r20 = table3().at(LatticePoint::of({20, 0, 0})) * 20.0 / cd;
  double r40 = table3().at(LatticePoint::of({40, 0, 0})) * 40.0 / cd;
  CHECK(std::abs(r40 - 1.0) < std::abs(r20 - 1.0));
}

TEST_CASE("extension beyond the table radius tracks the exact value") {
  LatticePoint far = LatticePoint::of({49, 0, 0});
  CHECK_THROWS(table3().at(far));
  double approx = table3().extended(far);
  double exact = green_value(3, far);
  CHECK(std::abs(approx / exact - 1.0) < 3e-3);
  // In-range extension must be the table itself.
  CHECK(table3().extended(LatticePoint::of({7, 3, 1})) == table3().at(LatticePoint::of({7, 3, 1})));
}

TEST_CASE("dirichlet solve with power-law boundary reproduces the table") {
  GreenTable solved = GreenTable::truncated_solve(3, 6, 32);
  double worst = 0;
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= a; ++b)
      for (int c = 0; c <= b; ++c)
        worst = std::max(worst, std::abs(solved.at(LatticePoint::of({a, b, c})) -
                                         table3().at(LatticePoint::of({a, b, c}))));
  CHECK(worst < 5e-5);
}

TEST_CASE("single-point evaluation matches the table") {
  for (const auto& p : {LatticePoint::of({2, 1, 0}), LatticePoint::of({6, 5, 4})})
    CHECK(green_value(3, p) == doctest::Approx(table3().at(p)).epsilon(1e-13));
}

TEST_CASE("operator application respects the strict range contract") {
  GreenTable g = GreenTable::build(3, 3);
  SiteMap V{{LatticePoint::of({0, 0, 0}), 1.0}};
  SiteMap f{{LatticePoint::of({0, 0, 0}), 2.0}};
  CHECK(apply_G_at(g, V, f, LatticePoint::of({1, 1, 1})) ==
        doctest::Approx(2.0 * g.at(LatticePoint::of({1, 1, 1}))));
  CHECK_THROWS(apply_G_at(g, V, f, LatticePoint::of({5, 0, 0}), true));
  CHECK(apply_G_at(g, V, f, LatticePoint::of({5, 0, 0}), false) ==
        doctest::Approx(2.0 * green_asymptotic_constant(3) / 5.0).epsilon(1e-12));
}

TEST_CASE("cache round-trip returns identical values") {
  namespace fs = std::filesystem;
  fs::create_directories(".green_cache_test");
  GreenTable a = GreenTable::build(3, 4, 1e-10, ".green_cache_test");
  GreenTable b = GreenTable::build(3, 4, 1e-10, ".green_cache_test");
  CHECK(fs::exists(".green_cache_test/green_d3_r4_tol1.0e-10.bin"));
  for (int i = 0; i <= 4; ++i)
    CHECK(a.at(LatticePoint::of({i, 0, 0})) == b.at(LatticePoint::of({i, 0, 0})));
}
