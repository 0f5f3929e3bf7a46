#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rilab/rng.hpp"

using namespace rilab;

TEST_CASE("philox reproduces the published zero-key block") {
  // Reference output for counter = key = 0; the generator hands the four
  // words of each block back in reverse order.
  Philox rng(0, 0, 0);
  CHECK(rng.next_u32() == 0x9b00dbd8u);
  CHECK(rng.next_u32() == 0xbc57ac4cu);
  CHECK(rng.next_u32() == 0xe169c58du);
  CHECK(rng.next_u32() == 0x6627e8d5u);
}

TEST_CASE("streams are deterministic and pairwise distinct") {
  Philox a(42, 7, 3), b(42, 7, 3), c(42, 7, 4), d(42, 8, 3), e(43, 7, 3);
  bool same = true, diff_lo = false, diff_hi = false, diff_seed = false;
  for (int i = 0; i < 64; ++i) {
    uint32_t va = a.next_u32();
    same = same && va == b.next_u32();
    diff_lo = diff_lo || va != c.next_u32();
    diff_hi = diff_hi || va != d.next_u32();
    diff_seed = diff_seed || va != e.next_u32();
  }
  CHECK(same);
  CHECK(diff_lo);
  CHECK(diff_hi);
  CHECK(diff_seed);

  Philox u1 = make_stream(9, RngUse::kTrajectory, 5, 0);
  Philox u2 = make_stream(9, RngUse::kHoldingTimes, 5, 0);
  bool differ = false;
  for (int i = 0; i < 16; ++i) differ = differ || u1.next_u32() != u2.next_u32();
  CHECK(differ);
}

TEST_CASE("uniform, exponential and normal moments sit inside 4 sigma") {
  Philox rng(1001, 0, 0);
  const int n = 200000;
  double su = 0, se = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    su += rng.uniform01();
    se += rng.exp1();
    double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(std::abs(su / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
  CHECK(std::abs(se / n - 1.0) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(sn / n) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(sn2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("uniform_int is unbiased over a non-power-of-two range") {
  Philox rng(7, 0, 0);
  const uint64_t m = 12;
  const int n = 120000;
  std::vector<int> counts(m, 0);
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_int(m)];
  double expect = double(n) / m, chi2 = 0;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  // 11 degrees of freedom; 99.9th percentile is about 31.3.
  CHECK(chi2 < 31.3);
}

TEST_CASE("poisson matches mean and variance in both regimes") {
  for (double mean : {3.7, 58.0}) {
    Philox rng(555, 0, static_cast<uint64_t>(mean * 100));
    const int n = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      double k = static_cast<double>(rng.poisson(mean));
      s += k;
      s2 += k * k;
    }
    double m1 = s / n, var = s2 / n - m1 * m1;
    CHECK(std::abs(m1 - mean) < 4.0 * std::sqrt(mean / n));
    // Var of the sample variance of Poisson ~ (mean + 2 mean^2)/n.
    CHECK(std::abs(var - mean) < 4.0 * std::sqrt((mean + 2 * mean * mean) / n));
  }
}

TEST_CASE("poisson(0) is identically zero and negative means throw") {
  Philox rng(1, 0, 0);
  for (int i = 0; i < 10; ++i) CHECK(rng.poisson(0.0) == 0);
  CHECK_THROWS(rng.poisson(-1.0));
}

TEST_CASE("alias table reproduces its weights") {
  std::vector<double> w = {1.0, 2.0, 3.0, 4.0, 0.0, 0.5};
  double total = 10.5;
  AliasTable t(w);
  Philox rng(31337, 0, 0);
  const int n = 400000;
  std::vector<int> counts(w.size(), 0);
  for (int i = 0; i < n; ++i) ++counts[t.sample(rng)];
  CHECK(counts[4] == 0);
  for (size_t i = 0; i < w.size(); ++i) {
    double p = w[i] / total;
    if (p == 0) continue;
    double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(double(counts[i]) / n - p) < 4.5 * se);
  }
}
