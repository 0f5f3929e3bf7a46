#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rilab {

// Philox4x32-10 counter-based generator. Streams are addressed by a 128-bit
// counter split as (stream_hi, stream_lo, seq); every (seed, stream) pair is an
// independent sequence, so parallel consumers stay reproducible regardless of
// scheduling. Trajectory i of replica r always draws from the same stream.
class Philox {
 public:
  Philox(uint64_t seed, uint64_t stream_hi, uint64_t stream_lo)
      : key0_(static_cast<uint32_t>(seed)), key1_(static_cast<uint32_t>(seed >> 32)),
        hi_(stream_hi), lo_(stream_lo) {}

  uint32_t next_u32() {
    if (have_ == 0) refill();
    return out_[--have_];
  }
  uint64_t next_u64() {
    uint64_t a = next_u32();
    return (a << 32) | next_u32();
  }
  // [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // (0,1) strictly; used for logs.
  double uniform01_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
  double exp1() { return -std::log(uniform01_open()); }
  double normal() {
    if (has_cached_normal_) {
      has_cached_normal_ = false;
      return cached_normal_;
    }
    double u = uniform01_open(), v = uniform01();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 6.283185307179586476925286766559 * v;
    cached_normal_ = r * std::sin(a);
    has_cached_normal_ = true;
    return r * std::cos(a);
  }
  // Unbiased integer in [0, n) (Lemire with rejection).
  uint64_t uniform_int(uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    uint64_t l = static_cast<uint64_t>(m);
    if (l < n) {
      uint64_t t = (0 - n) % n;
      while (l < t) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        l = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }
  // Poisson via inversion for small means, PTRS-style transformed rejection
  // for large ones. Exact in distribution either way.
  uint64_t poisson(double mean) {
    if (mean < 0 || !std::isfinite(mean)) throw std::invalid_argument("poisson: bad mean");
    if (mean == 0) return 0;
    if (mean < 30.0) {
      double L = std::exp(-mean), p = 1.0;
      uint64_t k = 0;
      do {
        ++k;
        p *= uniform01_open();
      } while (p > L);
      return k - 1;
    }
    // Hoermann's PTRS.
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
      double u = uniform01() - 0.5;
      double v = uniform01_open();
      double us = 0.5 - std::abs(u);
      double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<uint64_t>(kf);
      if (kf < 0 || (us < 0.013 && v > us)) continue;
      double k = kf;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          k * std::log(mean) - mean - std::lgamma(k + 1.0)) {
        return static_cast<uint64_t>(kf);
      }
    }
  }

 private:
  static uint32_t mulhi(uint32_t a, uint32_t b) {
    return static_cast<uint32_t>((static_cast<uint64_t>(a) * b) >> 32);
  }
  void refill() {
    // Counter layout: block index | stream_lo | stream_lo hi ^ stream_hi lo |
    // stream_hi hi. Folding only pairs bits our call sites never both use
    // (stream_lo stays below 2^32 wherever stream_hi carries a sub-index).
    uint32_t c0 = static_cast<uint32_t>(seq_), c1 = static_cast<uint32_t>(lo_);
    uint32_t c2 = static_cast<uint32_t>(lo_ >> 32) ^ static_cast<uint32_t>(hi_);
    uint32_t c3 = static_cast<uint32_t>(hi_ >> 32);
    uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      uint32_t lo0 = 0xD2511F53u * c0, hi0 = mulhi(0xD2511F53u, c0);
      uint32_t lo1 = 0xCD9E8D57u * c2, hi1 = mulhi(0xCD9E8D57u, c2);
      uint32_t n0 = hi1 ^ c1 ^ k0, n1 = lo1, n2 = hi0 ^ c3 ^ k1, n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out_[0] = c0; out_[1] = c1; out_[2] = c2; out_[3] = c3;
    have_ = 4;
    ++seq_;
  }

  uint32_t key0_, key1_;
  uint64_t hi_, lo_;
  uint64_t seq_ = 0;
  uint32_t out_[4] = {0, 0, 0, 0};
  int have_ = 0;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// Stream purposes; keeps independent substreams from colliding.
enum class RngUse : uint64_t {
  kEnsembleCount = 1,
  kTrajectory = 2,
  kHoldingTimes = 3,
  kEquilibriumMc = 4,
  kWalkOnSpheres = 5,
  kBootstrap = 6,
  kGeneric = 7,
  kParanoid = 8,
};

inline Philox make_stream(uint64_t seed, RngUse use, uint64_t a, uint64_t b = 0) {
  return Philox(seed, (static_cast<uint64_t>(use) << 32) | b, a);
}

// Walker alias table for O(1) sampling from a fixed discrete distribution.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights) {
    const size_t n = weights.size();
    if (n == 0) throw std::invalid_argument("AliasTable: empty weights");
    double total = 0;
    for (double w : weights) {
      if (w < 0 || !std::isfinite(w)) throw std::invalid_argument("AliasTable: bad weight");
      total += w;
    }
    if (total <= 0) throw std::invalid_argument("AliasTable: zero total weight");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<size_t> small, large;
    for (size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * n / total;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      size_t s = small.back(), l = large.back();
      small.pop_back();
      large.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (size_t s : small) prob_[s] = 1.0;
    for (size_t l : large) prob_[l] = 1.0;
  }
  size_t sample(Philox& rng) const {
    size_t i = static_cast<size_t>(rng.uniform_int(prob_.size()));
    return rng.uniform01() < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<size_t> alias_;
};

}  // namespace rilab
