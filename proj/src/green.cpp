#include "rilab/green.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace rilab {
namespace {

constexpr double kPi = std::numbers::pi;

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

// Scaled modified Bessel values i_n(z) = e^{-z} I_n(z), n = 0..n_max, by
// Miller's downward recurrence normalized with i_0 + 2 sum_k i_k = 1.
void scaled_bessel_row(double z, int n_max, std::vector<double>& out) {
  out.assign(n_max + 1, 0.0);
  if (z <= 0) {
    out[0] = 1.0;  // i_n(0) = delta_{n0}
    return;
  }
  // Orders with i_n below ~1e-26 contribute nothing to our 1e-12 targets.
  int n_eff = 0;
  while (n_eff < n_max) {
    double nn = n_eff + 1;
    if (nn > z && nn * std::log(z / (2.0 * nn)) + nn < -64.0) break;
    ++n_eff;
  }
  const int start = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_eff) * n_eff + 110.0 * z))) + 40;
  double yk1 = 0.0, yk = 1e-280;
  double sum = 0.0;
  for (int n = start; n >= 1; --n) {
    double ykm1 = yk1 + (2.0 * n / z) * yk;
    yk1 = yk;
    yk = ykm1;
    if (n - 1 <= n_eff) out[n - 1] = yk;  // value now holds y_{n-1}
    sum += 2.0 * yk1;                     // accumulates 2*y_n, n = start..1
    if (std::abs(yk) > 1e260) {
      yk *= 1e-260;
      yk1 *= 1e-260;
      sum *= 1e-260;
      for (double& v : out) v *= 1e-260;
    }
  }
  sum += yk;  // y_0
  const double inv = 1.0 / sum;
  for (double& v : out) v *= inv;
}

LatticePoint canonical(const LatticePoint& x) {
  LatticePoint p = x;
  for (int i = 0; i < p.d; ++i) p.c[i] = std::abs(p.c[i]);
  std::sort(p.c.begin(), p.c.begin() + p.d, std::greater<int32_t>());
  return p;
}

// Integrates g over [0, T] by octave Gauss-Legendre panels and appends the
// analytic 1/t expansion of the Bessel product beyond T.
void bessel_product_integral(int d, const std::vector<LatticePoint>& pts,
                             std::vector<double>& out) {
  int n_max = 0;
  for (const auto& p : pts) n_max = std::max<int>(n_max, static_cast<int>(p.linf()));
  double T_needed = std::max(2.0e6, 120.0 * n_max * n_max);
  int m = 1;
  while (static_cast<double>(1ull << m) < T_needed) ++m;
  const double T = static_cast<double>(1ull << m);

  std::vector<double> gx, gw;
  gauss_legendre(32, gx, gw);

  out.assign(pts.size(), 0.0);
  std::vector<double> row;
  auto add_panel = [&](double a, double b) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int q = 0; q < 32; ++q) {
      const double t = mid + half * gx[q];
      const double w = half * gw[q];
      scaled_bessel_row(t / d, n_max, row);
      for (size_t i = 0; i < pts.size(); ++i) {
        double v = 1.0;
        for (int k = 0; k < d; ++k) v *= row[pts[i].c[k]];
        out[i] += w * v;
      }
    }
  };
  add_panel(0.0, 1.0);
  for (int j = 0; j < m; ++j)
    add_panel(static_cast<double>(1ull << j), static_cast<double>(1ull << (j + 1)));

  // Tail: prod_i i_{n_i}(t/d) = (d/(2 pi t))^{d/2} (1 + P1/t + P2/t^2 + P3/t^3 + ...)
  // from the large-argument Bessel series; integrable term by term.
  const double pref = std::pow(d / (2.0 * kPi), 0.5 * d);
  for (size_t i = 0; i < pts.size(); ++i) {
    double poly[4] = {1.0, 0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) {
      const double mu = 4.0 * static_cast<double>(pts[i].c[k]) * pts[i].c[k];
      const double s1 = -(mu - 1.0) / 8.0 * d;
      const double s2 = (mu - 1.0) * (mu - 9.0) / 128.0 * d * d;
      const double s3 = -(mu - 1.0) * (mu - 9.0) * (mu - 25.0) / 3072.0 * d * d * d;
      double next[4] = {poly[0],
                        poly[1] + poly[0] * s1,
                        poly[2] + poly[1] * s1 + poly[0] * s2,
                        poly[3] + poly[2] * s1 + poly[1] * s2 + poly[0] * s3};
      std::copy(next, next + 4, poly);
    }
    double tail = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double expo = 0.5 * d + k - 1.0;
      tail += poly[k] * std::pow(T, -expo) / expo;
    }
    out[i] += pref * tail;
  }
}

std::string cache_path(const std::string& dir, int d, int radius, double tol) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s/green_d%d_r%d_tol%.1e.bin", dir.c_str(), d, radius, tol);
  return buf;
}

}  // namespace

double green_asymptotic_constant(int d) {
  if (d < 3) throw std::invalid_argument("green_asymptotic_constant: requires d >= 3");
  return d / (2.0 * std::pow(kPi, 0.5 * d)) * std::tgamma(0.5 * d - 1.0);
}

void GreenTable::index_canonicals() {
  // Enumerate canonical representatives a_1 >= a_2 >= ... >= a_d >= 0, a_1 <= R.
  index_.clear();
  std::vector<LatticePoint> reps;
  LatticePoint p = LatticePoint::zero(d_);
  // Odometer over weakly decreasing tuples.
  std::function<void(int, int)> rec = [&](int pos, int cap) {
    if (pos == d_) {
      reps.push_back(p);
      return;
    }
    for (int v = 0; v <= cap; ++v) {
      p.c[pos] = v;
      rec(pos + 1, v);
    }
  };
  rec(0, radius_);
  index_.reserve(reps.size() * 2);
  for (size_t i = 0; i < reps.size(); ++i) index_[reps[i]] = i;
  values_.assign(reps.size(), 0.0);
}

size_t GreenTable::canonical_index(const LatticePoint& x) const {
  auto it = index_.find(canonical(x));
  if (it == index_.end()) throw std::out_of_range("GreenTable: point outside table radius");
  return it->second;
}

GreenTable GreenTable::build(int d, int radius, double tol, const std::string& cache_dir) {
  if (d < 3 || d > kMaxDim) throw std::invalid_argument("GreenTable: d out of range");
  if (radius < 0 || radius > 192) throw std::invalid_argument("GreenTable: radius out of range");
  GreenTable g;
  g.d_ = d;
  g.radius_ = radius;
  g.tol_ = tol;
  g.method_ = Method::kQuadrature;
  g.cd_ = green_asymptotic_constant(d);
  g.index_canonicals();

  if (!cache_dir.empty()) {
    std::ifstream in(cache_path(cache_dir, d, radius, tol), std::ios::binary);
    if (in) {
      char magic[8] = {};
      int32_t fd = 0, fr = 0;
      double ft = 0;
      uint64_t n = 0;
      in.read(magic, 8);
      in.read(reinterpret_cast<char*>(&fd), 4);
      in.read(reinterpret_cast<char*>(&fr), 4);
      in.read(reinterpret_cast<char*>(&ft), 8);
      in.read(reinterpret_cast<char*>(&n), 8);
      if (in && std::string(magic, 8) == "RILABGR1" && fd == d && fr == radius &&
          ft == tol && n == g.values_.size()) {
        in.read(reinterpret_cast<char*>(g.values_.data()), 8 * n);
        if (in) return g;
      }
    }
  }

  std::vector<LatticePoint> reps(g.values_.size(), LatticePoint::zero(d));
  for (const auto& [p, i] : g.index_) reps[i] = p;
  bessel_product_integral(d, reps, g.values_);

  if (!cache_dir.empty()) {
    std::string path = cache_path(cache_dir, d, radius, tol);
    std::ofstream out(path + ".tmp", std::ios::binary);
    if (out) {
      out.write("RILABGR1", 8);
      int32_t fd = d, fr = radius;
      uint64_t n = g.values_.size();
      out.write(reinterpret_cast<const char*>(&fd), 4);
      out.write(reinterpret_cast<const char*>(&fr), 4);
      out.write(reinterpret_cast<const char*>(&tol), 8);
      out.write(reinterpret_cast<const char*>(&n), 8);
      out.write(reinterpret_cast<const char*>(g.values_.data()), 8 * n);
      out.close();
      std::rename((path + ".tmp").c_str(), path.c_str());
    }
  }
  return g;
}

GreenTable GreenTable::truncated_solve(int d, int radius, int solve_radius, double cg_tol) {
  if (d != 3) throw std::invalid_argument("truncated_solve: implemented for d = 3");
  if (solve_radius <= radius) throw std::invalid_argument("truncated_solve: solve radius too small");
  GreenTable g;
  g.d_ = d;
  g.radius_ = radius;
  g.tol_ = 1.0 / (solve_radius * solve_radius);  // boundary truncation order
  g.method_ = Method::kTruncatedSolve;
  g.cd_ = green_asymptotic_constant(d);
  g.index_canonicals();

  const int R = solve_radius;
  const int side = 2 * R + 1;
  const int64_t n = static_cast<int64_t>(side) * side * side;
  auto idx = [&](int x, int y, int z) {
    return (static_cast<int64_t>(x + R) * side + (y + R)) * side + (z + R);
  };
  std::vector<uint8_t> interior(n, 0);
  std::vector<double> bval(n, 0.0);
  for (int x = -R; x <= R; ++x)
    for (int y = -R; y <= R; ++y)
      for (int z = -R; z <= R; ++z) {
        int m = std::max({std::abs(x), std::abs(y), std::abs(z)});
        if (m < R) {
          interior[idx(x, y, z)] = 1;
        } else {
          double r = std::sqrt(double(x) * x + double(y) * y + double(z) * z);
          bval[idx(x, y, z)] = g.cd_ / r;
        }
      }

  // CG on A u = b with A = -Delta (Dirichlet), b = delta_0 + boundary feed-in.
  const double w = 1.0 / (2.0 * d);
  std::vector<double> u(n, 0.0), r(n, 0.0), p(n, 0.0), Ap(n, 0.0);
  auto apply_A = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (int x = -R + 1; x <= R - 1; ++x)
      for (int y = -R + 1; y <= R - 1; ++y)
        for (int z = -R + 1; z <= R - 1; ++z) {
          int64_t i = idx(x, y, z);
          double s = v[i - 1] + v[i + 1] + v[i - side] + v[i + side] +
                     v[i - int64_t(side) * side] + v[i + int64_t(side) * side];
          out[i] = v[i] - w * s;
        }
  };
  // Fold the Dirichlet boundary data into the right-hand side.
  std::vector<double> b(n, 0.0);
  b[idx(0, 0, 0)] = 1.0;
  for (int x = -R + 1; x <= R - 1; ++x)
    for (int y = -R + 1; y <= R - 1; ++y)
      for (int z = -R + 1; z <= R - 1; ++z) {
        if (std::max({std::abs(x), std::abs(y), std::abs(z)}) != R - 1) continue;
        int64_t i = idx(x, y, z);
        double s = bval[i - 1] + bval[i + 1] + bval[i - side] + bval[i + side] +
                   bval[i - int64_t(side) * side] + bval[i + int64_t(side) * side];
        b[i] += w * s;
      }

  std::fill(r.begin(), r.end(), 0.0);
  apply_A(u, Ap);
  double rr = 0;
  for (int64_t i = 0; i < n; ++i)
    if (interior[i]) {
      r[i] = b[i] - Ap[i];
      rr += r[i] * r[i];
    }
  p = r;
  const double rr0 = rr;
  for (int it = 0; it < 4000 && rr > cg_tol * cg_tol * rr0; ++it) {
    apply_A(p, Ap);
    double pAp = 0;
    for (int64_t i = 0; i < n; ++i)
      if (interior[i]) pAp += p[i] * Ap[i];
    double alpha = rr / pAp;
    double rr_new = 0;
    for (int64_t i = 0; i < n; ++i)
      if (interior[i]) {
        u[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
        rr_new += r[i] * r[i];
      }
    double beta = rr_new / rr;
    rr = rr_new;
    for (int64_t i = 0; i < n; ++i)
      if (interior[i]) p[i] = r[i] + beta * p[i];
  }

  for (auto& [cp, ci] : g.index_) g.values_[ci] = u[idx(cp.c[0], cp.c[1], cp.c[2])];
  return g;
}

double GreenTable::at(const LatticePoint& x) const {
  if (x.d != d_) throw std::invalid_argument("GreenTable::at: dimension mismatch");
  return values_[canonical_index(x)];
}

double GreenTable::extended(const LatticePoint& x) const {
  if (x.d != d_) throw std::invalid_argument("GreenTable::extended: dimension mismatch");
  if (x.linf() <= radius_) return values_[canonical_index(x)];
  return cd_ * std::pow(x.norm2(), -(d_ - 2.0));
}

double green_value(int d, const LatticePoint& x) {
  if (d < 3 || d > kMaxDim) throw std::invalid_argument("green_value: d out of range");
  std::vector<LatticePoint> pts{canonical(x)};
  std::vector<double> out;
  bessel_product_integral(d, pts, out);
  return out[0];
}

double apply_G_at(const GreenTable& g, const SiteMap& V, const SiteMap& f,
                  const LatticePoint& x, bool strict) {
  double s = 0;
  for (const auto& [y, vy] : V) {
    if (vy == 0.0) continue;
    const double fy = site_get(f, y);
    if (fy == 0.0) continue;
    const LatticePoint diff = x - y;
    if (strict && !g.in_range(diff))
      throw std::out_of_range("apply_G: support exceeds GreenTable radius");
    s += g.extended(diff) * vy * fy;
  }
  return s;
}

SiteMap apply_G_on(const GreenTable& g, const SiteMap& V, const SiteMap& f,
                   const std::vector<LatticePoint>& where, bool strict) {
  SiteMap out;
  out.reserve(where.size());
  for (const auto& x : where) out[x] = apply_G_at(g, V, f, x, strict);
  return out;
}

}  // namespace rilab
