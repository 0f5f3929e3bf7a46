#include "rilab/equilibrium.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include "rilab/rng.hpp"

namespace rilab {
namespace {

using PointSet = std::unordered_set<LatticePoint, PointHash>;

std::optional<DiscreteBox> as_solid_box(const std::vector<LatticePoint>& K) {
  if (K.empty()) return std::nullopt;
  const int d = K.front().d;
  LatticePoint lo = K.front(), hi = K.front();
  for (const auto& p : K)
    for (int i = 0; i < d; ++i) {
      lo.c[i] = std::min(lo.c[i], p.c[i]);
      hi.c[i] = std::max(hi.c[i], p.c[i]);
    }
  DiscreteBox b;
  b.anchor = lo;
  for (int i = 0; i < d; ++i) b.extent[i] = hi.c[i] - lo.c[i] + 1;
  if (b.volume() != static_cast<int64_t>(K.size())) return std::nullopt;
  PointSet s(K.begin(), K.end());
  if (s.size() != K.size()) return std::nullopt;
  return b;
}

Eigen::VectorXd solve_dense(const std::vector<LatticePoint>& sites, const GreenTable& G) {
  const int n = static_cast<int>(sites.size());
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    M(i, i) = G.origin();
    for (int j = i + 1; j < n; ++j) M(i, j) = M(j, i) = G.extended(sites[i] - sites[j]);
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n);
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(M).solve(rhs);
}

double residual_on(const std::vector<LatticePoint>& check, const std::vector<LatticePoint>& supp,
                   const std::vector<double>& e, const GreenTable& G) {
  double worst = 0;
  for (const auto& x : check) {
    double s = 0;
    for (size_t j = 0; j < supp.size(); ++j) s += e[j] * G.extended(x - supp[j]);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

std::vector<LatticePoint> sample_sites(const std::vector<LatticePoint>& all, size_t cap,
                                       uint64_t seed) {
  if (all.size() <= cap) return all;
  Philox rng(seed, 0xC0FFEE, 1);
  std::vector<LatticePoint> out;
  out.reserve(cap);
  for (size_t i = 0; i < cap; ++i) out.push_back(all[rng.uniform_int(all.size())]);
  return out;
}

// Canonical orbit key of a cube site under coordinate permutations and the
// reflections about the cube center (doubled coordinates stay integral).
LatticePoint cube_orbit_key(const LatticePoint& x, const DiscreteBox& cube) {
  LatticePoint k = LatticePoint::zero(x.d);
  const int32_t side = cube.extent[0];
  for (int i = 0; i < x.d; ++i)
    k.c[i] = std::abs(2 * (x.c[i] - cube.anchor.c[i]) - (side - 1));
  std::sort(k.c.begin(), k.c.begin() + x.d, std::greater<int32_t>());
  return k;
}

PotentialTable equilibrium_mc_escape(const std::vector<LatticePoint>& K, const GreenTable& G,
                                     const EquilibriumParams& params, bool auto_switched) {
  PotentialTable t;
  t.d = K.front().d;
  t.support = K;
  t.backend = "monte-carlo";
  t.auto_switched = auto_switched;
  t.residual = std::nan("");
  const int d = t.d;
  PointSet members(K.begin(), K.end());

  LatticePoint lo = K.front(), hi = K.front();
  for (const auto& p : K)
    for (int i = 0; i < d; ++i) {
      lo.c[i] = std::min(lo.c[i], p.c[i]);
      hi.c[i] = std::max(hi.c[i], p.c[i]);
    }
  int64_t diam = 0;
  for (int i = 0; i < d; ++i) diam = std::max<int64_t>(diam, hi.c[i] - lo.c[i]);
  const int64_t rho = params.rho > 0 ? params.rho : 8 * diam + 64;
  LatticePoint center = lo;
  for (int i = 0; i < d; ++i) center.c[i] = (lo.c[i] + hi.c[i]) / 2;

  t.e.assign(K.size(), 0.0);
  t.e_se.assign(K.size(), 0.0);
  double var_sum = 0;
  for (size_t i = 0; i < K.size(); ++i) {
    bool boundary = false;
    for (int k = 0; k < 2 * d; ++k)
      if (!members.count(K[i].neighbor(k))) {
        boundary = true;
        break;
      }
    if (!boundary) continue;  // interior sites never escape without re-entry
    Philox rng(params.seed, static_cast<uint64_t>(RngUse::kEquilibriumMc) << 32, i);
    uint64_t escapes = 0;
    for (uint64_t s = 0; s < params.mc_samples; ++s) {
      LatticePoint x = K[i].neighbor(static_cast<int>(rng.uniform_int(2 * d)));
      while (true) {
        if (members.count(x)) break;
        if ((x - center).linf() >= rho) {
          ++escapes;
          break;
        }
        x = x.neighbor(static_cast<int>(rng.uniform_int(2 * d)));
      }
    }
    const double p = static_cast<double>(escapes) / params.mc_samples;
    t.e[i] = p;
    t.e_se[i] = std::sqrt(std::max(0.0, p * (1.0 - p)) / params.mc_samples);
    var_sum += t.e_se[i] * t.e_se[i];
  }
  t.capacity = 0;
  for (double v : t.e) t.capacity += v;
  t.cap_se = std::sqrt(var_sum);
  t.bias_bound = t.capacity * green_asymptotic_constant(d) * d / std::pow(double(rho), d - 2.0);
  (void)G;
  return t;
}

}  // namespace

PotentialTable equilibrium_box(const DiscreteBox& box, const GreenTable& G,
                               EquilibriumBackend backend, const EquilibriumParams& params) {
  const int d = box.dim();
  std::vector<LatticePoint> layer = box.inner_boundary();

  if (backend == EquilibriumBackend::kMonteCarlo) {
    std::vector<LatticePoint> K;
    K.reserve(box.volume());
    box.for_each([&](const LatticePoint& p) { K.push_back(p); });
    return equilibrium_mc_escape(K, G, params, false);
  }

  bool cube = true;
  for (int i = 1; i < d; ++i) cube = cube && box.extent[i] == box.extent[0];

  PotentialTable t;
  t.d = d;
  t.support = layer;

  if (cube) {
    // Orbit reduction under the full symmetry group of the cube.
    std::unordered_map<LatticePoint, int, PointHash> orbit_of;
    std::vector<LatticePoint> rep;
    std::vector<int> orbit_id(layer.size());
    std::vector<double> orbit_size;
    for (size_t i = 0; i < layer.size(); ++i) {
      LatticePoint key = cube_orbit_key(layer[i], box);
      auto it = orbit_of.find(key);
      if (it == orbit_of.end()) {
        it = orbit_of.emplace(key, static_cast<int>(rep.size())).first;
        rep.push_back(layer[i]);
        orbit_size.push_back(0);
      }
      orbit_id[i] = it->second;
      orbit_size[it->second] += 1;
    }
    const int m = static_cast<int>(rep.size());
    if (m > params.max_exact)
      return equilibrium_mc_escape(layer, G, params, true);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    for (size_t j = 0; j < layer.size(); ++j)
      for (int i = 0; i < m; ++i) A(i, orbit_id[j]) += G.extended(rep[i] - layer[j]);
    Eigen::VectorXd eh = Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(Eigen::VectorXd::Ones(m));
    t.e.resize(layer.size());
    t.capacity = 0;
    for (size_t j = 0; j < layer.size(); ++j) {
      t.e[j] = eh(orbit_id[j]);
      t.capacity += t.e[j];
    }
    t.backend = "exact-orbit";
  } else {
    if (static_cast<int>(layer.size()) > params.max_exact)
      return equilibrium_mc_escape(layer, G, params, true);
    Eigen::VectorXd e = solve_dense(layer, G);
    t.e.assign(e.data(), e.data() + e.size());
    t.capacity = e.sum();
    t.backend = "exact-layer";
  }

  // Residual sampled over boundary and interior alike: validates both the
  // solve and the layer reduction (G e must be 1 on the whole box).
  std::vector<LatticePoint> check;
  box.for_each([&](const LatticePoint& p) { check.push_back(p); });
  t.residual = residual_on(sample_sites(check, 300, params.seed), layer, t.e, G);
  return t;
}

PotentialTable equilibrium(const std::vector<LatticePoint>& K, const GreenTable& G,
                           EquilibriumBackend backend, const EquilibriumParams& params) {
  if (K.empty()) throw std::invalid_argument("equilibrium: empty set");
  const int d = K.front().d;
  for (const auto& p : K)
    if (p.d != d) throw std::invalid_argument("equilibrium: mixed dimensions");

  if (auto box = as_solid_box(K); box && box->volume() > 8)
    return equilibrium_box(*box, G, backend, params);

  if (backend == EquilibriumBackend::kMonteCarlo)
    return equilibrium_mc_escape(K, G, params, false);

  // Thick sets: e_K vanishes on sites with all neighbors in K, so the
  // unknowns reduce to the exposed layer. g restricted to any finite set is
  // positive definite, hence the reduced solve recovers e_K exactly; the
  // residual check below covers interior sites as well.
  {
    PointSet members(K.begin(), K.end());
    std::vector<LatticePoint> layer;
    for (const auto& p : K) {
      for (int k = 0; k < 2 * d; ++k)
        if (!members.count(p.neighbor(k))) {
          layer.push_back(p);
          break;
        }
    }
    if (layer.size() < K.size() && static_cast<int>(layer.size()) <= params.max_exact) {
      Eigen::VectorXd e = solve_dense(layer, G);
      PointSet exposed(layer.begin(), layer.end());
      PotentialTable t;
      t.d = d;
      t.support = K;
      t.e.assign(K.size(), 0.0);
      size_t li = 0;
      for (size_t i = 0; i < K.size(); ++i)
        if (exposed.count(K[i])) t.e[i] = e[static_cast<int>(li++)];
      t.capacity = e.sum();
      t.backend = "exact-layer";
      t.residual = residual_on(sample_sites(K, 300, params.seed), layer,
                               std::vector<double>(e.data(), e.data() + e.size()), G);
      return t;
    }
  }

  if (static_cast<int>(K.size()) > params.max_exact)
    return equilibrium_mc_escape(K, G, params, true);

  PotentialTable t;
  t.d = d;
  t.support = K;
  Eigen::VectorXd e = solve_dense(K, G);
  t.e.assign(e.data(), e.data() + e.size());
  t.capacity = e.sum();
  t.backend = "exact-dense";
  t.residual = residual_on(sample_sites(K, 300, params.seed), K, t.e, G);
  return t;
}

PotentialTable equilibrium_mc_hitting(const std::vector<LatticePoint>& K, const GreenTable& G,
                                      int64_t rho0, uint64_t samples, uint64_t seed) {
  if (K.empty()) throw std::invalid_argument("equilibrium_mc_hitting: empty set");
  const int d = K.front().d;
  PointSet members(K.begin(), K.end());
  LatticePoint lo = K.front(), hi = K.front();
  for (const auto& p : K)
    for (int i = 0; i < d; ++i) {
      lo.c[i] = std::min(lo.c[i], p.c[i]);
      hi.c[i] = std::max(hi.c[i], p.c[i]);
    }
  LatticePoint center = lo;
  int64_t diam = 0;
  for (int i = 0; i < d; ++i) {
    center.c[i] = (lo.c[i] + hi.c[i]) / 2;
    diam = std::max<int64_t>(diam, hi.c[i] - lo.c[i]);
  }
  if (rho0 <= diam) throw std::invalid_argument("equilibrium_mc_hitting: rho0 must exceed diam");
  const int64_t rho_kill = 4 * rho0;
  const double cd = green_asymptotic_constant(d);

  std::unordered_map<LatticePoint, uint64_t, PointHash> hits;
  Philox rng(seed, static_cast<uint64_t>(RngUse::kEquilibriumMc) << 32 | 1, 0);
  uint64_t hit_count = 0;
  double kernel_sum = 0;
  for (uint64_t s = 0; s < samples; ++s) {
    // Uniform site on the linf sphere: pin one coordinate, accept with
    // probability 1/#maxed to undo multiple-counting of edges and corners.
    LatticePoint y = center;
    while (true) {
      int pin = static_cast<int>(rng.uniform_int(2 * d));
      for (int i = 0; i < d; ++i)
        y.c[i] = center.c[i] + static_cast<int32_t>(rng.uniform_int(2 * rho0 + 1)) -
                 static_cast<int32_t>(rho0);
      y.c[pin >> 1] = center.c[pin >> 1] + ((pin & 1) ? -static_cast<int32_t>(rho0)
                                                      : static_cast<int32_t>(rho0));
      int maxed = 0;
      for (int i = 0; i < d; ++i)
        if (std::abs(static_cast<int64_t>(y.c[i]) - center.c[i]) == rho0) ++maxed;
      if (rng.uniform01() < 1.0 / maxed) break;
    }
    const double r_start = (y - center).norm2();
    kernel_sum += cd * (std::pow(r_start, 2.0 - d) - std::pow(1.28 * rho_kill, 2.0 - d));
    LatticePoint x = y;
    while (true) {
      if (members.count(x)) {
        ++hits[x];
        ++hit_count;
        break;
      }
      if ((x - center).linf() >= rho_kill) break;
      x = x.neighbor(static_cast<int>(rng.uniform_int(2 * d)));
    }
  }

  PotentialTable t;
  t.d = d;
  t.backend = "monte-carlo-hitting";
  t.residual = std::nan("");
  const double p_hit = static_cast<double>(hit_count) / samples;
  const double kernel_mean = kernel_sum / samples;
  t.capacity = p_hit / kernel_mean;
  t.cap_se = std::sqrt(std::max(0.0, p_hit * (1 - p_hit)) / samples) / kernel_mean;
  t.bias_bound = t.capacity * static_cast<double>(diam) / static_cast<double>(rho0);
  t.support.reserve(hits.size());
  for (const auto& [site, n] : hits) {
    t.support.push_back(site);
    t.e.push_back(t.capacity * static_cast<double>(n) / hit_count);
  }
  (void)G;
  return t;
}

double harmonic_at(const PotentialTable& t, const GreenTable& G, const LatticePoint& x) {
  double s = 0;
  for (size_t i = 0; i < t.support.size(); ++i) s += t.e[i] * G.extended(x - t.support[i]);
  return s;
}

SiteMap harmonic_on(const PotentialTable& t, const GreenTable& G,
                    const std::vector<LatticePoint>& pts) {
  SiteMap out;
  out.reserve(pts.size());
  for (const auto& x : pts) out[x] = harmonic_at(t, G, x);
  return out;
}

double dirichlet_form(int d, const SiteMap& f, const SiteMap& g) {
  // Unordered edges with at least one endpoint in either support; the ordered
  // sum is twice this, and the form carries 1/(4d).
  double s = 0;
  auto scan = [&](const SiteMap& keys, auto&& seen_before) {
    for (const auto& [x, _] : keys) {
      if (seen_before(x)) continue;
      const double fx = site_get(f, x), gx = site_get(g, x);
      for (int k = 0; k < 2 * d; ++k) {
        const LatticePoint y = x.neighbor(k);
        const bool y_keyed = f.count(y) || g.count(y);
        if (y_keyed && !(x < y)) continue;  // counted from y's side
        s += (site_get(f, y) - fx) * (site_get(g, y) - gx);
      }
    }
  };
  scan(f, [](const LatticePoint&) { return false; });
  scan(g, [&](const LatticePoint& x) { return f.count(x) > 0; });
  return s / (2.0 * d);
}

PotentialTable expand_support(const PotentialTable& t, const std::vector<LatticePoint>& K) {
  if (!std::is_sorted(K.begin(), K.end()))
    throw std::invalid_argument("expand_support: target support must be sorted");
  PotentialTable out;
  out.d = t.d;
  out.support = K;
  out.e.assign(K.size(), 0.0);
  out.capacity = t.capacity;
  out.backend = t.backend;
  out.auto_switched = t.auto_switched;
  out.residual = t.residual;
  out.cap_se = t.cap_se;
  out.bias_bound = t.bias_bound;
  if (!t.e_se.empty()) out.e_se.assign(K.size(), 0.0);
  for (size_t i = 0; i < t.support.size(); ++i) {
    auto it = std::lower_bound(K.begin(), K.end(), t.support[i]);
    if (it == K.end() || !(*it == t.support[i]))
      throw std::invalid_argument("expand_support: target support misses a table site");
    const size_t j = static_cast<size_t>(it - K.begin());
    out.e[j] = t.e[i];
    if (!t.e_se.empty()) out.e_se[j] = t.e_se[i];
  }
  return out;
}

double dirichlet_tail_estimate(int d, double cap, double R) {
  // Exterior energy of the far field h ~ cap C_d r^{2-d}: the squared gradient
  // integrates to omega_{d-1} (cap C_d)^2 (d-2) R^{2-d}, and the form carries
  // 1/(2d). Exact for the leading monopole term over a spherical cut.
  if (cap <= 0 || R <= 0) return 0;
  const double omega = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
  const double cd = green_asymptotic_constant(d);
  return omega * cap * cap * cd * cd * (d - 2.0) * std::pow(R, 2.0 - d) / (2.0 * d);
}

}  // namespace rilab
