#include "rilab/disconnect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace rilab {
namespace {

// Union-find with path halving over window indices.
struct Dsu {
  std::vector<int32_t> parent;
  std::vector<int32_t> size;
  explicit Dsu(size_t n) : parent(n), size(n, 1) {
    for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int32_t>(i);
  }
  int32_t find(int32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int32_t a, int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

uint64_t mix_seed(uint64_t seed, uint64_t replica) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (replica + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Shared per-experiment state: the blow-up pair, the sorted window, the
// window equilibrium table re-keyed to the full box, and the kill radius.
struct LabContext {
  BlowUpPair pair;
  std::vector<LatticePoint> window;
  std::vector<size_t> target_idx;  // positions of A_N in the sorted window
  PotentialTable table;
  int64_t rho = 0;
};

LabContext make_context(const DisconnectParams& p, const GreenTable& G) {
  LabContext ctx;
  ctx.pair = blow_up(p.target, p.M, p.N);
  ctx.window.reserve(static_cast<size_t>(ctx.pair.window.volume()));
  ctx.pair.window.for_each([&](const LatticePoint& q) { ctx.window.push_back(q); });
  std::sort(ctx.window.begin(), ctx.window.end());
  ctx.target_idx.reserve(ctx.pair.target.size());
  for (const auto& a : ctx.pair.target) {
    auto it = std::lower_bound(ctx.window.begin(), ctx.window.end(), a);
    ctx.target_idx.push_back(static_cast<size_t>(it - ctx.window.begin()));
  }
  EquilibriumParams ep;
  PotentialTable layer = equilibrium_box(ctx.pair.window, G, EquilibriumBackend::kExact, ep);
  ctx.table = expand_support(layer, ctx.window);
  ctx.rho = p.rho > 0 ? p.rho : 4 * static_cast<int64_t>(ctx.pair.shell_radius);
  return ctx;
}

struct ReplicaOutcome {
  DisconnectionResult result;
  OccupationField field;
  double target_occupation = 0;
};

ReplicaOutcome run_replica(const LabContext& ctx, const DisconnectParams& p, uint64_t seed) {
  ReplicaOutcome out;
  InterlacementEnsemble ens = sample_ensemble(ctx.window, p.u, ctx.table, ctx.rho, seed);
  out.field = occupation_field(ens, p.u);
  std::vector<LatticePoint> vacant;
  vacant.reserve(ctx.window.size());
  for (const auto& x : ctx.window)
    if (out.field.value(x) == 0) vacant.push_back(x);
  out.result = check_disconnection(vacant, ctx.pair);
  out.result.u = p.u;
  for (size_t i : ctx.target_idx) out.target_occupation += out.field.value(ctx.window[i]);
  return out;
}

}  // namespace

DisconnectionResult check_disconnection(const std::vector<LatticePoint>& vacant,
                                        const BlowUpPair& pair) {
  const DiscreteBox& win = pair.window;
  const int d = win.dim();
  const int64_t vol = win.volume();
  const int32_t R = pair.shell_radius;

  DisconnectionResult res;
  res.N = pair.N;
  res.M = pair.M;

  std::vector<uint8_t> vac(static_cast<size_t>(vol), 0);
  for (const auto& x : vacant)
    if (win.contains(x)) vac[static_cast<size_t>(win.index_of(x))] = 1;

  // Union vacant nearest neighbors; scanning +1 along each axis covers every
  // window edge once.
  Dsu dsu(static_cast<size_t>(vol));
  win.for_each([&](const LatticePoint& x) {
    const int64_t ix = win.index_of(x);
    if (!vac[static_cast<size_t>(ix)]) return;
    for (int k = 0; k < d; ++k) {
      LatticePoint y = x.neighbor(2 * k);  // +1 along axis k
      if (!win.contains(y)) continue;
      const int64_t iy = win.index_of(y);
      if (vac[static_cast<size_t>(iy)])
        dsu.unite(static_cast<int32_t>(ix), static_cast<int32_t>(iy));
    }
  });

  std::vector<uint8_t> is_target_root(static_cast<size_t>(vol), 0);
  bool any_vacant_target = false;
  for (const auto& a : pair.target) {
    const int64_t ia = win.index_of(a);
    if (!vac[static_cast<size_t>(ia)]) continue;
    any_vacant_target = true;
    is_target_root[static_cast<size_t>(dsu.find(static_cast<int32_t>(ia)))] = 1;
  }

  if (!any_vacant_target) {
    // Covered target: disconnected by convention; the covered sites are the cut.
    res.occurred = true;
    res.vacant_cluster_size = 0;
    res.witness = pair.target;
    std::sort(res.witness.begin(), res.witness.end());
    return res;
  }

  bool reached_shell = false;
  uint64_t cluster = 0;
  std::vector<uint8_t> in_cluster(static_cast<size_t>(vol), 0);
  win.for_each([&](const LatticePoint& x) {
    const int64_t ix = win.index_of(x);
    if (!vac[static_cast<size_t>(ix)]) return;
    if (!is_target_root[static_cast<size_t>(dsu.find(static_cast<int32_t>(ix)))]) return;
    in_cluster[static_cast<size_t>(ix)] = 1;
    ++cluster;
    if (x.linf() == R) reached_shell = true;
  });
  res.vacant_cluster_size = cluster;
  if (reached_shell) return res;  // vacant crossing exists

  res.occurred = true;
  // Witness: covered target sites plus the occupied outer boundary of the
  // reached cluster. The cluster cannot touch the shell, so every vacant path
  // out of A_N stops at one of these sites.
  std::vector<LatticePoint> wit;
  for (const auto& a : pair.target)
    if (!vac[static_cast<size_t>(win.index_of(a))]) wit.push_back(a);
  win.for_each([&](const LatticePoint& x) {
    if (!in_cluster[static_cast<size_t>(win.index_of(x))]) return;
    for (int k = 0; k < 2 * d; ++k) {
      LatticePoint y = x.neighbor(k);
      if (!win.contains(y)) continue;
      if (!vac[static_cast<size_t>(win.index_of(y))]) wit.push_back(y);
    }
  });
  std::sort(wit.begin(), wit.end());
  wit.erase(std::unique(wit.begin(), wit.end()), wit.end());
  res.witness = std::move(wit);
  return res;
}

DisconnectionEstimate estimate_disconnection_probability(const DisconnectParams& params,
                                                         uint64_t replicas, uint64_t seed,
                                                         const GreenTable& G) {
  if (replicas == 0)
    throw std::invalid_argument("estimate_disconnection_probability: need at least one replica");
  LabContext ctx = make_context(params, G);
  DisconnectionEstimate est;
  est.cap_window = ctx.table.capacity;
  est.records.reserve(replicas);
  for (uint64_t r = 0; r < replicas; ++r) {
    const uint64_t rs = mix_seed(seed, r);
    ReplicaOutcome out = run_replica(ctx, params, rs);
    ReplicaRecord rec;
    rec.replica = r;
    rec.seed = rs;
    rec.occurred = out.result.occurred;
    rec.target_occupation = out.target_occupation;
    est.records.push_back(rec);
    if (rec.occurred) ++est.occurrences;
  }
  est.replicas = replicas;
  est.estimate = static_cast<double>(est.occurrences) / static_cast<double>(replicas);
  est.se = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(replicas));
  return est;
}

ConditionalProfile conditional_occupation_profile(const DisconnectParams& params, uint64_t seed,
                                                  const GreenTable& G, const ReplicaEvent& event) {
  if (!(params.u > 0))
    throw std::invalid_argument(
        "conditional_occupation_profile: u must be positive (the vacant set is everything at u = "
        "0, so disconnection never occurs)");
  if (params.min_hits == 0)
    throw std::invalid_argument("conditional_occupation_profile: min_hits must be positive");
  LabContext ctx = make_context(params, G);
  const size_t n = ctx.window.size();

  ConditionalProfile prof;
  prof.sites = ctx.window;
  prof.N = params.N;
  prof.u = params.u;

  std::vector<double> sum_all(n, 0), sum2_all(n, 0), sum_hit(n, 0), sum2_hit(n, 0);
  double sum_t = 0, sum2_t = 0;  // per-hit target occupation mean
  uint64_t r = 0, hits = 0;
  for (; r < params.max_replicas && hits < params.min_hits; ++r) {
    ReplicaOutcome out = run_replica(ctx, params, mix_seed(seed, r));
    const bool hit = event ? event(out.result, out.field) : out.result.occurred;
    for (size_t i = 0; i < n; ++i) {
      const double v = out.field.value(ctx.window[i]);
      sum_all[i] += v;
      sum2_all[i] += v * v;
      if (hit) {
        sum_hit[i] += v;
        sum2_hit[i] += v * v;
      }
    }
    if (hit) {
      ++hits;
      const double t = out.target_occupation / static_cast<double>(ctx.pair.target.size());
      sum_t += t;
      sum2_t += t * t;
    }
  }
  if (hits < params.min_hits)
    throw std::runtime_error("conditional_occupation_profile: conditioning too rare");

  prof.replicas = r;
  prof.hits = hits;
  prof.cond_mean.resize(n);
  prof.cond_se.resize(n);
  prof.uncond_mean.resize(n);
  prof.uncond_se.resize(n);
  auto finish = [](double s, double s2, uint64_t m, double& mean, double& se) {
    const double dm = static_cast<double>(m);
    mean = s / dm;
    const double var = std::max(0.0, s2 / dm - mean * mean);
    se = m > 1 ? std::sqrt(var / (dm - 1.0)) : 0.0;
  };
  for (size_t i = 0; i < n; ++i) {
    finish(sum_all[i], sum2_all[i], r, prof.uncond_mean[i], prof.uncond_se[i]);
    finish(sum_hit[i], sum2_hit[i], hits, prof.cond_mean[i], prof.cond_se[i]);
  }
  double tmean, tse;
  finish(sum_t, sum2_t, hits, tmean, tse);
  prof.summary = tmean - params.u;
  prof.summary_se = tse;
  return prof;
}

void write_replica_csv(const DisconnectionEstimate& est, std::ostream& os) {
  os << "replica,seed,occurred,target_occupation\n";
  char buf[64];
  for (const auto& rec : est.records) {
    std::snprintf(buf, sizeof buf, "%.17g", rec.target_occupation);
    os << rec.replica << ',' << rec.seed << ',' << (rec.occurred ? 1 : 0) << ',' << buf << '\n';
  }
}

void write_profile_csv(const ConditionalProfile& prof, std::ostream& os) {
  const int d = prof.sites.empty() ? 0 : prof.sites.front().d;
  for (int i = 0; i < d; ++i) os << 'c' << i << ',';
  os << "cond_mean,cond_se,uncond_mean,uncond_se\n";
  char buf[64];
  for (size_t i = 0; i < prof.sites.size(); ++i) {
    for (int k = 0; k < d; ++k) os << prof.sites[i].c[k] << ',';
    const double cols[4] = {prof.cond_mean[i], prof.cond_se[i], prof.uncond_mean[i],
                            prof.uncond_se[i]};
    for (int k = 0; k < 4; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", cols[k]);
      os << buf << (k == 3 ? '\n' : ',');
    }
  }
}

}  // namespace rilab
