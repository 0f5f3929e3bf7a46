#include "rilab/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace rilab {

namespace {

using PointSet = std::unordered_set<LatticePoint, PointHash>;

long double ipow(int64_t base, int exp) {
  long double r = 1.0L;
  for (int i = 0; i < exp; ++i) r *= static_cast<long double>(base);
  return r;
}

// [z + lo, z + hi) per axis, guarded against coordinate overflow.
DiscreteBox offset_box(const LatticePoint& z, int64_t lo, int64_t hi) {
  LatticePoint a = z;
  LatticePoint b = z;
  for (int i = 0; i < z.d; ++i) {
    const int64_t al = static_cast<int64_t>(z.c[i]) + lo;
    const int64_t bh = static_cast<int64_t>(z.c[i]) + hi;
    if (al < INT32_MIN || bh > INT32_MAX)
      throw std::invalid_argument("ScalePair: box corner overflows lattice coordinates");
    a.c[i] = static_cast<int32_t>(al);
    b.c[i] = static_cast<int32_t>(bh);
  }
  return DiscreteBox::from_corners(a, b);
}

std::string hexs(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DiscreteBox ScalePair::box_b(const LatticePoint& z) const {
  if (z.d != d) throw std::invalid_argument("ScalePair: anchor dimension mismatch");
  return offset_box(z, 0, L0);
}

DiscreteBox ScalePair::box_d(const LatticePoint& z) const {
  if (z.d != d) throw std::invalid_argument("ScalePair: anchor dimension mismatch");
  return offset_box(z, -3 * L0, 4 * L0);
}

DiscreteBox ScalePair::box_u(const LatticePoint& z) const {
  if (z.d != d) throw std::invalid_argument("ScalePair: anchor dimension mismatch");
  return offset_box(z, -static_cast<int64_t>(K) * L0 + 1, static_cast<int64_t>(K) * L0 - 1);
}

ScalePair scales(int64_t N, double gamma, int32_t K, int d) {
  if (d < 3 || d > kMaxDim) throw std::invalid_argument("scales: d must be in [3, 8]");
  if (!(gamma > 0.0) || gamma > 1.0)
    throw std::invalid_argument("scales: gamma must lie in (0, 1]");
  if (K < 100) throw std::invalid_argument("scales: K must be at least 100");
  if (N < 2 || N > 1000000000000LL)
    throw std::invalid_argument("scales: N must lie in [2, 1e12]");

  // L0 = floor((gamma N log N)^(1/(d-1))); powl only seeds the candidate, the
  // floor itself is settled by integer-power comparison against v.
  const long double v =
      static_cast<long double>(gamma) * static_cast<long double>(N) * logl(static_cast<long double>(N));
  int64_t L0 = static_cast<int64_t>(floorl(powl(v, 1.0L / (d - 1))));
  if (L0 < 0) L0 = 0;
  while (ipow(L0 + 1, d - 1) <= v) ++L0;
  while (L0 > 0 && ipow(L0, d - 1) > v) --L0;
  if (L0 == 0) throw std::invalid_argument("scales: degenerate L0, increase N or gamma");

  // q = floor(sqrt(gamma) N), settled via q^2 <= gamma N^2.
  const long double gn2 =
      static_cast<long double>(gamma) * static_cast<long double>(N) * static_cast<long double>(N);
  int64_t q = static_cast<int64_t>(floorl(sqrtl(static_cast<long double>(gamma)) * N));
  if (q < 0) q = 0;
  while (ipow(q + 1, 2) <= gn2) ++q;
  while (q > 0 && ipow(q, 2) > gn2) --q;

  ScalePair sc;
  sc.d = d;
  sc.N = N;
  sc.gamma = gamma;
  sc.L0 = L0;
  sc.Lhat0 = 100 * static_cast<int64_t>(d) * q;
  sc.K = K;
  sc.toy = false;
  return sc;
}

ScalePair toy_scales(int64_t L0, int32_t K, int d) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("toy_scales: d must be in [1, 8]");
  if (L0 < 1) throw std::invalid_argument("toy_scales: L0 must be positive");
  // K >= 5 keeps D_z strictly inside U_z for every L0 >= 1.
  if (K < 5) throw std::invalid_argument("toy_scales: K must be at least 5");
  ScalePair sc;
  sc.d = d;
  sc.L0 = L0;
  sc.K = K;
  sc.toy = true;
  return sc;
}

ExcursionRecord count_excursions(const InterlacementEnsemble& ens, double u,
                                 const LatticePoint& z, const ScalePair& scale) {
  if (z.d != ens.d || scale.d != ens.d)
    throw std::invalid_argument("count_excursions: dimension mismatch");
  if (u < 0 || u > ens.u_max)
    throw std::invalid_argument("count_excursions: u outside [0, u_max]");
  if (ens.window.empty()) throw std::invalid_argument("count_excursions: empty window");

  const DiscreteBox D = scale.box_d(z);
  const DiscreteBox U = scale.box_u(z);

  LatticePoint lo = ens.window.front();
  LatticePoint hi = lo;
  for (const auto& p : ens.window)
    for (int i = 0; i < ens.d; ++i) {
      lo.c[i] = std::min(lo.c[i], p.c[i]);
      hi.c[i] = std::max(hi.c[i], p.c[i]);
    }
  for (int i = 0; i < ens.d; ++i) ++hi.c[i];
  // U inside the window bbox means the kill radius lies strictly beyond U, so
  // recorded paths always close their excursions.
  if (!DiscreteBox::from_corners(lo, hi).contains_box(U))
    throw std::invalid_argument("count_excursions: window too small for U_z");
  const auto dlayer = D.inner_boundary();
  for (const auto& p : dlayer)
    if (!std::binary_search(ens.window.begin(), ens.window.end(), p))
      throw std::invalid_argument("count_excursions: window must cover the inner boundary of D_z");
  const PointSet boundary(dlayer.begin(), dlayer.end());

  ExcursionRecord rec;
  rec.z = z;
  rec.u = u;
  for (size_t ti = 0; ti < ens.trajectories.size(); ++ti) {
    const Trajectory& t = ens.trajectories[ti];
    if (t.label > u) continue;
    size_t hold_idx = 0;
    bool inside = false;
    size_t entry = 0;
    double lt = 0;
    for (size_t j = 0; j < t.sites.size(); ++j) {
      const LatticePoint& x = t.sites[j];
      double hold = 0;
      if (std::binary_search(ens.window.begin(), ens.window.end(), x)) {
        if (hold_idx >= t.holds.size())
          throw std::runtime_error("count_excursions: trajectory holds underrun");
        hold = t.holds[hold_idx++];
      }
      if (!inside && D.contains(x)) {
        inside = true;
        entry = j;
        lt = 0;
      }
      if (!inside) continue;
      if (!U.contains(x)) {
        rec.excursions.push_back({ti, entry, j});
        rec.count += 1;
        rec.local_time += lt;
        inside = false;
      } else if (boundary.count(x)) {
        lt += hold;
      }
    }
    if (inside) throw std::runtime_error("count_excursions: trajectory ends inside U_z");
  }
  return rec;
}

void write_excursion_csv(const std::vector<ExcursionRecord>& records, std::ostream& os) {
  const int d = records.empty() ? 0 : records.front().z.d;
  for (int i = 0; i < d; ++i) os << 'z' << i << ',';
  os << "u,count,local_time\n";
  for (const auto& r : records) {
    for (int i = 0; i < d; ++i) os << r.z.c[i] << ',';
    os << hexs(r.u) << ',' << r.count << ',' << hexs(r.local_time) << '\n';
  }
}

OccupancyReport occupancy_check(const OccupationField& field, const std::vector<LatticePoint>& C,
                                double gamma, const PotentialTable& potential, double eps_hat) {
  if (gamma < 0) throw std::invalid_argument("occupancy_check: gamma must be nonnegative");
  if (eps_hat < 0) throw std::invalid_argument("occupancy_check: eps_hat must be nonnegative");
  if (C.empty()) throw std::invalid_argument("occupancy_check: C is empty");
  std::vector<LatticePoint> sorted_c(C);
  std::sort(sorted_c.begin(), sorted_c.end());
  // The table may live on the boundary layer of C only; it must not stick out.
  for (const auto& p : potential.support)
    if (!std::binary_search(sorted_c.begin(), sorted_c.end(), p))
      throw std::invalid_argument("occupancy_check: potential support escapes C");
  for (const auto& p : sorted_c)
    if (!std::binary_search(field.window.begin(), field.window.end(), p))
      throw std::invalid_argument("occupancy_check: C escapes the field window");

  OccupancyReport rep;
  for (size_t i = 0; i < potential.support.size(); ++i)
    rep.inner += field.value(potential.support[i]) * potential.e[i];
  rep.threshold = gamma * potential.capacity / (1.0 + eps_hat);
  rep.margin = rep.inner - rep.threshold;
  rep.pass = rep.inner >= rep.threshold;
  return rep;
}

EpsHatReport eps_hat_experiment(const std::vector<LatticePoint>& anchors, const ScalePair& scale,
                                const GreenTable& G) {
  if (anchors.empty()) throw std::invalid_argument("eps_hat_experiment: no anchors");
  std::vector<DiscreteBox> boxes;
  for (const auto& z : anchors) {
    if (z.d != scale.d) throw std::invalid_argument("eps_hat_experiment: anchor dimension mismatch");
    for (int i = 0; i < z.d; ++i)
      if (z.c[i] % scale.L0 != 0)
        throw std::invalid_argument("eps_hat_experiment: anchors must lie on the L0 lattice");
    boxes.push_back(scale.box_d(z));
  }
  for (size_t i = 0; i < boxes.size(); ++i)
    for (size_t j = i + 1; j < boxes.size(); ++j) {
      bool overlap = true;
      for (int k = 0; k < scale.d; ++k) {
        const int64_t alo = boxes[i].anchor.c[k], ahi = alo + boxes[i].extent[k];
        const int64_t blo = boxes[j].anchor.c[k], bhi = blo + boxes[j].extent[k];
        if (ahi <= blo || bhi <= alo) {
          overlap = false;
          break;
        }
      }
      if (overlap) throw std::invalid_argument("eps_hat_experiment: boxes overlap");
    }

  std::vector<LatticePoint> C;
  for (const auto& b : boxes) b.for_each([&](const LatticePoint& p) { C.push_back(p); });
  std::sort(C.begin(), C.end());

  const PotentialTable eC = equilibrium(C, G, EquilibriumBackend::kExact);
  const auto emap = eC.e_map();

  EpsHatReport rep;
  rep.cap_union = eC.capacity;
  SiteMap mu;
  for (const auto& b : boxes) {
    double mass = 0;
    for (size_t i = 0; i < eC.support.size(); ++i)
      if (b.contains(eC.support[i])) mass += eC.e[i];
    rep.mass_check += mass;
    const PotentialTable pb = equilibrium_box(b, G, EquilibriumBackend::kExact);
    for (size_t i = 0; i < pb.support.size(); ++i)
      mu[pb.support[i]] += mass * pb.e[i] / pb.capacity;
  }
  rep.support = mu.size();

  double worst = -1.0;
  for (const auto& kv : mu) {
    const auto it = emap.find(kv.first);
    // ebar_D lives on the boundary layer of its box, where e_C is positive.
    if (it == emap.end() || it->second <= 0)
      throw std::runtime_error("eps_hat_experiment: mixture site misses the union support");
    worst = std::max(worst, kv.second / it->second);
  }
  rep.eps_min = worst - 1.0;
  return rep;
}

}  // namespace rilab
