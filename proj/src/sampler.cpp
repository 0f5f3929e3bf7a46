#include "rilab/sampler.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "rilab/rng.hpp"

namespace rilab {

namespace {

using PointSet = std::unordered_set<LatticePoint, PointHash>;

void window_geometry(const std::vector<LatticePoint>& W, LatticePoint* center,
                     int64_t* diam_linf) {
  LatticePoint lo = W.front(), hi = W.front();
  for (const auto& p : W)
    for (int i = 0; i < p.d; ++i) {
      lo.c[i] = std::min(lo.c[i], p.c[i]);
      hi.c[i] = std::max(hi.c[i], p.c[i]);
    }
  *center = lo;
  *diam_linf = 0;
  for (int i = 0; i < lo.d; ++i) {
    center->c[i] = lo.c[i] + (hi.c[i] - lo.c[i]) / 2;
    *diam_linf = std::max<int64_t>(*diam_linf, hi.c[i] - lo.c[i]);
  }
}

int64_t linf_from(const LatticePoint& x, const LatticePoint& c) {
  int64_t m = 0;
  for (int i = 0; i < x.d; ++i)
    m = std::max<int64_t>(m, std::llabs(static_cast<int64_t>(x.c[i]) - c.c[i]));
  return m;
}

double hexd(const char* s) {
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s) throw std::runtime_error("ensemble parse: bad real");
  return v;
}

std::string hexs(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

int dir_char_to_index(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

char dir_index_to_char(int k) { return k < 10 ? static_cast<char>('0' + k) : static_cast<char>('a' + k - 10); }

}  // namespace

InterlacementEnsemble sample_ensemble(const std::vector<LatticePoint>& W, double u_max,
                                      const PotentialTable& potential, int64_t rho,
                                      uint64_t seed) {
  if (W.empty()) throw std::invalid_argument("sample_ensemble: empty window");
  if (u_max < 0 || !std::isfinite(u_max))
    throw std::invalid_argument("sample_ensemble: bad level");
  InterlacementEnsemble ens;
  ens.d = W.front().d;
  ens.window = W;
  std::sort(ens.window.begin(), ens.window.end());
  if (potential.d != ens.d || potential.support != ens.window)
    throw std::invalid_argument("sample_ensemble: equilibrium table does not match the window");
  int64_t diam = 0;
  window_geometry(ens.window, &ens.center, &diam);
  if (rho <= diam)
    throw std::invalid_argument("sample_ensemble: truncation radius must exceed the window diameter");
  ens.u_max = u_max;
  ens.cap_w = potential.capacity;
  ens.truncation_radius = rho;
  ens.seed = seed;

  const uint64_t n =
      make_stream(seed, RngUse::kEnsembleCount, 0).poisson(u_max * potential.capacity);
  if (n == 0) return ens;

  // potential.e is aligned with potential.support == ens.window
  const AliasTable starts(potential.e);
  PointSet members(ens.window.begin(), ens.window.end());
  const int two_d = 2 * ens.d;
  ens.trajectories.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    Philox walk = make_stream(seed, RngUse::kTrajectory, i);
    Philox holding = make_stream(seed, RngUse::kHoldingTimes, i);
    Trajectory t;
    t.label = u_max * (1.0 - walk.uniform01());
    LatticePoint x = ens.window[starts.sample(walk)];
    t.entry_index = 0;  // equilibrium starts lie in the window
    while (true) {
      t.sites.push_back(x);
      if (members.count(x)) t.holds.push_back(holding.exp1());
      x = x.neighbor(static_cast<int>(walk.uniform_int(two_d)));
      if (linf_from(x, ens.center) > rho) break;
    }
    ens.trajectories.push_back(std::move(t));
  }
  return ens;
}

OccupationField occupation_field(const InterlacementEnsemble& ens, double u) {
  if (u < 0 || u > ens.u_max)
    throw std::invalid_argument("occupation_field: level outside [0, u_max]");
  OccupationField f;
  f.window = ens.window;
  f.u = u;
  PointSet members(ens.window.begin(), ens.window.end());
  for (const auto& t : ens.trajectories) {
    if (t.label > u) continue;
    size_t cursor = 0;
    for (const auto& x : t.sites)
      if (members.count(x)) f.L[x] += t.holds[cursor++];
  }
  return f;
}

std::vector<LatticePoint> interlacement_set(const InterlacementEnsemble& ens, double u) {
  if (u < 0 || u > ens.u_max)
    throw std::invalid_argument("interlacement_set: level outside [0, u_max]");
  PointSet members(ens.window.begin(), ens.window.end());
  PointSet hit;
  for (const auto& t : ens.trajectories) {
    if (t.label > u) continue;
    for (const auto& x : t.sites)
      if (members.count(x)) hit.insert(x);
  }
  std::vector<LatticePoint> out(hit.begin(), hit.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LatticePoint> vacant_set(const InterlacementEnsemble& ens, double u,
                                     const std::vector<LatticePoint>& region) {
  for (const auto& p : region)
    if (!std::binary_search(ens.window.begin(), ens.window.end(), p))
      throw std::invalid_argument("vacant_set: region escapes the window");
  const auto hit = interlacement_set(ens, u);
  std::vector<LatticePoint> out;
  for (const auto& p : region)
    if (!std::binary_search(hit.begin(), hit.end(), p)) out.push_back(p);
  return out;
}

void write_ensemble(const InterlacementEnsemble& ens, std::ostream& os) {
  os << "ensemble d=" << ens.d << " seed=" << ens.seed << " rho=" << ens.truncation_radius
     << " u_max=" << hexs(ens.u_max) << " cap_w=" << hexs(ens.cap_w)
     << " window=" << ens.window.size() << " trajectories=" << ens.trajectories.size()
     << "\n";
  for (const auto& p : ens.window) {
    os << "w";
    for (int i = 0; i < ens.d; ++i) os << ' ' << p.c[i];
    os << "\n";
  }
  for (const auto& t : ens.trajectories) {
    os << "t " << hexs(t.label) << ' ' << t.entry_index << ' ' << t.sites.size();
    for (int i = 0; i < ens.d; ++i) os << ' ' << t.sites.front().c[i];
    os << ' ';
    if (t.sites.size() == 1) {
      os << '-';
    } else {
      for (size_t k = 1; k < t.sites.size(); ++k) {
        const LatticePoint step = t.sites[k] - t.sites[k - 1];
        int dir = -1;
        for (int j = 0; j < 2 * ens.d; ++j)
          if (step == LatticePoint::zero(ens.d).neighbor(j)) {
            dir = j;
            break;
          }
        if (dir < 0) throw std::invalid_argument("write_ensemble: sites are not a walk");
        os << dir_index_to_char(dir);
      }
    }
    os << ' ' << t.holds.size();
    for (double h : t.holds) os << ' ' << hexs(h);
    os << "\n";
  }
}

InterlacementEnsemble read_ensemble(std::istream& is) {
  InterlacementEnsemble ens;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("ensemble parse: empty stream");
  size_t nwindow = 0, ntraj = 0;
  {
    char umax_buf[48], capw_buf[48];
    long long d = 0, rho = 0;
    unsigned long long seed = 0, nw = 0, nt = 0;
    if (std::sscanf(line.c_str(),
                    "ensemble d=%lld seed=%llu rho=%lld u_max=%47s cap_w=%47s "
                    "window=%llu trajectories=%llu",
                    &d, &seed, &rho, umax_buf, capw_buf, &nw, &nt) != 7)
      throw std::runtime_error("ensemble parse: bad header");
    if (d < 1 || d > kMaxDim) throw std::runtime_error("ensemble parse: bad dimension");
    ens.d = static_cast<int>(d);
    ens.seed = seed;
    ens.truncation_radius = rho;
    ens.u_max = hexd(umax_buf);
    ens.cap_w = hexd(capw_buf);
    nwindow = nw;
    ntraj = nt;
  }
  ens.window.reserve(nwindow);
  for (size_t k = 0; k < nwindow; ++k) {
    if (!std::getline(is, line)) throw std::runtime_error("ensemble parse: truncated window");
    std::istringstream ls(line);
    std::string tag;
    LatticePoint p = LatticePoint::zero(ens.d);
    ls >> tag;
    if (tag != "w") throw std::runtime_error("ensemble parse: expected window site");
    for (int i = 0; i < ens.d; ++i)
      if (!(ls >> p.c[i])) throw std::runtime_error("ensemble parse: bad window site");
    ens.window.push_back(p);
  }
  if (!std::is_sorted(ens.window.begin(), ens.window.end()))
    throw std::runtime_error("ensemble parse: window not sorted");
  int64_t diam = 0;
  window_geometry(ens.window, &ens.center, &diam);
  PointSet members(ens.window.begin(), ens.window.end());

  ens.trajectories.reserve(ntraj);
  for (size_t k = 0; k < ntraj; ++k) {
    if (!std::getline(is, line)) throw std::runtime_error("ensemble parse: truncated trajectories");
    std::istringstream ls(line);
    std::string tag, label_s, dirs;
    size_t nsites = 0, nholds = 0;
    Trajectory t;
    ls >> tag >> label_s >> t.entry_index >> nsites;
    if (tag != "t" || nsites == 0) throw std::runtime_error("ensemble parse: bad trajectory");
    t.label = hexd(label_s.c_str());
    LatticePoint x = LatticePoint::zero(ens.d);
    for (int i = 0; i < ens.d; ++i)
      if (!(ls >> x.c[i])) throw std::runtime_error("ensemble parse: bad start site");
    if (!(ls >> dirs)) throw std::runtime_error("ensemble parse: missing steps");
    t.sites.reserve(nsites);
    t.sites.push_back(x);
    if (dirs != "-") {
      for (char c : dirs) {
        const int dir = dir_char_to_index(c);
        if (dir < 0 || dir >= 2 * ens.d)
          throw std::runtime_error("ensemble parse: bad step direction");
        x = x.neighbor(dir);
        t.sites.push_back(x);
      }
    }
    if (t.sites.size() != nsites) throw std::runtime_error("ensemble parse: site count mismatch");
    if (!(ls >> nholds)) throw std::runtime_error("ensemble parse: missing hold count");
    t.holds.reserve(nholds);
    for (size_t j = 0; j < nholds; ++j) {
      std::string h;
      if (!(ls >> h)) throw std::runtime_error("ensemble parse: truncated holds");
      t.holds.push_back(hexd(h.c_str()));
      if (!(t.holds.back() > 0)) throw std::runtime_error("ensemble parse: nonpositive hold");
    }
    size_t visits = 0;
    for (const auto& s : t.sites)
      if (members.count(s)) ++visits;
    if (visits != nholds) throw std::runtime_error("ensemble parse: hold count mismatch");
    if (!(t.label > 0) || t.label > ens.u_max)
      throw std::runtime_error("ensemble parse: label outside (0, u_max]");
    ens.trajectories.push_back(std::move(t));
  }
  return ens;
}

BackwardCheckReport paranoid_backward_check(const std::vector<LatticePoint>& W,
                                            const PotentialTable& potential,
                                            const GreenTable& G, int64_t rho,
                                            uint64_t seed, uint64_t trajectories,
                                            int64_t max_steps) {
  if (W.empty()) throw std::invalid_argument("paranoid_backward_check: empty window");
  std::vector<LatticePoint> sorted(W);
  std::sort(sorted.begin(), sorted.end());
  if (potential.d != sorted.front().d || potential.support != sorted)
    throw std::invalid_argument("paranoid_backward_check: table does not match the window");
  LatticePoint center;
  int64_t diam = 0;
  window_geometry(sorted, &center, &diam);
  if (rho <= diam)
    throw std::invalid_argument("paranoid_backward_check: truncation radius too small");

  PointSet members(sorted.begin(), sorted.end());
  std::unordered_map<LatticePoint, double, PointHash> hcache;
  auto survival = [&](const LatticePoint& y) {
    auto it = hcache.find(y);
    if (it == hcache.end())
      it = hcache.emplace(y, std::max(0.0, 1.0 - harmonic_at(potential, G, y))).first;
    return it->second;
  };

  const AliasTable starts(potential.e);
  const int two_d = 2 * sorted.front().d;
  BackwardCheckReport rep;
  std::vector<double> w(two_d);
  for (uint64_t i = 0; i < trajectories; ++i) {
    Philox rng = make_stream(seed, RngUse::kParanoid, i);
    LatticePoint x = sorted[starts.sample(rng)];
    ++rep.checked;
    bool alive = true;
    for (int64_t step = 0; alive && step < max_steps; ++step) {
      double total = 0, into_window = 0;
      for (int k = 0; k < two_d; ++k) {
        w[k] = survival(x.neighbor(k));
        total += w[k];
        if (members.count(x.neighbor(k))) into_window = std::max(into_window, w[k]);
      }
      if (total <= 0)
        throw std::runtime_error("paranoid_backward_check: no escape weight at a start");
      rep.max_window_weight = std::max(rep.max_window_weight, into_window / total);
      double pick = rng.uniform01() * total;
      int k = 0;
      while (k + 1 < two_d && pick >= w[k]) pick -= w[k++];
      x = x.neighbor(k);
      if (members.count(x)) {
        ++rep.reentries;
        alive = false;
      } else if (linf_from(x, center) > rho) {
        ++rep.killed_at_radius;
        alive = false;
      }
    }
    if (alive) ++rep.truncated;
  }
  return rep;
}

}  // namespace rilab
