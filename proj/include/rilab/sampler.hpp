#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "rilab/equilibrium.hpp"
#include "rilab/green.hpp"
#include "rilab/point.hpp"

namespace rilab {

// One forward trajectory of the window-restricted interlacement process.
// sites is the full path from the equilibrium start until the walk first
// leaves the truncation ball; consecutive sites are lattice neighbors. holds
// carries one exp(1) holding time per visit to a window site, in visit order;
// holding times elsewhere are never queried downstream, so they are not
// sampled (separate RNG streams keep this choice from shifting the path law).
struct Trajectory {
  double label = 0;  // uniform on (0, u_max]
  std::vector<LatticePoint> sites;
  std::vector<double> holds;
  int64_t entry_index = 0;  // first index with sites[i] in the window
};

struct InterlacementEnsemble {
  int d = 3;
  std::vector<LatticePoint> window;  // sorted
  double u_max = 0;
  double cap_w = 0;               // capacity behind the Poisson intensity
  int64_t truncation_radius = 0;  // walks die on leaving B_linf(center, radius)
  LatticePoint center;            // bbox center of the window
  uint64_t seed = 0;
  std::vector<Trajectory> trajectories;
};

struct OccupationField {
  std::vector<LatticePoint> window;
  double u = 0;
  std::unordered_map<LatticePoint, double, PointHash> L;

  double value(const LatticePoint& x) const {
    auto it = L.find(x);
    return it == L.end() ? 0.0 : it->second;
  }
};

// Poisson(u_max * cap_W) many forward walks started from the normalized
// equilibrium measure of W, each killed on first exit from the sup-norm ball
// of radius rho around the window center and tagged with a uniform level
// label. The backward halves of the interlacement trajectories are omitted:
// conditioned on never returning to W they contribute neither occupation nor
// trace inside the window (paranoid_backward_check samples them anyway).
// potential must be an equilibrium table for exactly W; rho must exceed the
// sup-norm diameter of W.
InterlacementEnsemble sample_ensemble(const std::vector<LatticePoint>& W, double u_max,
                                      const PotentialTable& potential, int64_t rho,
                                      uint64_t seed);

// L(x) = sum of holding times at x over trajectories with label <= u,
// supported on the window. Requires 0 <= u <= u_max.
OccupationField occupation_field(const InterlacementEnsemble& ens, double u);

// Window trace of the level-u interlacement set, sorted. The trace outside
// the window is incomplete by construction and deliberately not exposed.
std::vector<LatticePoint> interlacement_set(const InterlacementEnsemble& ens, double u);

// region \ I^u for region inside the window, preserving region order.
std::vector<LatticePoint> vacant_set(const InterlacementEnsemble& ens, double u,
                                     const std::vector<LatticePoint>& region);

// Line-delimited persistence with hexfloat reals: bit-exact round trips.
// Layout: one header line, one line per window site, one line per trajectory
// (label, absolute first site, step directions as hex digits, window holds).
void write_ensemble(const InterlacementEnsemble& ens, std::ostream& os);
InterlacementEnsemble read_ensemble(std::istream& is);

struct BackwardCheckReport {
  uint64_t checked = 0;
  uint64_t reentries = 0;         // must stay 0: the transform forbids W
  uint64_t killed_at_radius = 0;  // walks ended by the truncation ball
  uint64_t truncated = 0;         // walks ended by the step cap instead
  double max_window_weight = 0;   // largest normalized step weight into W seen
};

// Samples backward halves under the Doob transform by h = 1 - h_W: the first
// step from an equilibrium start is weighted by (1 - h_W(y)), later steps by
// the same ratio rule. Numerically h_W on W is only residual-close to 1, so
// the walk could in principle step into W; this check measures that it never
// does. h_W comes from the table via harmonic_at, cached per site.
BackwardCheckReport paranoid_backward_check(const std::vector<LatticePoint>& W,
                                            const PotentialTable& potential,
                                            const GreenTable& G, int64_t rho,
                                            uint64_t seed, uint64_t trajectories,
                                            int64_t max_steps = 1000000);

}  // namespace rilab
