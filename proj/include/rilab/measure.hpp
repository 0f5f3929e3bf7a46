#pragma once
// Scaled occupation measures on the closed box B_R = [-R, R]^d, exact atomic
// transport distances (1-Wasserstein, the mass+shape box distance, bounded
// Lipschitz), the two-sided comparison between them, and the mollified
// location family used to test measures against smooth bumps.
//
// All three distances reduce to one balanced transportation problem solved by
// a dense network simplex with a duality-gap certificate: wasserstein1 runs it
// on the bipartite support graph, bounded_lipschitz on the same graph
// augmented by a unit-cost virtual source/sink pair (mass creation and
// destruction), which is the flat-norm formulation of the bounded Lipschitz
// dual with |eta| <= 1 boxes and Lipschitz constraints on all support pairs.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rilab/point.hpp"
#include "rilab/sampler.hpp"

namespace rilab {

// Coordinates padded with zeros beyond d so the map ordering is total.
using RealPoint = std::array<double, kMaxDim>;

struct ScaledMeasure {
  int d = 3;
  double R = 0;
  std::map<RealPoint, double> atoms;  // position -> positive mass
  double total = 0;

  // Adds mass at x, merging duplicates; zero mass is dropped. Throws if x
  // falls outside B_R or the mass is negative.
  void add(const RealPoint& x, double mass);
  // Same atoms with masses divided by the total; throws on the zero measure.
  ScaledMeasure normalized() const;
};

// Occupation field scaled onto the 1/N grid: an atom at x/N of mass L(x)/N^d
// for every lattice site x of N B_R. The field window must cover N B_R.
ScaledMeasure scaled_measure(const OccupationField& field, int64_t N, double R);

// Midpoint discretization of a continuum density f on the 1/N grid: mass
// f(x/N)/N^d at x/N; nonpositive values are dropped.
ScaledMeasure density_measure(const std::function<double(const RealPoint&)>& f, int d, int64_t N,
                              double R);

// Atoms merged onto cell centers of the grid with spacing 1/Nprime. Each unit
// of mass moves at most sqrt(d)/(2 Nprime), so any transport distance shifts
// by at most that amount per coarsened side.
ScaledMeasure coarsen(const ScaledMeasure& mu, int64_t Nprime);

struct TransportReport {
  double value = 0;
  double gap = 0;      // primal cost minus a feasible dual objective
  uint64_t pivots = 0;
  std::string solver;  // "flow" or "flow+coarsen"
  double coarsen_error = 0;  // extra transport error bound when coarsened
};

// 1-Wasserstein distance with Euclidean ground cost between two probability
// measures (totals within 1e-9 of one). Supports larger than the coarsening
// threshold are merged first; the report carries the induced error bound.
TransportReport wasserstein1(const ScaledMeasure& P, const ScaledMeasure& Q);

// Bounded Lipschitz distance sup{ <mu - nu, eta> : |eta| <= 1, Lip(eta) <= 1 }
// via the flat-norm transport formulation. Zero measures are legal inputs.
TransportReport bounded_lipschitz(const ScaledMeasure& mu, const ScaledMeasure& nu);

// |mu(B_R) - nu(B_R)| + wasserstein1 of the normalized measures; 0 when both
// vanish and +infinity when exactly one does.
double box_distance(const ScaledMeasure& mu, const ScaledMeasure& nu);

struct DistanceReport {
  double d_w = 0;   // NaN when either measure vanishes
  double d_r = 0;   // +infinity when exactly one vanishes
  double d_bl = 0;
  std::string solver;
  double gap = 0;   // worst duality gap among the solves involved
};

DistanceReport distance_report(const ScaledMeasure& mu, const ScaledMeasure& nu);
void write_distance_csv(const std::vector<DistanceReport>& reports, std::ostream& os);

// Two-sided comparison for positive measures:
//   d_BL / (mu(B) ^ nu(B) + 1)  <=  d_R  <=  d_BL (1 + 2 ((sqrt(d) R) v 1) / (mu(B) v nu(B)))
struct SandwichReport {
  double lower = 0;
  double value = 0;  // d_R
  double upper = 0;
  double d_bl = 0;
  double slack_lower = 0;  // value - lower
  double slack_upper = 0;  // upper - value
  bool pass = false;       // both slacks >= -1e-7
};

SandwichReport distance_sandwich(const ScaledMeasure& mu, const ScaledMeasure& nu);

// Polynomial bump chi(y) = c (1 - |y|^2)^4 on the Euclidean unit ball,
// normalized to integrate to one: c = Gamma(d/2 + 5) / (24 pi^{d/2}).
struct Bump {
  int d = 3;
  double c = 0;

  double operator()(const RealPoint& y) const;
  // chi_eps(y) = eps^-d chi(y / eps)
  double chi_eps(const RealPoint& y, double eps) const;
};

Bump bump_density(int d = 3);

// The location family member chi_eps(. - x/N) for a lattice anchor x.
std::function<double(const RealPoint&)> location_test_function(const Bump& chi, double eps,
                                                               int64_t N, const LatticePoint& x);

// Discrete convolution eta^eps_N(x) = N^-d sum_{y in Z^d} chi_eps(x - y/N) eta(y/N),
// with eta extended by zero outside B_R. eps must lie in (0, 1).
std::function<double(const RealPoint&)> discrete_convolution(
    const std::function<double(const RealPoint&)>& eta, double R, double eps, int64_t N,
    const Bump& chi);

}  // namespace rilab
