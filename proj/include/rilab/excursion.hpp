#pragma once
// Excursion decomposition of interlacement trajectories between a core box
// D_z and the exterior boundary of a much larger concentric box U_z, the
// excursion counts N_u, the occupancy inequality they feed, and the scale
// constructors for the box hierarchy B_z within D_z within U_z.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rilab/equilibrium.hpp"
#include "rilab/green.hpp"
#include "rilab/point.hpp"
#include "rilab/sampler.hpp"

namespace rilab {

// Box hierarchy scales. The production constructor evaluates
//   L0   = floor((gamma * N * log N)^(1/(d-1))),
//   Lhat0 = 100 d floor(sqrt(gamma) * N),
// and keeps K >= 100 as the separation parameter; kbar() = 2K + 3 is the
// minimal anchor spacing (in units of L0) for well-separated collections.
// The toy constructor takes L0 and K directly so that desk-size windows can
// exercise the same geometry; the formulas above stay available for exact
// arithmetic tests.
struct ScalePair {
  int d = 3;
  int64_t N = 0;      // 0 for toy scales
  double gamma = 0;   // 0 for toy scales
  int64_t L0 = 0;
  int64_t Lhat0 = 0;  // 0 for toy scales
  int32_t K = 100;
  bool toy = false;

  int32_t kbar() const { return 2 * K + 3; }
  // B_z = z + [0, L0)^d
  DiscreteBox box_b(const LatticePoint& z) const;
  // D_z = z + [-3 L0, 4 L0)^d
  DiscreteBox box_d(const LatticePoint& z) const;
  // U_z = z + [-K L0 + 1, K L0 - 1)^d
  DiscreteBox box_u(const LatticePoint& z) const;
};

ScalePair scales(int64_t N, double gamma, int32_t K, int d = 3);
ScalePair toy_scales(int64_t L0, int32_t K, int d = 3);

struct Excursion {
  size_t trajectory = 0;  // index into ens.trajectories
  size_t entry = 0;       // first site index inside D_z
  size_t exit = 0;        // first subsequent site index outside U_z
};

struct ExcursionRecord {
  LatticePoint z;
  double u = 0;
  uint64_t count = 0;      // N_u(D_z)
  double local_time = 0;   // holds spent on the inner boundary of D_z
  std::vector<Excursion> excursions;
};

// Counts excursions of the label <= u trajectories from D_z to the exterior
// boundary of U_z and accumulates the holding time the counted excursions
// spend on the inner boundary of D_z. Requires U_z inside the window's
// bounding box and the inner boundary of D_z inside the window itself, which
// also guarantees every started excursion completes before the kill radius.
ExcursionRecord count_excursions(const InterlacementEnsemble& ens, double u,
                                 const LatticePoint& z, const ScalePair& scale);

void write_excursion_csv(const std::vector<ExcursionRecord>& records, std::ostream& os);

// Occupancy inequality: <L_u, e_C> against gamma * cap(C) / (1 + eps_hat).
struct OccupancyReport {
  double inner = 0;      // <L_u, e_C>
  double threshold = 0;  // gamma * cap(C) / (1 + eps_hat)
  double margin = 0;     // inner - threshold
  bool pass = false;
};

OccupancyReport occupancy_check(const OccupationField& field, const std::vector<LatticePoint>& C,
                                double gamma, const PotentialTable& potential,
                                double eps_hat = 0.0);

// Measures the smallest admissible eps_hat in
//   sum_D e_C(D) ebar_D(x) <= (1 + eps_hat) e_C(x)  for all x,
// where C is the union of the boxes D_z over the given anchors and ebar_D is
// the normalized equilibrium measure of the single box D. Anchors must lie on
// the L0 lattice and the boxes must be pairwise disjoint; the caller chooses
// the spacing (the separation regime of interest is kbar() * L0 and beyond).
// Both sides carry total mass cap(C), so eps_min >= 0 with equality exactly
// when the mixture reproduces e_C (single box).
struct EpsHatReport {
  double eps_min = 0;
  double cap_union = 0;
  double mass_check = 0;  // sum_D e_C(D), equals cap_union up to solver error
  size_t support = 0;     // sites carrying the mixture measure
};

EpsHatReport eps_hat_experiment(const std::vector<LatticePoint>& anchors, const ScalePair& scale,
                                const GreenTable& G);

}  // namespace rilab
