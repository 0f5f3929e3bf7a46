#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rilab/equilibrium.hpp"
#include "rilab/green.hpp"
#include "rilab/point.hpp"

namespace rilab {

using RealPoint = std::array<double, kMaxDim>;

inline RealPoint real_point(double x, double y, double z) {
  RealPoint p{};
  p[0] = x;
  p[1] = y;
  p[2] = z;
  return p;
}

// Compact subsets of R^d used as hitting targets: closed balls, closed boxes
// and finite unions of closed boxes.
struct CompactShape {
  enum class Kind { kBall, kBox, kUnion };
  Kind kind = Kind::kBall;
  int d = 3;
  RealPoint center{};  // ball
  double radius = 0;
  std::vector<RealPoint> lo, hi;  // boxes, aligned corner pairs

  static CompactShape ball(int d, const RealPoint& c, double r);
  static CompactShape box(int d, const RealPoint& lo, const RealPoint& hi);
  static CompactShape box_union(int d, const std::vector<RealPoint>& lo,
                                const std::vector<RealPoint>& hi);

  bool contains(const RealPoint& x) const;
  double distance(const RealPoint& x) const;  // Euclidean, 0 inside
  double diameter() const;
  // Simple enclosing ball: exact for balls, bounding-box circumball otherwise.
  void enclosing(RealPoint* c, double* r) const;
  bool is_cube(double* side) const;  // equal extents (single box only)
};

// {x in Z^d : x/N in B}
std::vector<LatticePoint> discretize_shape(const CompactShape& B, int N);

struct WosParams {
  double shell_factor = 1e-4;    // absorption width = factor * diam(B)
  double trigger_factor = 32.0;  // survive/reenter decision radius, in r_enc units
  uint64_t samples = 200000;
  uint64_t seed = 717;
  double target_se = 0;  // stop early once the SE drops below this (0: run all)
  int max_steps = 200000;
};

struct McEstimate {
  double value = 0;
  double se = 0;
  uint64_t samples = 0;
  uint64_t truncated = 0;  // trajectories stopped by max_steps, counted as escapes
};

enum class PotentialMethod { kExactBall, kWalkOnSpheres, kDiscreteLimit };

struct PotentialQuery {
  PotentialMethod method = PotentialMethod::kWalkOnSpheres;
  WosParams wos;
  int discrete_scale = 8;             // N for the discrete-limit route
  const GreenTable* table = nullptr;  // required for discrete-limit
  EquilibriumParams eq;
};

// W_z[hit B]. Exact-ball only for balls; walk-on-spheres absorbs on an
// eps-shell and handles the exterior by the survive/reenter rule (uniform
// reentry on the enclosing sphere; relative bias O((r_enc/rho)^{d-2}) from
// harmonic-measure nonuniformity at the trigger radius rho); discrete-limit
// returns h_{B_N}(floor(N z)) with O(1/N) bias.
McEstimate harmonic_potential(const CompactShape& B, const RealPoint& z,
                              const PotentialQuery& q = {});

enum class CapacityMethod { kDirichletEnergy, kScaling, kDiscreteLimit, kWosHitting };

struct CapacityQuery {
  CapacityMethod method = CapacityMethod::kScaling;
  WosParams wos;
  double start_factor = 4.0;  // start sphere radius, in r_enc units
  std::vector<int> scales = {16, 24, 32};
  const GreenTable* table = nullptr;
  EquilibriumParams eq;
};

struct CapacityEstimate {
  double value = 0;
  double se = 0;  // wos-hitting only
  std::string method;
  std::vector<double> ladder;  // discrete-limit: d capZ(B_N) / N^{d-2} per scale
};

// Brownian capacity in the normalization E(f) = (1/2) int |grad f|^2, so
// cap(ball r, d=3) = 2 pi r. dirichlet-energy: analytic energy of the radial
// potential, balls only. scaling: unit-shape constants (ball analytic, cube
// via the recorded unit-cube value). discrete-limit: d cap_Z(B_N) / N^{d-2}
// extrapolated over the scale ladder. wos-hitting: uniform starts on a sphere
// of radius rho containing B give cap = mean hit prob / G_BM(rho) exactly
// (spherical averaging), up to the documented reentry bias.
CapacityEstimate brownian_capacity(const CompactShape& B, const CapacityQuery& q);

// Recorded unit-shape constants (d=3). The cube value comes from the
// discrete-limit extrapolation documented in data/golden_capacities.json.
double unit_cube_capacity_d3();

// (sqrt(u) + (sqrt(u_bar) - sqrt(u)) * pot)^2; requires 0 < u < u_bar and
// pot in [0,1]. Range [u, u_bar], monotone in pot.
double profile_value(double u, double u_bar, double potential);

// M^u_B(x): continuum profile through the harmonic potential of B.
double profile_at(double u, double u_bar, const CompactShape& B, const RealPoint& x,
                  const PotentialQuery& q = {});
// M^u_C(x): discrete profile through h_C of an equilibrium table.
double profile_at_discrete(double u, double u_bar, const PotentialTable& eq,
                           const GreenTable& G, const LatticePoint& x);

}  // namespace rilab
