#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rilab/green.hpp"
#include "rilab/point.hpp"

namespace rilab {

enum class EquilibriumBackend { kExact, kMonteCarlo };

struct EquilibriumParams {
  int max_exact = 4096;        // cap on the reduced unknown count for dense solves
  uint64_t mc_samples = 4000;  // escape samples per support site
  int64_t rho = 0;             // MC truncation radius; 0 = 8*diam + 64
  uint64_t seed = 12345;
};

// Equilibrium measure e_K, capacity and provenance for a finite K in Z^d.
struct PotentialTable {
  int d = 3;
  std::vector<LatticePoint> support;  // K, enumeration order
  std::vector<double> e;              // e_K aligned with support
  double capacity = 0;
  std::string backend;    // exact-dense | exact-layer | exact-orbit | monte-carlo | monte-carlo-hitting
  bool auto_switched = false;  // exact request fell back to MC (size cap)
  double residual = 0;         // exact: max |G e - 1| over sampled sites of K
  double cap_se = 0;           // MC only
  double bias_bound = 0;       // MC truncation bias estimate
  std::vector<double> e_se;    // MC only

  SiteMap e_map() const {
    SiteMap m;
    m.reserve(support.size());
    for (size_t i = 0; i < support.size(); ++i) m[support[i]] = e[i];
    return m;
  }
  std::vector<double> normalized() const {
    std::vector<double> p(e);
    for (double& v : p) v /= capacity;
    return p;
  }
};

PotentialTable equilibrium(const std::vector<LatticePoint>& K, const GreenTable& G,
                           EquilibriumBackend backend, const EquilibriumParams& params = {});
// Solid-box fast path (layer reduction; orbit reduction for cubes).
PotentialTable equilibrium_box(const DiscreteBox& box, const GreenTable& G,
                               EquilibriumBackend backend, const EquilibriumParams& params = {});
// Hitting-from-infinity estimator for sets too large for per-site escapes:
// uniform starts on the linf sphere of radius rho0, empirical hit sites give
// the normalized measure, hit rate against the far-field kernel gives cap.
PotentialTable equilibrium_mc_hitting(const std::vector<LatticePoint>& K, const GreenTable& G,
                                      int64_t rho0, uint64_t samples, uint64_t seed);
// Re-keys a table onto a sorted superset K of its support, padding with exact
// zeros: e_K vanishes at any site whose neighbors all stay in K (the layer
// solvers return boundary-only supports), so the padded table represents the
// same measure. Throws if K is unsorted or misses a support site.
PotentialTable expand_support(const PotentialTable& t, const std::vector<LatticePoint>& K);

// h_K(x) = (G e_K)(x); beyond the table radius the power-law extension is used.
double harmonic_at(const PotentialTable& t, const GreenTable& G, const LatticePoint& x);
SiteMap harmonic_on(const PotentialTable& t, const GreenTable& G,
                    const std::vector<LatticePoint>& pts);

// Discrete Dirichlet form (1/4d) sum over ordered neighbor pairs of
// (f(y)-f(x))(g(y)-g(x)); missing keys read as 0 (finite-support semantics).
double dirichlet_form(int d, const SiteMap& f, const SiteMap& g);

// Same sum restricted to edges with both endpoints inside the window, for
// functions with slow decay evaluated off-support (no zero-fill at the cut).
struct WindowedDirichlet {
  double value = 0;
  double tail_estimate = 0;  // first-order magnitude of the missing exterior sum
};
template <typename F>
WindowedDirichlet dirichlet_form_window(int d, F&& f, const DiscreteBox& window,
                                        double cap_for_tail = 0);

double dirichlet_tail_estimate(int d, double cap, double R);

// --- implementation of the template ---
template <typename F>
WindowedDirichlet dirichlet_form_window(int d, F&& f, const DiscreteBox& window,
                                        double cap_for_tail) {
  double s = 0;
  window.for_each([&](const LatticePoint& x) {
    const double fx = f(x);
    for (int axis = 0; axis < d; ++axis) {
      LatticePoint y = x;
      ++y.c[axis];
      if (!window.contains(y)) continue;
      const double dxy = f(y) - fx;
      s += dxy * dxy;
    }
  });
  WindowedDirichlet out;
  out.value = s / (2.0 * d);  // unordered edges, each ordered pair twice
  double R = 0;
  for (int i = 0; i < d; ++i) R = std::max(R, 0.5 * (window.extent[i] - 1));
  out.tail_estimate = dirichlet_tail_estimate(d, cap_for_tail, R);
  return out;
}

}  // namespace rilab
