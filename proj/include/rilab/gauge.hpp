#pragma once

#include <string>
#include <vector>

#include "rilab/equilibrium.hpp"
#include "rilab/green.hpp"
#include "rilab/point.hpp"

namespace rilab {

// Finitely supported potential on Z^d. Admissibility means ||G|V|||_inf < 1;
// since G|V| is superharmonic, harmonic off the support and vanishes at
// infinity, the sup is a finite max attained on the support.
struct Potential {
  int d = 3;
  std::vector<LatticePoint> support;  // sorted, unique, zero values dropped
  std::vector<double> values;         // aligned with support

  static Potential from_map(int d, const SiteMap& vals);
  static Potential single_site(const LatticePoint& x, double s);
  // a * e_C for an equilibrium table of C.
  static Potential scaled_equilibrium(const PotentialTable& eq, double a);

  size_t size() const { return support.size(); }
  bool empty() const { return support.empty(); }
  double at(const LatticePoint& x) const;  // 0 off support
  SiteMap as_map() const;
  Potential abs() const;
  double total_abs() const;  // <|V|, 1>
};

// V + t*W on the union support.
Potential perturbed(const Potential& v, double t, const Potential& w);

// ||G|V|||_inf, evaluated exactly on the support.
double potential_norm_GV(const Potential& v, const GreenTable& G);

// gamma_V = (I - GV)^{-1} 1. GV has finite rank, so the solve reduces to
// supp V; off the support gamma(x) = 1 + sum_y g(x,y) V(y) gamma(y) exactly.
struct GaugeResult {
  Potential v;
  std::vector<double> gamma_support;  // aligned with v.support

  double pairing = 0;     // <V, gamma>
  double pairing_sq = 0;  // <V, gamma^2>
  // Dirichlet form of gamma - 1: edge sum over a padded window closed by the
  // exact boundary flux (discrete Gauss-Green), padded until stable to 1e-12.
  double dirichlet = 0;
  // <V, gamma^2 - gamma>, the summation-by-parts value of the same form.
  // Agreement with `dirichlet` is a nontrivial consistency check: one side
  // uses only on-support values, the other thousands of off-support table
  // entries and their harmonicity.
  double dirichlet_pairing = 0;

  double norm_gv = 0;    // ||G|V|||_inf
  double gamma_sup = 0;  // ||gamma||_inf (max over support and outer boundary)
  double cond = 0;       // inf-norm condition number of I - GV on the support
  double residual = 0;   // max |gamma - 1 - GV gamma| on the support
};

// Throws std::invalid_argument when ||G|V|||_inf > 0.999.
GaugeResult gauge(const Potential& v, const GreenTable& G);
double gauge_at(const GaugeResult& r, const GreenTable& G, const LatticePoint& x);
SiteMap gauge_on(const GaugeResult& r, const GreenTable& G,
                 const std::vector<LatticePoint>& pts);

// Residuals of the three perturbation identities, evaluated by dense linear
// algebra on the joint support plus caller probes:
//   (1) gamma' - gamma = (I - GV)^{-1} G (V'-V) gamma'
//   (2) <V',gamma'> - <V,gamma> = <(V'-V) gamma, gamma'>
//   (3) gamma' = (I - (I - GV)^{-1} G (V'-V))^{-1} gamma
// (3) needs the contraction ||(I-G|V|)^{-1} G|V'-V|||_inf < 1; when that
// fails it is skipped and explicit_checked stays false.
struct PerturbationReport {
  double residual_difference = 0;
  double residual_pairing = 0;
  double residual_explicit = 0;
  bool explicit_checked = false;
  double contraction_norm = 0;  // ||(I-G|V|)^{-1} G |V'-V|||_inf
  double norm_gv = 0;
  double norm_gvp = 0;
};
PerturbationReport verify_lemma31(const Potential& v, const Potential& vp,
                                  const GreenTable& G,
                                  const std::vector<LatticePoint>& probes = {});

// E[exp <L_u, V>] = exp(u <V, gamma_V>) for admissible V.
struct LaplaceValue {
  double value = 1;
  double pairing = 0;
  bool variance_warning = false;  // ||G|V|||_inf > 0.9: MC comparison unstable
};
LaplaceValue laplace_functional(const Potential& v, double u, const GreenTable& G);

// R_{delta,eta,V} = <|eta|,1> ||gamma_V||_inf^2 * delta^2 s / (1 - delta s)
// with s = ||(I-G|V|)^{-1} G |eta|||_inf. Throws std::domain_error when the
// denominator is not positive.
double remainder_term(double delta, const Potential& eta, const Potential& v,
                      const GreenTable& G);

// Exponential tail bound for P[<L_u, V'> >= u <V', gamma_V^2> + t] with
// V' = V + delta*eta: exp(-u E(gamma_V - 1) - t + u R).
struct TailBoundReport {
  double dirichlet = 0;
  double remainder = 0;
  double threshold = 0;  // u <V', gamma_V^2>, the centering of the event
  double bound = 0;
  double norm_gv = 0;
  double norm_gvp = 0;
  double contraction_norm = 0;  // delta * ||(I-G|V|)^{-1} G |eta|||_inf
};
TailBoundReport corollary32_bound(const Potential& v, const Potential& eta,
                                  double delta, double u, double t,
                                  const GreenTable& G);

}  // namespace rilab
