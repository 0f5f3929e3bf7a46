#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "rilab/point.hpp"

namespace rilab {

// Finitely supported (or windowed) real function on the lattice.
using SiteMap = std::unordered_map<LatticePoint, double, PointHash>;

inline double site_get(const SiteMap& m, const LatticePoint& p) {
  auto it = m.find(p);
  return it == m.end() ? 0.0 : it->second;
}

// Leading constant of g(x) ~ C_d / |x|^{d-2}.
double green_asymptotic_constant(int d);

// Green function of the continuous-time unit-rate simple random walk,
// g(x) = int_0^infty P_t(0,x) dt. Values are tabulated for |x|_inf <= radius
// and extended by the power-law asymptotic beyond.
class GreenTable {
 public:
  enum class Method { kQuadrature, kTruncatedSolve };

  // Spectral construction: g(x) = int_0^infty prod_i e^{-t/d} I_{x_i}(t/d) dt,
  // the exact 1D reduction of the torus integral. Absolute accuracy ~1e-12.
  static GreenTable build(int d, int radius, double tol = 1e-10,
                          const std::string& cache_dir = "");
  // Secondary route: lattice Dirichlet solve of -Delta g = delta_0 on
  // B(0, solve_radius) with power-law boundary data (conjugate gradients).
  // Boundary truncation dominates the error: O(solve_radius^-2) relative.
  static GreenTable truncated_solve(int d, int radius, int solve_radius,
                                    double cg_tol = 1e-12);

  int dim() const { return d_; }
  int radius() const { return radius_; }
  double tol() const { return tol_; }
  Method method() const { return method_; }
  int asymptotic_radius() const { return radius_; }

  // Tabulated value; throws if |x|_inf > radius.
  double at(const LatticePoint& x) const;
  // Table value inside, C_d/|x|^{d-2} beyond (relative error O(|x|^-2)).
  double extended(const LatticePoint& x) const;
  double origin() const { return values_[0]; }

  bool in_range(const LatticePoint& x) const { return x.linf() <= radius_; }

 private:
  GreenTable() = default;
  void index_canonicals();
  size_t canonical_index(const LatticePoint& x) const;

  int d_ = 3;
  int radius_ = 0;
  double tol_ = 1e-10;
  Method method_ = Method::kQuadrature;
  double cd_ = 0;
  std::vector<double> values_;  // indexed by canonical (sorted |coords|) rank
  std::unordered_map<LatticePoint, size_t, PointHash> index_;
};

// Single-point evaluation through the same spectral integral.
double green_value(int d, const LatticePoint& x);

// (G(V f))(x) = sum_y g(x-y) V(y) f(y). With strict=true all differences must
// lie inside the table radius; otherwise the asymptotic extension is used.
double apply_G_at(const GreenTable& g, const SiteMap& V, const SiteMap& f,
                  const LatticePoint& x, bool strict = true);
SiteMap apply_G_on(const GreenTable& g, const SiteMap& V, const SiteMap& f,
                   const std::vector<LatticePoint>& where, bool strict = true);

}  // namespace rilab
