#pragma once

#include <array>
#include <cmath>

#include "mxw/core.hpp"
#include "mxw/field.hpp"

namespace mxw {

// Symmetric positive definite 2x2 permittivity and scalar permeability.
class Material2 {
 public:
  Material2(double eps11, double eps12, double eps22, double mu);
  static Material2 identity() { return Material2(1.0, 0.0, 1.0, 1.0); }

  double eps11() const { return e11_; }
  double eps12() const { return e12_; }
  double eps22() const { return e22_; }
  double mu() const { return mu_; }
  double det_eps() const { return e11_ * e22_ - e12_ * e12_; }
  // Entries of eps^{-1}; these are the eps_ij appearing in the symbol.
  double inv11() const { return i11_; }
  double inv12() const { return i12_; }
  double inv22() const { return i22_; }

 private:
  double e11_, e12_, e22_, mu_;
  double i11_, i12_, i22_;
};

// Diagonal 3D permittivity with a distinguished axis:
// eps = eps_axis on `axis` (1-based), eps_perp on the other two.
struct Material3 {
  double eps_axis = 1.0;
  double eps_perp = 1.0;
  int axis = 1;
  double mu = 1.0;

  Material3() = default;
  Material3(double eps_axis, double eps_perp, int axis = 1, double mu = 1.0);
  // Canonical material with eps^{-1} = diag(a, b, b), mu = 1.
  static Material3 from_ab(double a, double b) { return Material3(1.0 / a, 1.0 / b, 1, 1.0); }

  double a() const { return 1.0 / eps_axis; }
  double b() const { return 1.0 / eps_perp; }
  bool canonical() const { return axis == 1 && mu == 1.0; }
  std::array<double, 3> eps_diagonal() const;
};

// Builds a Material3 from a general diagonal; throws NotPartiallyAnisotropic
// when the three entries are pairwise distinct.
Material3 material3_from_diagonal(std::array<double, 3> eps, double mu);

double norm_eps_prime(const Wavevector& xi, const Material2& mat);

// ||xi||_G = sqrt(xi^T G xi) for a symmetric positive definite G.
struct NormFlavor {
  RMat g;

  double operator()(const Wavevector& xi) const { return std::sqrt(xi.dot(g * xi)); }
  int dim() const { return static_cast<int>(g.rows()); }
  static NormFlavor euclidean(int dim, double scale = 1.0);
  static NormFlavor eps_prime(const Material2& mat);
  // ||xi||_eps of a canonical Material3.
  static NormFlavor eps_tilde(const Material3& mat);
};
double norm_eps(const Wavevector& xi, const Material3& mat);

SymbolMatrix symbol_p(cd omega, const Wavevector& xi, const Material2& mat);
SymbolMatrix symbol_p(cd omega, const Wavevector& xi, const Material3& mat);

struct EigenDecomposition {
  SymbolMatrix m;
  SymbolMatrix d;
  SymbolMatrix m_inv;
};

// Off-axis guard for the 3D closed forms: xi_2^2 + xi_3^2 >= eta |xi|^2.
constexpr double axis_guard_eta = 1e-8;
bool off_axis(const Wavevector& xi, double eta = axis_guard_eta);

EigenDecomposition eigen_decomposition(cd omega, const Wavevector& xi, const Material2& mat);
// Returns the renormalized pair (m~, m~^{-1}); requires a canonical material.
EigenDecomposition eigen_decomposition(cd omega, const Wavevector& xi, const Material3& mat);

// Unnormalized 3D eigenvector matrix (columns v1..v6).
SymbolMatrix eigenvectors_3d_raw(const Wavevector& xi, const Material3& mat);

struct DetDiagnostics {
  double alpha;
  double delta;
  cd det_m;
  cd det_m_tilde;
};
DetDiagnostics det_diagnostics(const Wavevector& xi, const Material3& mat);

// Cyclic relabelling of axes plus removal of mu. Applying `to_canonical`
// to currents and `from_canonical` to the solution undoes the change.
struct TransformRecord {
  int axis = 1;
  double mu = 1.0;

  Field to_canonical(const Field& currents) const;
  Field from_canonical(const Field& fields) const;
  Grid canonical_grid(const Grid& g) const;
};

struct Canonicalized {
  Material3 material;
  Field currents;
  TransformRecord record;
};

Canonicalized canonicalize(const Material3& mat, const Field& currents);
Canonicalized canonicalize(std::array<double, 3> eps, double mu, const Field& currents);

}  // namespace mxw
