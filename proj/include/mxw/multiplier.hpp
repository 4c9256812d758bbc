#pragma once

#include <vector>

#include "mxw/symbol.hpp"

namespace mxw {

struct Scalars2 {
  cd A, B;
};
struct Scalars3 {
  cd A, B, C, D;
};

// A = 1/(i(omega - r)), B = 1/(i(omega + r)) with r = ||xi||_eps'.
Scalars2 scalar_resolvents(cd omega, const Wavevector& xi, const Material2& mat);
// A,B use sqrt(b)|xi|, C,D use ||xi||_eps.
Scalars3 scalar_resolvents(cd omega, const Wavevector& xi, const Material3& mat);

// Test-harness hook: negates one entry (0-based) of the M^3 display.
struct EntryMutation {
  int row = -1;
  int col = -1;
  bool active() const { return row >= 0 && col >= 0; }
};

SymbolMatrix m2_display(const Scalars2& s, const Wavevector& xi, const Material2& mat);
SymbolMatrix m2c_display(cd omega, const Wavevector& xi, const Material2& mat);
SymbolMatrix m3_display(const Scalars3& s, const Wavevector& xi, const Material3& mat, EntryMutation mut = {});
SymbolMatrix m3c_display(cd omega, const Wavevector& xi, const Material3& mat);

SymbolMatrix resolvent_matrix_2d(cd omega, const Wavevector& xi, const Material2& mat);
SymbolMatrix resolvent_matrix_3d(cd omega, const Wavevector& xi, const Material3& mat, EntryMutation mut = {});
// Direct 6x6 LU inverse of p; used on the axis and as the oracle.
SymbolMatrix resolvent_matrix_3d_lu(cd omega, const Wavevector& xi, const Material3& mat);

// p^{-1} for any xi, with xi = 0 -> (i omega)^{-1} I and the axis fallback.
// Accepts real omega; the caller is responsible for staying off the spheres.
SymbolMatrix inverse_symbol(cd omega, const Wavevector& xi, const Material2& mat);
SymbolMatrix inverse_symbol(cd omega, const Wavevector& xi, const Material3& mat);

std::array<cd, 3> charge_column_2d(cd omega, const Wavevector& xi, const Material2& mat, const std::array<cd, 3>& j_hat);
std::array<cd, 6> charge_column_3d(cd omega, const Wavevector& xi, const Material3& mat, const std::array<cd, 6>& j_hat);

// Linear structure of the inverse symbol: M = sum_k s_k W_k + Wc/(i omega),
// with s = (A,B) or (A,B,C,D). Each W depends on the direction only.
struct InverseSymbolParts {
  std::vector<SymbolMatrix> w;
  SymbolMatrix wc;
};
InverseSymbolParts inverse_symbol_parts(const Wavevector& xi, const Material2& mat);
InverseSymbolParts inverse_symbol_parts(const Wavevector& xi, const Material3& mat);

// Quadratic form G with ||xi||_G = sqrt(xi^T G xi) for each scalar index.
RMat scalar_norm_matrix(int scalar, const Material2& mat);
RMat scalar_norm_matrix(int scalar, const Material3& mat);

struct SingularTerm {
  int scalar = 0;          // index into InverseSymbolParts::w
  double orientation = 1;  // scalar = 1/(i(omega - orientation * r))
  SymbolMatrix pv_weight;  // coefficient of the p.v. scalar 1/(i(omega - orientation*r))
  SymbolMatrix surface_weight;  // coefficient of delta(r - |omega|)
  double singular_radius = 0;   // |omega|, in the norm given by norm_matrix
  RMat norm_matrix;
};

struct MultiplierSplit {
  SymbolMatrix regular;
  std::vector<SingularTerm> terms;
};

// Scalar indices that become singular at real omega: A (and C) for omega > 0,
// B (and D) for omega < 0.
std::vector<int> singular_scalars(double omega, int dim);

MultiplierSplit sokhotsky_split(double omega, const Wavevector& xi, const Material2& mat, int sign);
MultiplierSplit sokhotsky_split(double omega, const Wavevector& xi, const Material3& mat, int sign);

}  // namespace mxw
