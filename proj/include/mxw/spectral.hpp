#pragma once

#include <cstdint>

#include "mxw/kernels.hpp"
#include "mxw/multiplier.hpp"

namespace mxw {

// Lattice coefficients use the continuum convention
//   f^_k = h^d sum_j f(x_j) exp(-i xi_k . x_j),   f(x_j) = V^{-1} sum_k f^_k exp(i xi_k . x_j),
// so that sum_j |f_j|^2 h^d = V^{-1} sum_k |f^_k|^2.
Field to_spectrum(const Field& f);
Field from_spectrum(const Field& coeffs);

Field apply_symbol(const Field& f, const SymbolFn& fn, const SymbolMatrix& zero, Exec exec = Exec::parallel);

Field solve(cd omega, const Field& J, const Material2& mat);
Field solve(cd omega, const Field& J, const Material3& mat);

Field forward_operator(cd omega, const Field& u, const Material2& mat);
Field forward_operator(cd omega, const Field& u, const Material3& mat);

// Multiplies a scalar field by xi_i / ||xi||_flavor (i is 0-based); mean -> 0.
Field riesz(const Field& f, int i, const NormFlavor& flavor);

// Euclidean Helmholtz projection of each vector triple (the first pair in 2D).
Field leray_project(const Field& J);

Field fractional_laplacian(const Field& f, double s);

struct Charges {
  Field rho_e;
  Field rho_m;
};
Charges divergence_and_charges(const Field& J);

// (e_pm f)^ = f^ / (omega pm ||xi||_flavor)
Field half_laplacian_resolvent(const Field& f, cd omega, int sign, const NormFlavor& flavor);

// Discrete L^p norm: (h^d sum |f|^p)^{1/p}; p = infinity gives the max.
// Vector fields use the pointwise Euclidean magnitude.
double lebesgue_norm(const Field& f, double p);

// Random field with coefficients supported on |k_a| <= kmax on every axis.
Field random_band_limited(const Grid& g, int ncomp, std::uint64_t seed, int kmax = -1);

// Scalar multiplier helper used by several modules.
Field apply_scalar_multiplier(const Field& f, const std::function<cd(const Wavevector&)>& fn, cd zero_value);

}  // namespace mxw
