#pragma once

#include <cstddef>
#include <functional>

#include "mxw/field.hpp"
#include "mxw/symbol.hpp"

namespace mxw {

// `serial` runs the straightforward reference loops (direct sums for the
// off-grid transforms); `parallel` runs the OpenMP kernels.
enum class Exec { parallel, serial };

using SymbolFn = std::function<SymbolMatrix(const Wavevector&)>;

// In-place multiplication of lattice coefficients by M(xi); the zero
// frequency uses `zero`. Returns false if some entry was not finite.
bool multiply_symbol_lattice(const Grid& g, int ncomp, cd* coeffs, const SymbolFn& fn, const SymbolMatrix& zero,
                             Exec exec);

// Semidiscrete transform at off-grid nodes:
//   out[q*ncomp + c] = h^d sum_j f_c(x_j) exp(-i x_j . xi_q)
// `nodes` holds dim doubles per node.
void nonuniform_analysis(const Field& f, const double* nodes, std::size_t nq, cd* out, Exec exec);

// Accumulate u_c(x_j) += sum_q coef[q*ncomp + c] exp(i x_j . xi_q) on the grid.
void nonuniform_synthesis(const Grid& g, int ncomp, const double* nodes, const cd* coef, std::size_t nq, cd* out,
                          Exec exec);

void set_thread_count(int threads);

}  // namespace mxw
