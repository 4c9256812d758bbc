#include "mxw/kernels.hpp"

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mxw {

void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

namespace {

bool multiply_one(const Grid& g, int ncomp, cd* coeffs, std::size_t p, const SymbolFn& fn, const SymbolMatrix& zero) {
  const std::size_t np = g.points();
  const SymbolMatrix m = p == 0 ? zero : fn(g.wavevector_at(p));
  if (!m.allFinite()) return false;
  CVec v(ncomp);
  for (int c = 0; c < ncomp; ++c) v[c] = coeffs[c * np + p];
  const CVec r = m * v;
  for (int c = 0; c < ncomp; ++c) coeffs[c * np + p] = r[c];
  return true;
}

// Per-axis phase tables exp(s i x_j xi_a) for one node.
void phases(const Grid& g, const double* xi, double s, cd* tab) {
  for (int a = 0; a < g.dim; ++a) {
    const double h = g.spacing(a);
    for (int j = 0; j < g.n; ++j) tab[a * g.n + j] = std::polar(1.0, s * j * h * xi[a]);
  }
}

void analysis_node(const Field& f, const double* xi, cd* out, std::vector<cd>& tab) {
  const Grid& g = f.grid;
  const int n = g.n;
  phases(g, xi, -1.0, tab.data());
  const double vol = g.cell_volume();
  const std::size_t np = g.points();
  for (int c = 0; c < f.ncomp; ++c) {
    const cd* fc = f.data.data() + c * np;
    cd acc = 0.0;
    if (g.dim == 2) {
      for (int j1 = 0; j1 < n; ++j1) {
        cd row = 0.0;
        const cd* fr = fc + static_cast<std::size_t>(j1) * n;
        for (int j2 = 0; j2 < n; ++j2) row += fr[j2] * tab[n + j2];
        acc += row * tab[j1];
      }
    } else {
      for (int j1 = 0; j1 < n; ++j1) {
        cd plane = 0.0;
        for (int j2 = 0; j2 < n; ++j2) {
          cd row = 0.0;
          const cd* fr = fc + (static_cast<std::size_t>(j1) * n + j2) * n;
          for (int j3 = 0; j3 < n; ++j3) row += fr[j3] * tab[2 * n + j3];
          plane += row * tab[n + j2];
        }
        acc += plane * tab[j1];
      }
    }
    out[c] = acc * vol;
  }
}

// Direct evaluation of exp(s i x_j . xi) at every grid point; the serial reference.
void naive_analysis_node(const Field& f, const double* xi, cd* out) {
  const Grid& g = f.grid;
  const std::size_t np = g.points();
  for (int c = 0; c < f.ncomp; ++c) out[c] = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    int idx[3];
    g.unflatten(p, idx);
    double phase = 0.0;
    for (int a = 0; a < g.dim; ++a) phase += idx[a] * g.spacing(a) * xi[a];
    const cd e = std::polar(1.0, -phase);
    for (int c = 0; c < f.ncomp; ++c) out[c] += f.data[c * np + p] * e;
  }
  for (int c = 0; c < f.ncomp; ++c) out[c] *= g.cell_volume();
}

}  // namespace

bool multiply_symbol_lattice(const Grid& g, int ncomp, cd* coeffs, const SymbolFn& fn, const SymbolMatrix& zero,
                             Exec exec) {
  const long long np = static_cast<long long>(g.points());
  bool ok = true;
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) reduction(&& : ok)
    for (long long p = 0; p < np; ++p) ok = multiply_one(g, ncomp, coeffs, static_cast<std::size_t>(p), fn, zero) && ok;
  } else {
    for (long long p = 0; p < np; ++p) ok = multiply_one(g, ncomp, coeffs, static_cast<std::size_t>(p), fn, zero) && ok;
  }
  return ok;
}

void nonuniform_analysis(const Field& f, const double* nodes, std::size_t nq, cd* out, Exec exec) {
  const int d = f.grid.dim;
  const long long nql = static_cast<long long>(nq);
  if (exec == Exec::parallel) {
#pragma omp parallel
    {
      std::vector<cd> tab(3 * f.grid.n);
#pragma omp for schedule(static)
      for (long long q = 0; q < nql; ++q) analysis_node(f, nodes + q * d, out + q * f.ncomp, tab);
    }
  } else {
    for (long long q = 0; q < nql; ++q) naive_analysis_node(f, nodes + q * d, out + q * f.ncomp);
  }
}

void nonuniform_synthesis(const Grid& g, int ncomp, const double* nodes, const cd* coef, std::size_t nq, cd* out,
                          Exec exec) {
  const int n = g.n, d = g.dim;
  const std::size_t np = g.points();
  if (exec == Exec::serial) {
    for (std::size_t p = 0; p < np; ++p) {
      int idx[3];
      g.unflatten(p, idx);
      for (std::size_t q = 0; q < nq; ++q) {
        double phase = 0.0;
        for (int a = 0; a < d; ++a) phase += idx[a] * g.spacing(a) * nodes[q * d + a];
        const cd e = std::polar(1.0, phase);
        for (int c = 0; c < ncomp; ++c) out[c * np + p] += coef[q * ncomp + c] * e;
      }
    }
    return;
  }
  std::vector<cd> tab(nq * d * n);
  for (std::size_t q = 0; q < nq; ++q) phases(g, nodes + q * d, 1.0, tab.data() + q * d * n);

  // Rows along the first axis are disjoint, so they can be split across threads.
  auto row = [&](int j1) {
    std::vector<cd> w(ncomp);
    for (std::size_t q = 0; q < nq; ++q) {
      const cd* t = tab.data() + q * d * n;
      for (int c = 0; c < ncomp; ++c) w[c] = coef[q * ncomp + c] * t[j1];
      if (d == 2) {
        for (int c = 0; c < ncomp; ++c) {
          cd* o = out + c * np + static_cast<std::size_t>(j1) * n;
          const cd wc = w[c];
          for (int j2 = 0; j2 < n; ++j2) o[j2] += wc * t[n + j2];
        }
      } else {
        for (int j2 = 0; j2 < n; ++j2) {
          const cd t2 = t[n + j2];
          for (int c = 0; c < ncomp; ++c) {
            cd* o = out + c * np + (static_cast<std::size_t>(j1) * n + j2) * n;
            const cd wc = w[c] * t2;
            for (int j3 = 0; j3 < n; ++j3) o[j3] += wc * t[2 * n + j3];
          }
        }
      }
    }
  };
#pragma omp parallel for schedule(static)
  for (int j1 = 0; j1 < n; ++j1) row(j1);
}

}  // namespace mxw
