#include "mxw/spectral.hpp"

#include <cmath>
#include <mutex>
#include <random>

#include <fftw3.h>

namespace mxw {

namespace {

std::mutex planner_mutex;

void transform(Field& f, int direction) {
  const Grid& g = f.grid;
  int dims[3] = {g.n, g.n, g.n};
  const int total = static_cast<int>(g.points());
  auto* data = reinterpret_cast<fftw_complex*>(f.data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_many_dft(g.dim, dims, f.ncomp, data, nullptr, 1, total, data, nullptr, 1, total, direction,
                              FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
}

std::size_t zero_index() { return 0; }

}  // namespace

Field to_spectrum(const Field& f) {
  Field out = f;
  transform(out, FFTW_FORWARD);
  const double h = f.grid.cell_volume();
  for (auto& v : out.data) v *= h;
  return out;
}

Field from_spectrum(const Field& coeffs) {
  Field out = coeffs;
  transform(out, FFTW_BACKWARD);
  const double s = 1.0 / coeffs.grid.box_volume();
  for (auto& v : out.data) v *= s;
  return out;
}

Field apply_symbol(const Field& f, const SymbolFn& fn, const SymbolMatrix& zero, Exec exec) {
  if (zero.rows() != f.ncomp || zero.cols() != f.ncomp)
    throw Error(ErrorKind::InvalidArgument, "zero-frequency matrix has the wrong size");
  Field c = to_spectrum(f);
  if (!multiply_symbol_lattice(f.grid, f.ncomp, c.data.data(), fn, zero, exec))
    throw Error(ErrorKind::NonFiniteSymbol, "symbol has a non-finite entry on the lattice");
  return from_spectrum(c);
}

static void require_complex_frequency(cd omega) {
  if (omega.imag() == 0.0)
    throw Error(ErrorKind::RealFrequency, "solve needs Im omega != 0; use the lap module for real omega");
}

static void require_shape(const Field& J, int dim) {
  if (J.grid.dim != dim || J.ncomp != ncomp_for_dim(dim))
    throw Error(ErrorKind::InvalidArgument, "field shape does not match the material dimension");
}

Field solve(cd omega, const Field& J, const Material2& mat) {
  require_complex_frequency(omega);
  require_shape(J, 2);
  const SymbolMatrix zero = SymbolMatrix::Identity(3, 3) / (I * omega);
  return apply_symbol(J, [&](const Wavevector& xi) { return inverse_symbol(omega, xi, mat); }, zero);
}

Field solve(cd omega, const Field& J, const Material3& mat) {
  require_complex_frequency(omega);
  require_shape(J, 3);
  const Canonicalized c = canonicalize(mat, J);
  const SymbolMatrix zero = SymbolMatrix::Identity(6, 6) / (I * omega);
  const Material3 cm = c.material;
  const Field u = apply_symbol(c.currents, [&](const Wavevector& xi) { return inverse_symbol(omega, xi, cm); }, zero);
  return c.record.from_canonical(u);
}

Field forward_operator(cd omega, const Field& u, const Material2& mat) {
  require_shape(u, 2);
  return apply_symbol(u, [&](const Wavevector& xi) { return symbol_p(omega, xi, mat); },
                      SymbolMatrix::Identity(3, 3) * (I * omega));
}

Field forward_operator(cd omega, const Field& u, const Material3& mat) {
  require_shape(u, 3);
  return apply_symbol(u, [&](const Wavevector& xi) { return symbol_p(omega, xi, mat); },
                      SymbolMatrix::Identity(6, 6) * (I * omega));
}

Field apply_scalar_multiplier(const Field& f, const std::function<cd(const Wavevector&)>& fn, cd zero_value) {
  Field c = to_spectrum(f);
  const std::size_t np = f.points();
  for (std::size_t p = 0; p < np; ++p) {
    const cd m = p == zero_index() ? zero_value : fn(f.grid.wavevector_at(p));
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
      throw Error(ErrorKind::NonFiniteSymbol, "scalar multiplier is not finite on the lattice");
    for (int k = 0; k < f.ncomp; ++k) c.at(k, p) *= m;
  }
  return from_spectrum(c);
}

Field riesz(const Field& f, int i, const NormFlavor& flavor) {
  if (i < 0 || i >= f.grid.dim) throw Error(ErrorKind::InvalidArgument, "Riesz index out of range");
  return apply_scalar_multiplier(f, [&](const Wavevector& xi) { return cd(xi[i] / flavor(xi)); }, 0.0);
}

Field leray_project(const Field& J) {
  const int d = J.grid.dim;
  const int triples = d == 2 ? 1 : 2;
  Field c = to_spectrum(J);
  const std::size_t np = J.points();
  for (std::size_t p = 1; p < np; ++p) {
    const Wavevector xi = J.grid.wavevector_at(p);
    const double n2 = xi.squaredNorm();
    for (int t = 0; t < triples; ++t) {
      cd dot = 0.0;
      for (int a = 0; a < d; ++a) dot += xi[a] * c.at(3 * t + a, p);
      for (int a = 0; a < d; ++a) c.at(3 * t + a, p) -= xi[a] * dot / n2;
    }
  }
  return from_spectrum(c);
}

Field fractional_laplacian(const Field& f, double s) {
  if (s < 0.0) {
    const Field c = to_spectrum(f);
    const double mean = std::abs(c.data[0]) / f.grid.box_volume();
    if (mean > 1e-12 * std::max(1.0, max_abs(f)))
      throw Error(ErrorKind::MeanNotZero, "negative powers need a mean-zero field");
  }
  return apply_scalar_multiplier(f, [&](const Wavevector& xi) { return cd(std::pow(xi.norm(), s)); }, 0.0);
}

Charges divergence_and_charges(const Field& J) {
  const int d = J.grid.dim;
  Field c = to_spectrum(J);
  Field re(J.grid, 1), rm(J.grid, 1);
  const std::size_t np = J.points();
  for (std::size_t p = 1; p < np; ++p) {
    const Wavevector xi = J.grid.wavevector_at(p);
    cd e = 0.0, m = 0.0;
    for (int a = 0; a < d; ++a) {
      e += I * xi[a] * c.at(a, p);
      if (d == 3) m += I * xi[a] * c.at(3 + a, p);
    }
    re.data[p] = e;
    rm.data[p] = m;
  }
  return {from_spectrum(re), from_spectrum(rm)};
}

Field half_laplacian_resolvent(const Field& f, cd omega, int sign, const NormFlavor& flavor) {
  if (omega.imag() == 0.0) throw Error(ErrorKind::RealFrequency, "e_pm needs Im omega != 0");
  if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidArgument, "sign must be +1 or -1");
  return apply_scalar_multiplier(
      f, [&](const Wavevector& xi) { return 1.0 / (omega + double(sign) * flavor(xi)); }, 1.0 / omega);
}

double lebesgue_norm(const Field& f, double p) {
  const std::size_t np = f.points();
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
      double s = 0.0;
      for (int c = 0; c < f.ncomp; ++c) s += std::norm(f.at(c, k));
      m = std::max(m, std::sqrt(s));
    }
    return m;
  }
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "Lebesgue exponent must be >= 1");
  double acc = 0.0;
  for (std::size_t k = 0; k < np; ++k) {
    double s = 0.0;
    for (int c = 0; c < f.ncomp; ++c) s += std::norm(f.at(c, k));
    acc += std::pow(std::sqrt(s), p);
  }
  return std::pow(acc * f.grid.cell_volume(), 1.0 / p);
}

Field random_band_limited(const Grid& g, int ncomp, std::uint64_t seed, int kmax) {
  if (kmax < 0) kmax = g.n / 4;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Field c(g, ncomp);
  const std::size_t np = g.points();
  for (int k = 0; k < ncomp; ++k)
    for (std::size_t p = 0; p < np; ++p) {
      int idx[3];
      g.unflatten(p, idx);
      bool inside = true;
      for (int a = 0; a < g.dim; ++a) inside = inside && std::abs(g.mode(idx[a])) <= kmax;
      const double re = nd(rng), im = nd(rng);
      if (inside) c.at(k, p) = cd(re, im) * g.box_volume();
    }
  return from_spectrum(c);
}

}  // namespace mxw
