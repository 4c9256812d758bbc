#include "mxw/symbol.hpp"

#include <cmath>
#include <string>

namespace mxw {

Material2::Material2(double eps11, double eps12, double eps22, double mu)
    : e11_(eps11), e12_(eps12), e22_(eps22), mu_(mu) {
  if (!std::isfinite(eps11) || !std::isfinite(eps12) || !std::isfinite(eps22) || !std::isfinite(mu))
    throw Error(ErrorKind::InvalidMaterial, "material entries must be finite");
  if (!(eps11 > 0.0)) throw Error(ErrorKind::InvalidMaterial, "eps11 > 0 violated");
  const double det = eps11 * eps22 - eps12 * eps12;
  if (!(det > 0.0)) throw Error(ErrorKind::InvalidMaterial, "eps11*eps22 - eps12^2 > 0 violated");
  if (!(mu > 0.0)) throw Error(ErrorKind::InvalidMaterial, "mu > 0 violated");
  i11_ = eps22 / det;
  i12_ = -eps12 / det;
  i22_ = eps11 / det;
}

Material3::Material3(double ea, double ep, int ax, double m) : eps_axis(ea), eps_perp(ep), axis(ax), mu(m) {
  if (!(ea > 0.0) || !std::isfinite(ea)) throw Error(ErrorKind::InvalidMaterial, "eps_axis > 0 violated");
  if (!(ep > 0.0) || !std::isfinite(ep)) throw Error(ErrorKind::InvalidMaterial, "eps_perp > 0 violated");
  if (!(m > 0.0) || !std::isfinite(m)) throw Error(ErrorKind::InvalidMaterial, "mu > 0 violated");
  if (ax < 1 || ax > 3) throw Error(ErrorKind::InvalidMaterial, "axis must be 1, 2 or 3");
}

std::array<double, 3> Material3::eps_diagonal() const {
  std::array<double, 3> e{eps_perp, eps_perp, eps_perp};
  e[axis - 1] = eps_axis;
  return e;
}

Material3 material3_from_diagonal(std::array<double, 3> eps, double mu) {
  const bool e01 = eps[0] == eps[1], e02 = eps[0] == eps[2], e12 = eps[1] == eps[2];
  if (!e01 && !e02 && !e12)
    throw Error(ErrorKind::NotPartiallyAnisotropic, "all three permittivity values are pairwise distinct");
  if (e12) return Material3(eps[0], eps[1], 1, mu);
  if (e02) return Material3(eps[1], eps[0], 2, mu);
  return Material3(eps[2], eps[0], 3, mu);
}

double norm_eps_prime(const Wavevector& xi, const Material2& mat) {
  const double q = mat.eps11() * xi[0] * xi[0] + 2.0 * mat.eps12() * xi[0] * xi[1] + mat.eps22() * xi[1] * xi[1];
  return std::sqrt(q / (mat.mu() * mat.det_eps()));
}

NormFlavor NormFlavor::euclidean(int dim, double scale) {
  return {RMat::Identity(dim, dim) * scale};
}

NormFlavor NormFlavor::eps_prime(const Material2& mat) {
  RMat g(2, 2);
  const double f = 1.0 / (mat.mu() * mat.det_eps());
  g << mat.eps11() * f, mat.eps12() * f, mat.eps12() * f, mat.eps22() * f;
  return {g};
}

NormFlavor NormFlavor::eps_tilde(const Material3& mat) {
  if (!mat.canonical())
    throw Error(ErrorKind::InvalidArgument, "the eps norm is defined for a canonical material (axis=1, mu=1)");
  RMat g = RMat::Zero(3, 3);
  g(0, 0) = mat.b();
  g(1, 1) = g(2, 2) = mat.a();
  return {g};
}

double norm_eps(const Wavevector& xi, const Material3& mat) {
  return std::sqrt(mat.b() * xi[0] * xi[0] + mat.a() * (xi[1] * xi[1] + xi[2] * xi[2]));
}

SymbolMatrix symbol_p(cd omega, const Wavevector& xi, const Material2& mat) {
  const double x1 = xi[0], x2 = xi[1], mu = mat.mu();
  SymbolMatrix p(3, 3);
  p << omega, 0.0, -x2 / mu,
       0.0, omega, x1 / mu,
       x1 * mat.inv12() - x2 * mat.inv11(), x1 * mat.inv22() - x2 * mat.inv12(), omega;
  return I * p;
}

static Eigen::Matrix3d curl_symbol(const Wavevector& x) {
  // (curl u)^ = -i B(xi) u^
  Eigen::Matrix3d b;
  b << 0.0, x[2], -x[1],
       -x[2], 0.0, x[0],
       x[1], -x[0], 0.0;
  return b;
}

SymbolMatrix symbol_p(cd omega, const Wavevector& xi, const Material3& mat) {
  const auto e = mat.eps_diagonal();
  const Eigen::Matrix3d b = curl_symbol(xi);
  const Eigen::Matrix3d einv = Eigen::Vector3d(1.0 / e[0], 1.0 / e[1], 1.0 / e[2]).asDiagonal();
  SymbolMatrix p = SymbolMatrix::Zero(6, 6);
  for (int k = 0; k < 6; ++k) p(k, k) = I * omega;
  p.block(0, 3, 3, 3) = (I / mat.mu) * b.cast<cd>();
  p.block(3, 0, 3, 3) = -I * (b * einv).cast<cd>();
  return p;
}

bool off_axis(const Wavevector& xi, double eta) {
  const double s = xi[1] * xi[1] + xi[2] * xi[2];
  return s > 0.0 && s >= eta * xi.squaredNorm();
}

EigenDecomposition eigen_decomposition(cd omega, const Wavevector& xi, const Material2& mat) {
  const double r = norm_eps_prime(xi, mat);
  if (!(r > 0.0)) throw Error(ErrorKind::DegenerateDirection, "xi = 0 has no eigenvector basis");
  const double x1 = xi[0] / r, x2 = xi[1] / r, mu = mat.mu();
  const double e11 = mat.inv11(), e12 = mat.inv12(), e22 = mat.inv22();
  const double s = 1.0 / std::sqrt(2.0);
  const double t = std::sqrt(2.0) / 2.0;
  // Columns 2 and 3 carry unit normalization 1/sqrt(2) so that det m = -1.
  EigenDecomposition out;
  out.m.resize(3, 3);
  out.m << e22 * x1 - e12 * x2, -s * x2 / mu, s * x2 / mu,
           e11 * x2 - e12 * x1, s * x1 / mu, -s * x1 / mu,
           0.0, -s, -s;
  out.m_inv.resize(3, 3);
  out.m_inv << x1 / mu, x2 / mu, 0.0,
               t * (x1 * e12 - x2 * e11), t * (e22 * x1 - e12 * x2), -t,
               t * (x2 * e11 - x1 * e12), t * (x2 * e12 - x1 * e22), -t;
  out.d = SymbolMatrix::Zero(3, 3);
  out.d(0, 0) = I * omega;
  out.d(1, 1) = I * (omega - r);
  out.d(2, 2) = I * (omega + r);
  return out;
}

static void require_canonical(const Material3& mat) {
  if (!mat.canonical())
    throw Error(ErrorKind::InvalidArgument, "3D closed forms need a canonical material (axis=1, mu=1); call canonicalize");
}

SymbolMatrix eigenvectors_3d_raw(const Wavevector& xi, const Material3& mat) {
  require_canonical(mat);
  const double a = mat.a(), b = mat.b(), sb = std::sqrt(b);
  const double n = xi.norm(), ne = norm_eps(xi, mat);
  if (!(n > 0.0)) throw Error(ErrorKind::DegenerateDirection, "xi = 0 has no eigenvector basis");
  const double p1 = xi[0] / n, p2 = xi[1] / n, p3 = xi[2] / n;
  const double t1 = xi[0] / ne, t2 = xi[1] / ne, t3 = xi[2] / ne;
  const double s = p2 * p2 + p3 * p3, st = t2 * t2 + t3 * t3;
  SymbolMatrix m(6, 6);
  m << 0.0, t1 / a, 0.0, 0.0, st, -st,
       0.0, t2 / b, -p3 / sb, p3 / sb, -t1 * t2, t1 * t2,
       0.0, t3 / b, p2 / sb, -p2 / sb, -t1 * t3, t1 * t3,
       p1, 0.0, -s, -s, 0.0, 0.0,
       p2, 0.0, p1 * p2, p1 * p2, -t3, -t3,
       p3, 0.0, p1 * p3, p1 * p3, t2, t2;
  return m;
}

EigenDecomposition eigen_decomposition(cd omega, const Wavevector& xi, const Material3& mat) {
  require_canonical(mat);
  if (!off_axis(xi))
    throw Error(ErrorKind::DegenerateDirection, "xi lies within the axis guard; invert p numerically");
  const double a = mat.a(), b = mat.b(), sb = std::sqrt(b);
  const double n = xi.norm(), ne = norm_eps(xi, mat);
  const double p1 = xi[0] / n, p2 = xi[1] / n, p3 = xi[2] / n;
  const double t1 = xi[0] / ne, t2 = xi[1] / ne, t3 = xi[2] / ne;
  const double s = p2 * p2 + p3 * p3, st = t2 * t2 + t3 * t3;
  const double dl = n / ne;
  const double q = std::sqrt(dl * s), qt = std::sqrt(dl * st), r = std::sqrt(dl) / std::sqrt(st);
  const double rs = std::sqrt(s), rst = std::sqrt(st), sd = std::sqrt(dl);

  EigenDecomposition out;
  out.m.resize(6, 6);
  out.m << 0.0, t1 / a, 0.0, 0.0, qt, -qt,
           0.0, t2 / b, -p3 / (sb * q), p3 / (sb * q), -r * t1 * t2, r * t1 * t2,
           0.0, t3 / b, p2 / (sb * q), -p2 / (sb * q), -r * t1 * t3, r * t1 * t3,
           p1, 0.0, -rs / sd, -rs / sd, 0.0, 0.0,
           p2, 0.0, p1 * p2 / q, p1 * p2 / q, -r * t3, -r * t3,
           p3, 0.0, p1 * p3 / q, p1 * p3 / q, r * t2, r * t2;
  out.m_inv.resize(6, 6);
  out.m_inv << 0.0, 0.0, 0.0, p1, p2, p3,
               a * b * t1, a * b * t2, a * b * t3, 0.0, 0.0, 0.0,
               0.0, -sb * sd * t3 / (2 * rst), sb * sd * t2 / (2 * rst), -rst / (2 * sd), p1 * p2 * sd / (2 * rs), p1 * p3 * sd / (2 * rs),
               0.0, sb * sd * t3 / (2 * rst), -sb * sd * t2 / (2 * rst), -rst / (2 * sd), p1 * p2 * sd / (2 * rs), p1 * p3 * sd / (2 * rs),
               a * rst / (2 * sd), -b * t1 * t2 / (2 * sd * rst), -b * t1 * t3 / (2 * sd * rst), 0.0, -p3 / (2 * sd * rs), p2 / (2 * sd * rs),
               -a * rst / (2 * sd), b * t1 * t2 / (2 * sd * rst), b * t1 * t3 / (2 * sd * rst), 0.0, -p3 / (2 * sd * rs), p2 / (2 * sd * rs);
  out.d = SymbolMatrix::Zero(6, 6);
  out.d(0, 0) = I * omega;
  out.d(1, 1) = I * omega;
  out.d(2, 2) = I * (omega - sb * n);
  out.d(3, 3) = I * (omega + sb * n);
  out.d(4, 4) = I * (omega - ne);
  out.d(5, 5) = I * (omega + ne);
  return out;
}

DetDiagnostics det_diagnostics(const Wavevector& xi, const Material3& mat) {
  require_canonical(mat);
  const double n = xi.norm();
  if (!(n > 0.0)) throw Error(ErrorKind::InvalidArgument, "det_diagnostics needs xi != 0");
  const double ne = norm_eps(xi, mat);
  DetDiagnostics out;
  out.alpha = std::sqrt(xi[1] * xi[1] + xi[2] * xi[2]) / std::sqrt(n * ne);
  out.delta = n / ne;
  out.det_m = eigenvectors_3d_raw(xi, mat).determinant();
  out.det_m_tilde = off_axis(xi) ? eigen_decomposition(cd(0.0, 1.0), xi, mat).m.determinant() : cd(0.0);
  return out;
}

namespace {

Field rotate_axes(const Field& f, int k, bool inverse) {
  // forward: new axis m <- old axis (k+m)%3
  Grid g = f.grid;
  for (int m = 0; m < 3; ++m) {
    const int old = (k + m) % 3;
    if (!inverse) g.length[m] = f.grid.length[old];
    else g.length[old] = f.grid.length[m];
  }
  Field out(g, f.ncomp);
  const std::size_t np = f.points();
  for (std::size_t flat = 0; flat < np; ++flat) {
    int src[3], dst[3];
    f.grid.unflatten(flat, src);
    for (int m = 0; m < 3; ++m) {
      if (!inverse) dst[m] = src[(k + m) % 3];
      else dst[(k + m) % 3] = src[m];
    }
    const std::size_t to = g.flatten(dst);
    for (int t = 0; t < f.ncomp / 3; ++t)
      for (int c = 0; c < 3; ++c) {
        const int oc = (k + c) % 3;
        if (!inverse) out.at(3 * t + c, to) = f.at(3 * t + oc, flat);
        else out.at(3 * t + oc, to) = f.at(3 * t + c, flat);
      }
  }
  return out;
}

}  // namespace

Grid TransformRecord::canonical_grid(const Grid& g) const {
  Grid out = g;
  for (int m = 0; m < 3; ++m) out.length[m] = g.length[(axis - 1 + m) % 3];
  return out;
}

Field TransformRecord::to_canonical(const Field& currents) const {
  if (currents.grid.dim != 3 || currents.ncomp != 6)
    throw Error(ErrorKind::InvalidArgument, "canonicalize expects a 6-component 3D field");
  Field out = axis == 1 ? currents : rotate_axes(currents, axis - 1, false);
  for (int c = 3; c < 6; ++c)
    for (std::size_t p = 0; p < out.points(); ++p) out.at(c, p) /= mu;
  return out;
}

Field TransformRecord::from_canonical(const Field& fields) const {
  Field tmp = fields;
  for (int c = 3; c < 6; ++c)
    for (std::size_t p = 0; p < tmp.points(); ++p) tmp.at(c, p) *= mu;
  return axis == 1 ? tmp : rotate_axes(tmp, axis - 1, true);
}

Canonicalized canonicalize(const Material3& mat, const Field& currents) {
  TransformRecord rec{mat.axis, mat.mu};
  Canonicalized out{Material3(mat.mu * mat.eps_axis, mat.mu * mat.eps_perp, 1, 1.0), rec.to_canonical(currents), rec};
  return out;
}

Canonicalized canonicalize(std::array<double, 3> eps, double mu, const Field& currents) {
  return canonicalize(material3_from_diagonal(eps, mu), currents);
}

}  // namespace mxw
