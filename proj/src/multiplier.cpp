#include "mxw/multiplier.hpp"

#include <cmath>

namespace mxw {

namespace {

void require_complex(cd omega) {
  if (omega.imag() == 0.0) throw Error(ErrorKind::RealFrequency, "the unsplit inverse symbol needs Im omega != 0");
}

void require_nonzero(const Wavevector& xi) {
  if (xi.squaredNorm() == 0.0) throw Error(ErrorKind::InvalidArgument, "xi = 0 is handled by (i omega)^{-1} I");
}

}  // namespace

Scalars2 scalar_resolvents(cd omega, const Wavevector& xi, const Material2& mat) {
  const double r = norm_eps_prime(xi, mat);
  return {1.0 / (I * (omega - r)), 1.0 / (I * (omega + r))};
}

Scalars3 scalar_resolvents(cd omega, const Wavevector& xi, const Material3& mat) {
  const double r = std::sqrt(mat.b()) * xi.norm();
  const double re = norm_eps(xi, mat);
  return {1.0 / (I * (omega - r)), 1.0 / (I * (omega + r)), 1.0 / (I * (omega - re)), 1.0 / (I * (omega + re))};
}

SymbolMatrix m2_display(const Scalars2& sc, const Wavevector& xi, const Material2& mat) {
  const double r = norm_eps_prime(xi, mat);
  const double x1 = xi[0] / r, x2 = xi[1] / r, mu = mat.mu();
  const double e11 = mat.inv11(), e12 = mat.inv12(), e22 = mat.inv22();
  const cd A = sc.A, B = sc.B;
  SymbolMatrix m(3, 3);
  m << (A + B) / (2 * mu) * (x2 * x2 * e11 - x1 * x2 * e12), (A + B) / (2 * mu) * (x2 * x2 * e12 - x1 * x2 * e22), x2 * (A - B) / (2 * mu),
       (A + B) / (2 * mu) * (x1 * x1 * e12 - x1 * x2 * e11), (A + B) / (2 * mu) * (x1 * x1 * e22 - e12 * x1 * x2), x1 * (B - A) / (2 * mu),
       (A - B) / 2.0 * (x2 * e11 - x1 * e12), (B - A) / 2.0 * (x1 * e22 - x2 * e12), (A + B) / 2.0;
  return m;
}

SymbolMatrix m2c_display(cd omega, const Wavevector& xi, const Material2& mat) {
  const double r = norm_eps_prime(xi, mat);
  const double x1 = xi[0] / r, x2 = xi[1] / r;
  const double e11 = mat.inv11(), e12 = mat.inv12(), e22 = mat.inv22();
  SymbolMatrix m(3, 3);
  m << e22 * x1 * x1 - e12 * x1 * x2, e22 * x1 * x2 - e12 * x2 * x2, 0.0,
       e11 * x1 * x2 - e12 * x1 * x1, e11 * x2 * x2 - e12 * x1 * x2, 0.0,
       0.0, 0.0, 0.0;
  return m / (I * omega * mat.mu());
}

SymbolMatrix m3_display(const Scalars3& sc, const Wavevector& xi, const Material3& mat, EntryMutation mut) {
  const double a = mat.a(), b = mat.b(), sb = std::sqrt(b);
  const double n = xi.norm(), ne = norm_eps(xi, mat);
  const double x1 = xi[0], x2 = xi[1], x3 = xi[2];
  const double p1 = x1 / n, p2 = x2 / n, p3 = x3 / n;
  const double t1 = x1 / ne, t2 = x2 / ne, t3 = x3 / ne;
  const double s = x2 * x2 + x3 * x3;
  const double st = t2 * t2 + t3 * t3;
  const cd A = sc.A, B = sc.B, C = sc.C, D = sc.D;
  SymbolMatrix m(6, 6);
  m(0, 0) = a * (C + D) * st / 2.0;
  m(0, 1) = -b * (C + D) * t1 * t2 / 2.0;
  m(0, 2) = -b * (C + D) * t1 * t3 / 2.0;
  m(0, 3) = 0.0;
  m(0, 4) = (D - C) * t3 / 2.0;
  m(0, 5) = (C - D) * t2 / 2.0;

  m(1, 0) = -a * (C + D) * t1 * t2 / 2.0;
  m(1, 1) = (A + B) * x3 * x3 / (2 * s) + b * (C + D) * t1 * t1 * x2 * x2 / (2 * s);
  m(1, 2) = -(A + B) * x2 * x3 / (2 * s) + b * (C + D) * t1 * t1 * x2 * x3 / (2 * s);
  // The published entry has (A+B) here; see FORMULA_NOTES.md.
  m(1, 3) = (A - B) * p3 / (2 * sb);
  m(1, 4) = (B - A) * p1 * x2 * x3 / (2 * sb * s) + (C - D) * t1 * x2 * x3 / (2 * s);
  m(1, 5) = (B - A) * p1 * x3 * x3 / (2 * sb * s) + (D - C) * t1 * x2 * x2 / (2 * s);

  m(2, 0) = -a * (C + D) * t1 * t3 / 2.0;
  m(2, 1) = -(A + B) * x2 * x3 / (2 * s) + b * (C + D) * t1 * t1 * x2 * x3 / (2 * s);
  m(2, 2) = (A + B) * x2 * x2 / (2 * s) + b * (C + D) * t1 * t1 * x3 * x3 / (2 * s);
  m(2, 3) = (B - A) * p2 / (2 * sb);
  m(2, 4) = (A - B) * p1 * x2 * x2 / (2 * sb * s) + (C - D) * t1 * x3 * x3 / (2 * s);
  m(2, 5) = (A - B) * p1 * x2 * x3 / (2 * sb * s) + (D - C) * t1 * x2 * x3 / (2 * s);

  m(3, 0) = 0.0;
  m(3, 1) = sb * (A - B) * p3 / 2.0;
  m(3, 2) = sb * (B - A) * p2 / 2.0;
  m(3, 3) = (A + B) * (p2 * p2 + p3 * p3) / 2.0;
  m(3, 4) = -(A + B) * p1 * p2 / 2.0;
  m(3, 5) = -(A + B) * p1 * p3 / 2.0;

  m(4, 0) = a * (D - C) * t3 / 2.0;
  m(4, 1) = sb * (B - A) * p1 * x2 * x3 / (2 * s) + b * (C - D) * t1 * x2 * x3 / (2 * s);
  m(4, 2) = sb * (A - B) * p1 * x2 * x2 / (2 * s) + b * (C - D) * t1 * x3 * x3 / (2 * s);
  m(4, 3) = -(A + B) * p1 * p2 / 2.0;
  m(4, 4) = (A + B) * p1 * p1 * x2 * x2 / (2 * s) + (C + D) * x3 * x3 / (2 * s);
  m(4, 5) = (A + B) * p1 * p1 * x2 * x3 / (2 * s) - (C + D) * x2 * x3 / (2 * s);

  m(5, 0) = a * (C - D) * t2 / 2.0;
  m(5, 1) = sb * (B - A) * p1 * x3 * x3 / (2 * s) + b * (D - C) * t1 * x2 * x2 / (2 * s);
  m(5, 2) = sb * (A - B) * p1 * x2 * x3 / (2 * s) + b * (D - C) * t1 * x2 * x3 / (2 * s);
  m(5, 3) = -(A + B) * p1 * p3 / 2.0;
  m(5, 4) = (A + B) * p1 * p1 * x2 * x3 / (2 * s) - (C + D) * x2 * x3 / (2 * s);
  m(5, 5) = (A + B) * p1 * p1 * x3 * x3 / (2 * s) + (C + D) * x2 * x2 / (2 * s);

  if (mut.active()) m(mut.row, mut.col) = -m(mut.row, mut.col);
  return m;
}

SymbolMatrix m3c_display(cd omega, const Wavevector& xi, const Material3& mat) {
  const double n = xi.norm(), ne = norm_eps(xi, mat);
  const Eigen::Vector3d t(xi[0] / ne, xi[1] / ne, xi[2] / ne);
  const Eigen::Vector3d p(xi[0] / n, xi[1] / n, xi[2] / n);
  const Eigen::Vector3d w(mat.b(), mat.a(), mat.a());
  SymbolMatrix m = SymbolMatrix::Zero(6, 6);
  m.block(0, 0, 3, 3) = (w.asDiagonal() * (t * t.transpose())).cast<cd>();
  m.block(3, 3, 3, 3) = (p * p.transpose()).cast<cd>();
  return m / (I * omega);
}

SymbolMatrix resolvent_matrix_2d(cd omega, const Wavevector& xi, const Material2& mat) {
  require_complex(omega);
  require_nonzero(xi);
  return m2_display(scalar_resolvents(omega, xi, mat), xi, mat) + m2c_display(omega, xi, mat);
}

static void require_canonical3(const Material3& mat) {
  if (!mat.canonical())
    throw Error(ErrorKind::InvalidArgument, "3D closed forms need a canonical material (axis=1, mu=1); call canonicalize");
}

SymbolMatrix resolvent_matrix_3d(cd omega, const Wavevector& xi, const Material3& mat, EntryMutation mut) {
  require_complex(omega);
  require_nonzero(xi);
  require_canonical3(mat);
  if (!off_axis(xi)) throw Error(ErrorKind::DegenerateDirection, "xi lies within the axis guard; use the LU fallback");
  return m3_display(scalar_resolvents(omega, xi, mat), xi, mat, mut) + m3c_display(omega, xi, mat);
}

SymbolMatrix resolvent_matrix_3d_lu(cd omega, const Wavevector& xi, const Material3& mat) {
  const SymbolMatrix p = symbol_p(omega, xi, mat);
  return p.partialPivLu().inverse();
}

SymbolMatrix inverse_symbol(cd omega, const Wavevector& xi, const Material2& mat) {
  if (xi.squaredNorm() == 0.0) return SymbolMatrix::Identity(3, 3) / (I * omega);
  return m2_display(scalar_resolvents(omega, xi, mat), xi, mat) + m2c_display(omega, xi, mat);
}

SymbolMatrix inverse_symbol(cd omega, const Wavevector& xi, const Material3& mat) {
  if (xi.squaredNorm() == 0.0) return SymbolMatrix::Identity(6, 6) / (I * omega);
  if (!mat.canonical() || !off_axis(xi)) return resolvent_matrix_3d_lu(omega, xi, mat);
  return m3_display(scalar_resolvents(omega, xi, mat), xi, mat) + m3c_display(omega, xi, mat);
}

std::array<cd, 3> charge_column_2d(cd omega, const Wavevector& xi, const Material2& mat, const std::array<cd, 3>& j) {
  require_nonzero(xi);
  const double r = norm_eps_prime(xi, mat);
  const double x1 = xi[0] / r, x2 = xi[1] / r;
  const cd rho = I * (xi[0] * j[0] + xi[1] * j[1]);
  const cd f = rho / (mat.mu() * omega * r);
  return {(mat.inv12() * x2 - mat.inv22() * x1) * f, (mat.inv12() * x1 - mat.inv11() * x2) * f, cd(0.0)};
}

std::array<cd, 6> charge_column_3d(cd omega, const Wavevector& xi, const Material3& mat, const std::array<cd, 6>& j) {
  require_nonzero(xi);
  const double n = xi.norm(), ne = norm_eps(xi, mat);
  const cd rho_e = I * (xi[0] * j[0] + xi[1] * j[1] + xi[2] * j[2]);
  const cd rho_m = I * (xi[0] * j[3] + xi[1] * j[4] + xi[2] * j[5]);
  const double w[3] = {mat.b(), mat.a(), mat.a()};
  std::array<cd, 6> out;
  for (int k = 0; k < 3; ++k) {
    out[k] = -w[k] * (xi[k] / ne) * rho_e / (omega * ne);
    out[3 + k] = -(xi[k] / n) * rho_m / (omega * n);
  }
  return out;
}

InverseSymbolParts inverse_symbol_parts(const Wavevector& xi, const Material2& mat) {
  require_nonzero(xi);
  InverseSymbolParts parts;
  parts.w.push_back(m2_display({1.0, 0.0}, xi, mat));
  parts.w.push_back(m2_display({0.0, 1.0}, xi, mat));
  parts.wc = m2c_display(1.0 / I, xi, mat);
  return parts;
}

InverseSymbolParts inverse_symbol_parts(const Wavevector& xi, const Material3& mat) {
  require_nonzero(xi);
  require_canonical3(mat);
  if (!off_axis(xi)) throw Error(ErrorKind::DegenerateDirection, "xi lies within the axis guard");
  InverseSymbolParts parts;
  for (int k = 0; k < 4; ++k) {
    Scalars3 s{0.0, 0.0, 0.0, 0.0};
    (k == 0 ? s.A : k == 1 ? s.B : k == 2 ? s.C : s.D) = 1.0;
    parts.w.push_back(m3_display(s, xi, mat));
  }
  parts.wc = m3c_display(1.0 / I, xi, mat);
  return parts;
}

RMat scalar_norm_matrix(int, const Material2& mat) {
  RMat g(2, 2);
  const double f = 1.0 / (mat.mu() * mat.det_eps());
  g << mat.eps11() * f, mat.eps12() * f, mat.eps12() * f, mat.eps22() * f;
  return g;
}

RMat scalar_norm_matrix(int scalar, const Material3& mat) {
  RMat g = RMat::Zero(3, 3);
  if (scalar < 2) {
    g(0, 0) = g(1, 1) = g(2, 2) = mat.b();
  } else {
    g(0, 0) = mat.b();
    g(1, 1) = g(2, 2) = mat.a();
  }
  return g;
}

std::vector<int> singular_scalars(double omega, int dim) {
  if (omega == 0.0) throw Error(ErrorKind::InvalidArgument, "omega = 0 is excluded");
  if (dim == 2) return {omega > 0 ? 0 : 1};
  return omega > 0 ? std::vector<int>{0, 2} : std::vector<int>{1, 3};
}

namespace {

std::vector<cd> scalar_list(const Scalars2& s) { return {s.A, s.B}; }
std::vector<cd> scalar_list(const Scalars3& s) { return {s.A, s.B, s.C, s.D}; }

template <class Mat>
MultiplierSplit split_impl(double omega, const Wavevector& xi, const Mat& mat, int sign) {
  if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidArgument, "sign must be +1 or -1");
  const InverseSymbolParts parts = inverse_symbol_parts(xi, mat);
  const auto sing = singular_scalars(omega, xi.size());
  const std::vector<cd> sc = scalar_list(scalar_resolvents(cd(omega), xi, mat));
  MultiplierSplit out;
  out.regular = parts.wc / (I * omega);
  for (std::size_t k = 0; k < parts.w.size(); ++k) {
    bool is_sing = false;
    for (int s : sing) is_sing |= (s == static_cast<int>(k));
    if (is_sing) {
      SingularTerm t;
      t.scalar = static_cast<int>(k);
      t.orientation = (k % 2 == 0) ? 1.0 : -1.0;
      t.pv_weight = parts.w[k];
      t.surface_weight = (-sign * pi) * parts.w[k];
      t.singular_radius = std::abs(omega);
      t.norm_matrix = scalar_norm_matrix(static_cast<int>(k), mat);
      out.terms.push_back(t);
    } else {
      // Off the singular sphere the non-singular scalars are finite at real omega.
      out.regular += sc[k] * parts.w[k];
    }
  }
  return out;
}

}  // namespace

MultiplierSplit sokhotsky_split(double omega, const Wavevector& xi, const Material2& mat, int sign) {
  return split_impl(omega, xi, mat, sign);
}

MultiplierSplit sokhotsky_split(double omega, const Wavevector& xi, const Material3& mat, int sign) {
  return split_impl(omega, xi, mat, sign);
}

}  // namespace mxw
