#include "mxw/region.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "mxw/spectral.hpp"

namespace mxw {

LebesguePair LebesguePair::make(double x, double y, int d) {
  if (d != 2 && d != 3) throw Error(ErrorKind::InvalidArgument, "dimension must be 2 or 3");
  if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "0 <= 1/p, 1/q <= 1 violated");
  return {x, y, d};
}

LebesguePair LebesguePair::rational(long long nx, long long ny, long long den, int d) {
  if (den <= 0) throw Error(ErrorKind::InvalidArgument, "denominator must be positive");
  if (nx < 0 || nx > den || ny < 0 || ny > den) throw Error(ErrorKind::InvalidArgument, "0 <= 1/p, 1/q <= 1 violated");
  LebesguePair p = make(double(nx) / double(den), double(ny) / double(den), d);
  p.num_x = nx;
  p.num_y = ny;
  p.den = den;
  return p;
}

LebesguePair LebesguePair::dual() const {
  if (exact()) return rational(den - num_y, den - num_x, den, d);
  return {1.0 - y, 1.0 - x, d};
}

namespace {

// Evaluates sign(a X + b Y + c N) with X = x N, Y = y N, exactly for rational pairs.
struct Linear {
  const LebesguePair& p;
  int sign(long long a, long long b, long long c) const {
    if (p.exact()) {
      const long long v = a * p.num_x + b * p.num_y + c * p.den;
      return (v > 0) - (v < 0);
    }
    const double v = double(a) * p.x + double(b) * p.y + double(c);
    const double tol = 1e-12 * (std::abs(double(a)) + std::abs(double(b)) + std::abs(double(c)));
    return v > tol ? 1 : (v < -tol ? -1 : 0);
  }
  bool ge(long long a, long long b, long long c) const { return sign(a, b, c) >= 0; }
  bool gt(long long a, long long b, long long c) const { return sign(a, b, c) > 0; }
  bool eq(long long a, long long b, long long c) const { return sign(a, b, c) == 0; }
};

bool in_r0(const Linear& L, int s) {
  const long long d = L.p.d;
  // 0 <= x - y <= s/d, without (1, (d-s)/d) and (s/d, 0)
  if (!L.ge(1, -1, 0) || !L.ge(-d, d, s)) return false;
  if (L.eq(1, 0, -1) && L.eq(0, d, -(d - s))) return false;
  if (L.eq(d, 0, -s) && L.eq(0, 1, 0)) return false;
  return true;
}

bool in_p(const Linear& L) {
  const long long d = L.p.d;
  return L.ge(d + 1, -(d + 1), -2) && L.gt(2 * d, 0, -(d + 1)) && L.gt(0, -2 * d, d - 1);
}

}  // namespace

double gamma_exponent(const LebesguePair& p) {
  const long long d = p.d;
  if (p.exact()) {
    const long long X = p.num_x, Y = p.num_y, N = p.den;
    const long long t = std::max({0LL, 2 * N - (d + 1) * (X - Y), (d + 1) * N - 2 * d * X, 2 * d * Y - (d - 1) * N});
    return double(t) / double(2 * N);
  }
  return std::max({0.0, 1.0 - 0.5 * double(d + 1) * (p.x - p.y), 0.5 * double(d + 1) - double(d) * p.x,
                   double(d) * p.y - 0.5 * double(d - 1)});
}

double alpha_exponent(const LebesguePair& p) {
  if (p.exact()) return double(p.den - p.d * (p.num_x - p.num_y)) / double(p.den);
  return 1.0 - double(p.d) * (p.x - p.y);
}

double kappa(const LebesguePair& p, cd omega, KappaVariant variant) {
  double dist;
  if (variant == KappaVariant::real_axis) {
    if (omega.imag() == 0.0) throw Error(ErrorKind::OnSingularSet, "kappa is undefined on the real axis");
    dist = std::abs(omega.imag());
  } else {
    if (omega.imag() == 0.0 && omega.real() >= 0.0)
      throw Error(ErrorKind::OnSingularSet, "kappa is undefined on [0, infinity)");
    dist = omega.real() >= 0.0 ? std::abs(omega.imag()) : std::abs(omega);
  }
  const double g = gamma_exponent(p), a = alpha_exponent(p);
  return std::pow(std::abs(omega), g - a) * std::pow(dist, -g);
}

bool membership(const LebesguePair& p, RegionSet set) {
  const Linear L{p};
  const long long d = p.d;
  switch (set) {
    case RegionSet::R0_half:
      return in_r0(L, 1);
    case RegionSet::R1:
      return in_r0(L, 2) && L.ge(d + 1, -(d + 1), -2) && L.ge(-d, d, 2) && in_p(L);
    case RegionSet::P:
      return in_p(L);
  }
  return false;
}

const char* region_set_name(RegionSet set) {
  switch (set) {
    case RegionSet::R0_half:
      return "R0_half";
    case RegionSet::R1:
      return "R1";
    case RegionSet::P:
      return "P";
  }
  return "?";
}

static void check_nonempty(const RegionQuery& q) {
  if (!(q.ell > 0.0)) throw Error(ErrorKind::InvalidArgument, "ell > 0 violated");
  if (alpha_exponent(q.pair) == 0.0 && q.ell < 1.0)
    throw Error(ErrorKind::EmptyRegion, "alpha = 0 and ell < 1: Z(ell) is empty");
}

bool z_region(const RegionQuery& q, cd omega) {
  check_nonempty(q);
  return kappa(q.pair, omega) <= q.ell;
}

ZBoundary z_boundary(const RegionQuery& q, int resolution, double radius_cap) {
  check_nonempty(q);
  if (resolution < 2) throw Error(ErrorKind::InvalidArgument, "resolution must be at least 2");
  const double a = alpha_exponent(q.pair), g = gamma_exponent(q.pair);
  ZBoundary out;
  std::vector<cd> first;
  if (a == 0.0) {
    // kappa = |sin theta|^-gamma on the whole plane
    if (g == 0.0) {
      out.kind = ZBoundary::Kind::whole_plane;
      return out;
    }
    out.kind = ZBoundary::Kind::cone;
    out.cone_sine = std::pow(q.ell, -1.0 / g);
    const double th = std::asin(out.cone_sine);
    for (int k = 0; k < resolution; ++k) first.push_back(std::polar(radius_cap * k / (resolution - 1), th));
  } else {
    out.kind = ZBoundary::Kind::curve;
    out.outside = a > 0.0;
    // r(theta) = (ell |sin theta|^gamma)^(-1/alpha)
    for (int k = 0; k < resolution; ++k) {
      const double th = 0.5 * pi * (k + 0.5) / resolution;
      const double r = std::pow(q.ell * std::pow(std::sin(th), g), -1.0 / a);
      if (r <= radius_cap) first.push_back(std::polar(r, th));
    }
  }
  for (int quadrant = 0; quadrant < 4; ++quadrant) {
    std::vector<cd> line;
    for (const cd& z : first) {
      const double re = (quadrant == 1 || quadrant == 2) ? -z.real() : z.real();
      const double im = quadrant >= 2 ? -z.imag() : z.imag();
      line.emplace_back(re, im);
    }
    out.polylines.push_back(std::move(line));
  }
  return out;
}

Enclosure eigenvalue_enclosure(const RegionQuery& q, const Field& V) {
  const LebesguePair& p = q.pair;
  if (!(p.y < p.x)) throw Error(ErrorKind::ExponentOrder, "eigenvalue enclosure needs q > p");
  if (!(q.C > 0.0) || !(q.ell > 0.0) || !(q.t > 0.0 && q.t < 1.0))
    throw Error(ErrorKind::InvalidArgument, "C > 0, ell > 0 and 0 < t < 1 are required");
  Enclosure e;
  // pq/(q-p) = 1/(x - y)
  e.exponent = 1.0 / (p.x - p.y);
  e.norm = lebesgue_norm(V, e.exponent);
  e.threshold = q.t / (q.C * q.ell);
  // The norm of a field rescaled onto the threshold is only reproducible to rounding.
  e.satisfied = e.norm <= e.threshold * (1.0 + 1e-12);
  e.in_R0_half = membership(p, RegionSet::R0_half);
  e.in_R1 = membership(p, RegionSet::R1);
  e.in_P = membership(p, RegionSet::P);
  std::ostringstream s;
  s << "||V||_" << e.exponent << " = " << e.norm << (e.satisfied ? " <= " : " > ") << "t/(C ell) = " << e.threshold;
  if (e.satisfied) s << "; eigenvalues lie in C \\ Z(" << q.ell << ")";
  s << "; C = " << q.C << " is a user estimate";
  e.statement = s.str();
  return e;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidArgument, "fit needs matching samples");
  const std::size_t n = x.size();
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw Error(ErrorKind::InvalidArgument, "log-log fit needs positive data");
    A(k, 0) = std::log(x[k]);
    A(k, 1) = 1.0;
    b[k] = std::log(y[k]);
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  LineFit f;
  f.slope = c[0];
  f.intercept = c[1];
  f.residual = std::sqrt((A * c - b).squaredNorm() / double(n));
  f.points = static_cast<int>(n);
  return f;
}

const char* probe_family_name(ProbeFamily f) {
  switch (f) {
    case ProbeFamily::annulus:
      return "annulus";
    case ProbeFamily::knapp:
      return "knapp";
    case ProbeFamily::radial:
      return "radial";
  }
  return "?";
}

namespace {

double bump(double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; }

double norm_ratio(const LebesguePair& pr, const Field& u, const Field& J) {
  return lebesgue_norm(u, 1.0 / pr.y) / lebesgue_norm(J, 1.0 / pr.x);
}

}  // namespace

double annulus_ratio(const LebesguePair& pr, cd omega, const Material2& mat, const Grid& grid, double width) {
  if (grid.dim != 2) throw Error(ErrorKind::InvalidArgument, "the annulus family is two-dimensional");
  const double rho = std::abs(omega.real());
  Field c(grid, 3);
  for (std::size_t p = 1; p < grid.points(); ++p) {
    const Wavevector xi = grid.wavevector_at(p);
    const double r = norm_eps_prime(xi, mat);
    if (std::abs(r - rho) > width) continue;
    c.at(0, p) = -2.0 * xi[1] / r;
    c.at(1, p) = 2.0 * xi[0] / r;
  }
  const Field v = from_spectrum(c);
  if (max_abs(v) == 0.0) throw Error(ErrorKind::InvalidArgument, "no lattice modes in the annulus");
  return norm_ratio(pr, solve(omega, v, mat), v);
}

double probe_ratio(const LebesguePair& pr, ProbeFamily family, cd omega, const ProbeSetup& s) {
  if (family == ProbeFamily::annulus)
    return annulus_ratio(pr, omega, Material2::identity(), Grid::make(2, s.n, s.length), s.width);
  if (pr.d != 3) throw Error(ErrorKind::InvalidArgument, "the knapp and radial families are three-dimensional");
  const Grid g = Grid::make(3, s.n, s.length);
  const Material3 mat = Material3::from_ab(s.a, s.b);
  const double tau = std::abs(omega.imag());
  const double rho = std::abs(omega) / std::sqrt(mat.b());
  const double theta = std::sqrt(tau / std::abs(omega));
  Field c(g, 6);
  for (std::size_t p = 1; p < g.points(); ++p) {
    const Wavevector xi = g.wavevector_at(p);
    const double r = xi.norm();
    double f = bump((r - rho) / tau);
    if (f == 0.0) continue;
    if (family == ProbeFamily::knapp) f *= bump(std::acos(std::min(1.0, std::abs(xi[2]) / r)) / theta);
    c.at(1, p) = -f * xi[2] / r;
    c.at(2, p) = f * xi[1] / r;
  }
  const Field J = from_spectrum(c);
  if (max_abs(J) == 0.0) throw Error(ErrorKind::InvalidArgument, "probe family has no lattice support");
  return norm_ratio(pr, solve(omega, J, mat), J);
}

ScalingProbe norm_scaling_probe(const LebesguePair& pr, ProbeFamily family, const std::vector<cd>& omegas,
                                ProbeSweep sweep, const ProbeSetup& setup) {
  ScalingProbe out;
  for (const cd& w : omegas) {
    out.omegas.push_back(w);
    out.abscissa.push_back(sweep == ProbeSweep::dist ? std::abs(w.imag()) : std::abs(w));
    out.ratios.push_back(probe_ratio(pr, family, w, setup));
  }
  out.fit = fit_loglog(out.abscissa, out.ratios);
  return out;
}

}  // namespace mxw
