#include <cmath>

#include "doctest.h"
#include "mxw/lap.hpp"

using namespace mxw;

namespace {

Field conj_field(const Field& f) {
  Field out = f;
  for (cd& v : out.data) v = std::conj(v);
  return out;
}

const Material2 aniso2(1.3, 0.2, 0.9, 1.1);

// Scalar radial profile g(|xi|) with a smooth cut at `support`.
SpectralSource radial_source(int dim, double support, double spatial, std::function<double(double)> g) {
  return function_source(dim, 1, support, spatial, [g, support](const Wavevector& xi, cd* out) {
    const double r = xi.norm();
    out[0] = r < support ? g(r) : 0.0;
  });
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 12, 16, 20, 40}) {
    const GaussRule& r = gauss_legendre(n);
    REQUIRE(r.x.size() == std::size_t(n));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.w[i] * std::pow(r.x[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK(std::abs(s - exact) < 1e-14);
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), Error);
}

TEST_CASE("smooth step and radial cutoff") {
  CHECK(smooth_step(-0.5) == 1.0);
  CHECK(smooth_step(0.0) == 1.0);
  CHECK(smooth_step(1.0) == 0.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  double prev = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double t = k / 100.0;
    CHECK(smooth_step(t) + smooth_step(1.0 - t) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(smooth_step(t) <= prev);
    prev = smooth_step(t);
  }
  const CutoffSpec beta = CutoffSpec::make(1.0, 2.0);
  CHECK(beta(0.3) == 1.0);
  CHECK(beta(2.5) == 0.0);
  CHECK_THROWS_AS(CutoffSpec::make(2.0, 1.0), Error);
  CHECK_THROWS_AS(CutoffSpec::make(0.0, 1.0), Error);
}

TEST_CASE("surface weights reproduce ellipse and spheroid areas") {
  SUBCASE("ellipse") {
    const double a = 2.0, b = 0.7, w = 1.3;
    RMat g(2, 2);
    g << 1.0 / (a * a), 0.0, 0.0, 1.0 / (b * b);
    const SurfaceQuadrature sq = SurfaceQuadrature::make(NormFlavor{g}, w, 200);
    double area = 0.0;
    for (double v : sq.area_weights) area += v;
    const double e = std::sqrt(1.0 - b * b / (a * a));
    const double exact = 4.0 * a * w * std::comp_ellint_2(e);
    CHECK(std::abs(area - exact) < 1e-12 * exact);
    for (std::size_t q = 0; q < sq.size(); ++q) {
      Wavevector xi(2);
      xi << sq.nodes[2 * q], sq.nodes[2 * q + 1];
      CHECK(NormFlavor{g}(xi) == doctest::Approx(w).epsilon(1e-14));
    }
  }
  SUBCASE("rotated ellipse keeps its perimeter") {
    const double a = 1.5, b = 0.5, th = 0.4;
    Eigen::Matrix2d rot;
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Eigen::Matrix2d g0 = Eigen::Vector2d(1.0 / (a * a), 1.0 / (b * b)).asDiagonal();
    const RMat g = rot * g0 * rot.transpose();
    const SurfaceQuadrature sq = SurfaceQuadrature::make(NormFlavor{g}, 1.0, 256);
    double area = 0.0;
    for (double v : sq.area_weights) area += v;
    const double exact = 4.0 * a * std::comp_ellint_2(std::sqrt(1.0 - b * b / (a * a)));
    CHECK(std::abs(area - exact) < 1e-12 * exact);
  }
  SUBCASE("spheroids") {
    for (double c : {0.6, 1.0, 1.7}) {
      const double a = 1.1;
      RMat g = RMat::Zero(3, 3);
      g(0, 0) = 1.0 / (c * c);
      g(1, 1) = g(2, 2) = 1.0 / (a * a);
      const SurfaceQuadrature sq = SurfaceQuadrature::make(NormFlavor{g}, 1.0, 48);
      double area = 0.0;
      for (double v : sq.area_weights) area += v;
      double exact;
      if (c < a) {
        const double e = std::sqrt(1.0 - c * c / (a * a));
        exact = 2.0 * pi * a * a * (1.0 + (1.0 - e * e) / e * std::atanh(e));
      } else if (c > a) {
        const double e = std::sqrt(1.0 - a * a / (c * c));
        exact = 2.0 * pi * a * a * (1.0 + c / (a * e) * std::asin(e));
      } else {
        exact = 4.0 * pi * a * a;
      }
      CHECK(std::abs(area - exact) < 1e-11 * exact);
    }
  }
  SUBCASE("delta weights of the round circle") {
    const SurfaceQuadrature sq = SurfaceQuadrature::make(NormFlavor::euclidean(2), 0.8, 32);
    double s = 0.0;
    for (double v : sq.delta_weights) s += v;
    CHECK(s == doctest::Approx(2.0 * pi * 0.8).epsilon(1e-14));
  }
  CHECK_THROWS_AS(SurfaceQuadrature::make(NormFlavor::euclidean(2), -1.0, 32), Error);
}

TEST_CASE("surface part of a flat spectrum at the origin") {
  const SpectralSource f = radial_source(2, 3.0, 0.0, [](double r) { return smooth_step(r - 2.0); });
  const Grid out = Grid::make(2, 4, 4.0);
  const CutoffSpec beta = CutoffSpec::make(1.5, 1.8);
  const double w = 1.0;
  const SurfaceQuadrature sq = SurfaceQuadrature::make(NormFlavor::euclidean(2), w, 64);
  for (int sign : {1, -1}) {
    const Field u = surface_part(f, out, w, sign, beta, sq);
    const cd expected = double(sign) * I * pi * (2.0 * pi * w);
    CHECK(std::abs(std::pow(2.0 * pi, 2) * u.data[0] - expected) < 1e-12 * std::abs(expected));
  }
  const SpectralSource zero = radial_source(2, 3.0, 0.0, [](double) { return 0.0; });
  CHECK(max_abs(surface_part(zero, out, w, 1, beta, sq)) == 0.0);
}

TEST_CASE("principal value without a singularity is the plain integral") {
  // f^ vanishes for |xi| >= 0.6, well inside the unit circle.
  const SpectralSource f = radial_source(2, 0.6, 8.0, [](double r) { return smooth_step((r - 0.2) / 0.4); });
  const Grid out = Grid::make(2, 4, 6.0);
  const CutoffSpec beta = CutoffSpec::make(1.4, 1.8);
  const double w = 1.0;
  // The profile has its own transition on [0.2, 0.6], which the default panels do not see.
  LapOptions opts;
  opts.refine = 3.0;
  opts.tolerance = 1e-9;
  const Field u = pv_part(f, out, w, beta, NormFlavor::euclidean(2), opts);

  // Independent oracle for a radial profile: (2 pi)^-1 int g(r)/(r - w) J0(r|x|) r dr,
  // by composite Simpson on [0, 0.6].
  const int m = 20000;
  const double hr = 0.6 / m;
  for (std::size_t p = 0; p < out.points(); ++p) {
    int idx[3];
    out.unflatten(p, idx);
    const double x = std::hypot(idx[0] * out.spacing(0), idx[1] * out.spacing(1));
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double r = i * hr;
      const double v = smooth_step((r - 0.2) / 0.4) / (r - w) * std::cyl_bessel_j(0.0, r * x) * r;
      s += v * (i == 0 || i == m ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    s *= hr / 3.0 / (2.0 * pi);
    CHECK(std::abs(u.data[p] - s) < 1e-10 * max_abs(u));
  }
}

TEST_CASE("principal value of a profile even about the circle") {
  // Cross-checked against the extrapolated e_delta with the surface part removed.
  const double w = 1.0, s = 0.2;
  const SpectralSource f =
      radial_source(2, 2.2, 40.0, [&](double r) { return std::exp(-(r - w) * (r - w) / (2 * s * s)); });
  const Grid out = Grid::make(2, 4, 8.0);
  const CutoffSpec beta = CutoffSpec::make(1.6, 2.0);
  const NormFlavor fl = NormFlavor::euclidean(2);
  const Field pv = pv_part(f, out, w, beta, fl);
  const SurfaceQuadrature sq = SurfaceQuadrature::make(fl, w, 128);
  const Field surf = surface_part(f, out, w, 1, beta, sq);
  std::vector<Field> table;
  for (int k = 0; k < 5; ++k) table.push_back(e_delta(f, out, w, 0.1 * std::ldexp(1.0, -k), 1, beta, fl));
  for (int level = 1; level < 5; ++level)
    for (int k = 4; k >= level; --k) {
      const double fac = std::ldexp(1.0, level);
      table[k] = (1.0 / (fac - 1.0)) * (cd(fac) * table[k] - table[k - 1]);
    }
  CHECK(rel_l2_diff(table[4] - surf, pv) < 1e-3);
}

TEST_CASE("principal value refinement check reports non-convergence") {
  const SpectralSource f = radial_source(2, 2.2, 8.0, [](double r) { return std::exp(-r * r); });
  LapOptions opts;
  opts.tolerance = 0.0;
  opts.angular = 4;
  CHECK_THROWS_AS(pv_part(f, Grid::make(2, 4, 8.0), 1.0, CutoffSpec::make(1.6, 2.0), NormFlavor::euclidean(2), opts),
                  Error);
  try {
    pv_part(f, Grid::make(2, 4, 8.0), 1.0, CutoffSpec::make(1.6, 2.0), NormFlavor::euclidean(2), opts);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::QuadratureNotConverged);
  }
}

TEST_CASE("e_delta basics") {
  const Grid out = Grid::make(2, 4, 8.0);
  const CutoffSpec beta = CutoffSpec::make(1.5, 2.0);
  const NormFlavor fl = NormFlavor::euclidean(2);
  SUBCASE("cutoff vanishing on the spectrum gives zero") {
    const SpectralSource f =
        radial_source(2, 3.0, 4.0, [](double r) { return r > 2.2 ? std::exp(-1.0 / (r - 2.2)) : 0.0; });
    CHECK(max_abs(e_delta(f, out, 1.0, 0.1, 1, beta, fl)) == 0.0);
  }
  SUBCASE("norm grows as delta decreases for a spectrum near the circle") {
    const SpectralSource f =
        radial_source(2, 2.2, 40.0, [](double r) { return std::exp(-(r - 1.0) * (r - 1.0) / 0.08); });
    double prev = 0.0;
    for (double d : {0.4, 0.2, 0.1, 0.05, 0.025}) {
      const double n = l2_norm(e_delta(f, out, 1.0, d, -1, beta, fl));
      CHECK(n >= prev);
      prev = n;
    }
  }
  SUBCASE("preconditions") {
    const SpectralSource f = radial_source(2, 2.2, 4.0, [](double r) { return std::exp(-r * r); });
    CHECK_THROWS_AS(e_delta(f, out, 1.0, 0.6, 1, beta, fl), Error);
    CHECK_THROWS_AS(e_delta(f, out, -1.0, 0.1, 1, beta, fl), Error);
    CHECK_THROWS_AS(e_delta(f, out, 1.0, 0.1, 1, beta, NormFlavor::euclidean(3)), Error);
    CHECK_THROWS_AS(e_delta(f, out, 1.9, 0.1, 1, beta, fl), Error);  // circle outside the plateau
  }
}

TEST_CASE("e_delta converges linearly to the principal value plus the surface part") {
  // Small box, so that the spectrum varies slowly on the scale of the largest delta.
  const Grid g = Grid::make(2, 16, 8.0);
  const Field f = random_band_limited(g, 1, 11, 2);
  const SpectralSource src = grid_source(f);
  const NormFlavor fl = NormFlavor::eps_prime(aniso2);
  const CutoffSpec beta = CutoffSpec::make(1.6, 2.1);
  const double w = 1.0;
  const Field pv = pv_part(src, g, w, beta, fl);
  const SurfaceQuadrature sq = SurfaceQuadrature::make(fl, w, 256);
  for (int sign : {1, -1}) {
    const Field limit = pv + surface_part(src, g, w, sign, beta, sq);
    std::vector<double> ds, errs;
    for (int k = 3; k <= 9; ++k) {
      const double d = std::ldexp(1.0, -k);
      ds.push_back(d);
      errs.push_back(rel_l2_diff(e_delta(src, g, w, d, sign, beta, fl), limit));
    }
    const LineFit fit = fit_loglog(ds, errs);
    CHECK(fit.slope >= 0.9);
    CHECK(errs.back() < 1e-2);
  }
}

TEST_CASE("limiting solution equals the real-frequency multiplier away from the spheres") {
  // Gaussian wave packet: spectrum centred at xi0 with width s, negligible near
  // xi = 0 and on the characteristic ellipse.
  const double s = 0.15, L = 128.0;
  const double xi0[2] = {1.2, 0.0}, c[2] = {L / 2, L / 2};
  const double pol[3] = {0.3, -0.5, 1.0};
  const RMat gm = NormFlavor::eps_prime(aniso2).g;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Eigen::Matrix2d(gm.topLeftCorner(2, 2)));
  const double lmin = es.eigenvalues()[0], lmax = es.eigenvalues()[1];
  const double w = 2.8 * std::sqrt(lmax);
  const double r_in = 1.05 * w / std::sqrt(lmin);
  const CutoffSpec beta = CutoffSpec::make(r_in, r_in + 0.4);

  SpectralSource src = function_source(2, 3, r_in + 0.5, 0.0, [&](const Wavevector& xi, cd* out) {
    const double d2 = std::pow(xi[0] - xi0[0], 2) + std::pow(xi[1] - xi0[1], 2);
    const cd e = std::exp(-d2 / (2 * s * s)) * std::polar(1.0, -(c[0] * xi[0] + c[1] * xi[1]));
    for (int k = 0; k < 3; ++k) out[k] = pol[k] * e;
  });
  for (int a = 0; a < 2; ++a) {
    src.box_lo[a] = c[a] - 60.0;
    src.box_hi[a] = c[a] + 60.0;
  }

  const Grid lattice = Grid::make(2, 128, L);
  Field J(lattice, 3);
  for (std::size_t p = 0; p < lattice.points(); ++p) {
    int idx[3];
    lattice.unflatten(p, idx);
    const double y0 = idx[0] * lattice.spacing(0) - c[0], y1 = idx[1] * lattice.spacing(1) - c[1];
    const cd v = s * s / (2 * pi) * std::exp(-s * s * (y0 * y0 + y1 * y1) / 2) * std::polar(1.0, xi0[0] * y0 + xi0[1] * y1);
    for (int k = 0; k < 3; ++k) J.at(k, p) = pol[k] * v;
  }
  const Field u_lattice = apply_symbol(
      J, [&](const Wavevector& xi) { return inverse_symbol(cd(w), xi, aniso2); }, inverse_symbol(cd(w), wavevector(0, 0), aniso2));

  const Grid coarse = Grid::make(2, 16, L);
  Field u_ref(coarse, 3);
  for (std::size_t p = 0; p < coarse.points(); ++p) {
    int idx[3];
    coarse.unflatten(p, idx);
    const int fine[3] = {8 * idx[0], 8 * idx[1], 0};
    for (int k = 0; k < 3; ++k) u_ref.at(k, p) = u_lattice.at(k, lattice.flatten(fine));
  }
  const Field u = lap_solve(w, src, coarse, aniso2, -1, LapMethod::quadrature, beta);
  CHECK(rel_l2_diff(u, u_ref) < 1e-10);
}

TEST_CASE("synthesized source matches the closed-form Gaussian") {
  const double s = 0.5;
  const SpectralSource src =
      radial_source(2, 2.0 * 0.7 * pi, 12.0, [&](double r) { return std::exp(-r * r / (2 * s * s)); });
  const Grid out = Grid::make(2, 8, 8.0);
  const Field u = synthesize_source(src, out);
  Field ref(out, 1);
  for (std::size_t p = 0; p < out.points(); ++p) {
    int idx[3];
    out.unflatten(p, idx);
    const double r2 = std::pow(idx[0] * out.spacing(0), 2) + std::pow(idx[1] * out.spacing(1), 2);
    ref.data[p] = s * s / (2 * pi) * std::exp(-s * s * r2 / 2);
  }
  CHECK(rel_l2_diff(u, ref) < 1e-12);
}

TEST_CASE("2D limiting solutions: methods, residual and difference identity") {
  const Grid g = Grid::make(2, 16, 16.0);
  const Field J = random_band_limited(g, 3, 7, 4);
  const SpectralSource src = grid_source(J);
  const CutoffSpec beta = CutoffSpec::make(1.6, 2.1);
  for (double w : {1.0, -0.9}) {
    CAPTURE(w);
    const LapCrossCheck plus = lap_cross_validate(w, src, g, aniso2, 1, beta);
    const LapCrossCheck minus = lap_cross_validate(w, src, g, aniso2, -1, beta);
    CHECK(plus.rel_diff < 1e-8);
    CHECK(minus.rel_diff < 1e-8);
    const Field surf = lap_surface_terms(w, src, g, aniso2, 1, beta);
    CHECK(rel_l2_diff(plus.quadrature - minus.quadrature, cd(2.0) * surf) < 1e-12);
    CHECK(rel_l2_diff(plus.extrapolate - minus.extrapolate, cd(2.0) * surf) < 1e-8);
    for (LapMethod m : {LapMethod::quadrature, LapMethod::extrapolate})
      CHECK(lap_forward_residual(w, src, g, aniso2, 1, m, beta) < 1e-8);
  }
}

TEST_CASE("quadrature is stable under node doubling") {
  const Grid g = Grid::make(2, 16, 16.0);
  const SpectralSource src = grid_source(random_band_limited(g, 3, 5, 4));
  const CutoffSpec beta = CutoffSpec::make(1.6, 2.1);
  LapOptions fine;
  fine.refine = 2.0;
  for (LapMethod m : {LapMethod::quadrature, LapMethod::extrapolate}) {
    const Field a = lap_solve(1.0, src, g, aniso2, 1, m, beta);
    const Field b = lap_solve(1.0, src, g, aniso2, 1, m, beta, fine);
    CHECK(rel_l2_diff(a, b) < 1e-12);
  }
}

TEST_CASE("3D limiting solutions: methods, residual and difference identity") {
  const Grid g = Grid::make(3, 4, 4.0);
  const Field J = random_band_limited(g, 6, 3, 1);
  const SpectralSource src = grid_source(J, 1.9, 2.3);
  const Material3 mat = Material3::from_ab(1.5, 1.0);
  const CutoffSpec beta = CutoffSpec::make(1.3, 1.8);
  const double w = 0.7;
  const LapCrossCheck plus = lap_cross_validate(w, src, g, mat, 1, beta);
  CHECK(plus.rel_diff < 1e-8);
  const Field minus = lap_solve(w, src, g, mat, -1, LapMethod::quadrature, beta);
  const Field surf = lap_surface_terms(w, src, g, mat, 1, beta);
  CHECK(rel_l2_diff(plus.quadrature - minus, cd(2.0) * surf) < 1e-12);
  CHECK(lap_forward_residual(w, src, g, mat, 1, LapMethod::quadrature, beta) < 1e-6);
}

TEST_CASE("cross-validation failures are surfaced") {
  const Grid g = Grid::make(2, 8, 8.0);
  const SpectralSource src = grid_source(random_band_limited(g, 3, 9, 2));
  LapOptions opts;
  opts.tolerance = 1e-15;
  opts.levels = 2;
  try {
    lap_cross_validate(1.0, src, g, aniso2, 1, CutoffSpec::make(1.6, 2.1), opts);
    FAIL("expected MethodsDisagree");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MethodsDisagree);
  }
}

TEST_CASE("complex conjugation swaps the frequency sign") {
  const Grid g = Grid::make(2, 16, 12.0);
  const Field J = random_band_limited(g, 3, 21, 4);
  const CutoffSpec beta = CutoffSpec::make(1.6, 2.1);
  for (int sign : {1, -1}) {
    const Field a = lap_solve(0.9, J, aniso2, sign, LapMethod::quadrature, beta);
    const Field b = lap_solve(-0.9, conj_field(J), aniso2, sign, LapMethod::quadrature, beta);
    CHECK(rel_l2_diff(conj_field(a), b) < 1e-11);
  }
}

TEST_CASE("lap input validation") {
  const Grid g2 = Grid::make(2, 8, 8.0);
  const SpectralSource src = grid_source(random_band_limited(g2, 3, 1, 2));
  const CutoffSpec beta = CutoffSpec::make(1.6, 2.1);
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind_of([&] { lap_solve(0.0, src, g2, aniso2, 1, LapMethod::quadrature, beta); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { lap_solve(1.0, src, g2, aniso2, 0, LapMethod::quadrature, beta); }) ==
        ErrorKind::InvalidArgument);
  // Singular ellipse not inside the plateau.
  CHECK(kind_of([&] { lap_solve(1.5, src, g2, aniso2, 1, LapMethod::quadrature, beta); }) ==
        ErrorKind::InvalidArgument);
  // Cutoff reaching past the source window plateau (0.7 pi).
  CHECK(kind_of([&] { lap_solve(1.0, src, g2, aniso2, 1, LapMethod::quadrature, CutoffSpec::make(1.6, 2.5)); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { lap_solve(1.0, src, g2, Material3::from_ab(2.0, 1.0), 1, LapMethod::quadrature, beta); }) ==
        ErrorKind::InvalidArgument);
  const SpectralSource src3 = grid_source(random_band_limited(Grid::make(3, 4, 4.0), 6, 1, 1));
  CHECK(kind_of([&] {
          lap_solve(1.0, src3, Grid::make(3, 4, 4.0), Material3(1.0, 2.0, 2), 1, LapMethod::quadrature, beta);
        }) == ErrorKind::InvalidArgument);
  CHECK_THROWS_AS(grid_source(random_band_limited(g2, 3, 1, 2), 2.0, 1.0), Error);
}

TEST_CASE("shifted solutions satisfy the delta-defect identity on the lattice") {
  SUBCASE("2D") {
    const Grid g = Grid::make(2, 32, 20.0);
    const Field J = random_band_limited(g, 3, 4);
    for (int sign : {1, -1})
      for (double d : {0.3, 1e-3}) {
        const Field u = solve(cd(1.1, sign * d), J, aniso2);
        const Field lhs = forward_operator(cd(1.1), u, aniso2);
        CHECK(rel_l2_diff(lhs, J + cd(sign * d) * u) < 1e-12);
      }
  }
  SUBCASE("3D") {
    const Grid g = Grid::make(3, 16, 10.0);
    const Field J = random_band_limited(g, 6, 8);
    const Material3 mat(0.7, 1.9, 3, 1.4);
    for (int sign : {1, -1}) {
      const Field u = solve(cd(-0.8, sign * 0.05), J, mat);
      const Field lhs = forward_operator(cd(-0.8), u, mat);
      CHECK(rel_l2_diff(lhs, J + cd(sign * 0.05) * u) < 1e-12);
    }
  }
}

TEST_CASE("high-frequency part is Cauchy in delta with linear rate") {
  const Grid g = Grid::make(2, 32, 16.0);
  const Field J = random_band_limited(g, 3, 6, 8);
  const CutoffSpec beta = CutoffSpec::make(1.6, 2.4);
  for (int sign : {1, -1}) {
    std::vector<double> ds, gaps;
    for (int k = 3; k <= 9; ++k) {
      const double d = std::ldexp(1.0, -k);
      ds.push_back(d);
      gaps.push_back(rel_l2_diff(high_part(1.0, d, sign, J, aniso2, beta), high_part(1.0, d / 2, sign, J, aniso2, beta)));
    }
    CHECK(fit_loglog(ds, gaps).slope >= 0.9);
  }
  const Grid g3 = Grid::make(3, 16, 8.0);
  const Field J3 = random_band_limited(g3, 6, 6, 4);
  const Material3 mat = Material3::from_ab(2.0, 1.0);
  std::vector<double> ds, gaps;
  for (int k = 3; k <= 9; ++k) {
    const double d = std::ldexp(1.0, -k);
    ds.push_back(d);
    gaps.push_back(rel_l2_diff(high_part(0.7, d, 1, J3, mat, beta), high_part(0.7, d / 2, 1, J3, mat, beta)));
  }
  CHECK(fit_loglog(ds, gaps).slope >= 0.9);
}

TEST_CASE("blow-up probe on a lattice annulus") {
  const Grid g = Grid::make(2, 64, 64.0);
  const double w = 5.0 * 2.0 * pi / 64.0;
  std::vector<double> deltas;
  for (int k = 2; k <= 8; ++k) deltas.push_back(std::ldexp(1.0, -k));
  const LebesguePair l2 = LebesguePair::rational(1, 1, 2, 2);
  const BlowupProbe thin = lap_blowup_probe(w, l2, Material2::identity(), deltas, g, 1e-9);
  CHECK(thin.fit.slope == doctest::Approx(-gamma_exponent(l2)).epsilon(0.1));
  const BlowupProbe a = lap_blowup_probe(w, l2, Material2::identity(), deltas, g, 0.02, -1);
  const BlowupProbe b = lap_blowup_probe(w, l2, Material2::identity(), deltas, g, 0.04, -1);
  CHECK(std::abs(a.fit.slope - b.fit.slope) <= 0.05);
  CHECK_THROWS_AS(lap_blowup_probe(w, l2, Material2::identity(), {0.1}, g, 1e-9), Error);
}
