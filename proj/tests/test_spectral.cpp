#include "doctest.h"
#include "fields.hpp"
#include "mxw/multiplier.hpp"
#include "mxw/spectral.hpp"
#include "support.hpp"

using namespace mxw;
using testing_support::quarter_turn;
using testing_support::single_mode;

namespace {

Field component_divergence_free_residual(const Field& u, int triple) {
  Field out(u.grid, 1);
  const Field c = to_spectrum(u);
  for (std::size_t p = 0; p < u.points(); ++p) {
    const Wavevector xi = u.grid.wavevector_at(p);
    cd s = 0.0;
    for (int a = 0; a < u.grid.dim; ++a) s += xi[a] * c.at(3 * triple + a, p);
    out.data[p] = s;
  }
  return out;
}

double max_coeff(const Field& f) {
  const Field c = to_spectrum(f);
  return max_abs(c);
}

}  // namespace

TEST_CASE("transform round trip and Parseval") {
  const Grid g = Grid::make(3, 8, {1.0, 2.0, 0.5});
  const Field f = random_band_limited(g, 2, 1, 4);
  CHECK(rel_l2_diff(from_spectrum(to_spectrum(f)), f) < 1e-14);
  const Field c = to_spectrum(f);
  double s = 0.0;
  for (const cd& v : c.data) s += std::norm(v);
  s /= g.box_volume();
  CHECK(std::abs(s - std::pow(l2_norm(f), 2)) <= 1e-12 * s);
  CHECK(std::abs(lebesgue_norm(f, 2.0) - l2_norm(f)) <= 1e-12 * l2_norm(f));
}

TEST_CASE("apply_symbol basics") {
  const Grid g = Grid::make(2, 16, 3.0);
  const Field f = random_band_limited(g, 3, 2);
  const Field same = apply_symbol(f, [](const Wavevector&) { return SymbolMatrix(SymbolMatrix::Identity(3, 3)); },
                                  SymbolMatrix::Identity(3, 3));
  CHECK(rel_l2_diff(same, f) < 1e-13);

  const Material2 mat(2.0, 0.4, 0.8, 1.7);
  const cd w(0.9, 0.2);
  const Field back = forward_operator(w, solve(w, f, mat), mat);
  CHECK(rel_l2_diff(back, f) < 1e-10);

  auto diag = [](double s) {
    return [s](const Wavevector& xi) {
      SymbolMatrix m = SymbolMatrix::Zero(3, 3);
      for (int k = 0; k < 3; ++k) m(k, k) = std::cos(s * (k + 1) * xi[0]) + I * xi[1];
      return m;
    };
  };
  const SymbolMatrix z = SymbolMatrix::Identity(3, 3);
  const Field ab = apply_symbol(apply_symbol(f, diag(0.3), z), diag(1.1), z);
  const Field ba = apply_symbol(apply_symbol(f, diag(1.1), z), diag(0.3), z);
  CHECK(rel_l2_diff(ab, ba) < 1e-12);

  CHECK_THROWS_WITH_AS(apply_symbol(f,
                                    [](const Wavevector&) {
                                      return SymbolMatrix(SymbolMatrix::Constant(3, 3, cd(NAN, 0.0)));
                                    },
                                    z),
                       doctest::Contains("NonFiniteSymbol"), Error);
}

TEST_CASE("solve handles zero, real frequency and constants") {
  const Grid g = Grid::make(2, 8, 1.0);
  const Field zero(g, 3);
  CHECK(max_abs(solve(cd(1, 1), zero, Material2::identity())) == 0.0);
  CHECK_THROWS_WITH_AS(solve(cd(1, 0), zero, Material2::identity()), doctest::Contains("RealFrequency"), Error);

  Field c(g, 3);
  for (auto& v : c.data) v = cd(0.5, -2.0);
  const cd w(0.3, 0.0);
  const Field pc = forward_operator(w, c, Material2(2.0, 0.4, 0.8, 1.7));
  CHECK(rel_l2_diff(pc, (I * w) * c) < 1e-14);
}

TEST_CASE("solve residual and solenoidal preservation in 2D and 3D") {
  std::mt19937_64 rng(31);
  const Material2 m2(2.0, 0.4, 0.8, 1.7);
  const Grid g2 = Grid::make(2, 32, 5.0);
  for (int k = 0; k < 5; ++k) {
    const cd w = testing_support::random_omega(rng);
    const Field J = random_band_limited(g2, 3, 100 + k);
    CHECK(rel_l2_diff(forward_operator(w, solve(w, J, m2), m2), J) < 1e-10);
    const Field Js = leray_project(J);
    const Field u = solve(w, Js, m2);
    CHECK(max_abs(component_divergence_free_residual(u, 0)) <= 1e-11 * max_coeff(u));
  }
  const Material3 m3(2.0, 0.5, 2, 1.5);
  const Grid g3 = Grid::make(3, 16, {4.0, 5.0, 6.0});
  for (int k = 0; k < 3; ++k) {
    const cd w = testing_support::random_omega(rng);
    const Field J = random_band_limited(g3, 6, 200 + k);
    CHECK(rel_l2_diff(forward_operator(w, solve(w, J, m3), m3), J) < 1e-10);
    const Field u = solve(w, leray_project(J), m3);
    CHECK(max_abs(component_divergence_free_residual(u, 0)) <= 1e-11 * max_coeff(u));
    CHECK(max_abs(component_divergence_free_residual(u, 1)) <= 1e-11 * max_coeff(u));
  }
}

TEST_CASE("riesz transforms") {
  const Grid g = Grid::make(3, 16, 2.0);
  const Field f = random_band_limited(g, 1, 3);
  const NormFlavor e = NormFlavor::euclidean(3);
  const Field sum = riesz(riesz(f, 0, e), 0, e) + riesz(riesz(f, 1, e), 1, e) + riesz(riesz(f, 2, e), 2, e);
  Field centered = f;
  cd mean = 0.0;
  for (const cd& v : f.data) mean += v;
  mean /= double(f.points());
  for (auto& v : centered.data) v -= mean;
  CHECK(rel_l2_diff(sum, centered) < 1e-12);

  const int k[3] = {3, 0, 0};
  CHECK(max_abs(riesz(single_mode(g, k), 1, e)) < 1e-13);

  const Grid g2 = Grid::make(2, 16, 2.0);
  const Field f2 = random_band_limited(g2, 1, 4);
  CHECK(rel_l2_diff(riesz(f2, 1, NormFlavor::eps_prime(Material2::identity())), riesz(f2, 1, NormFlavor::euclidean(2))) <
        1e-15);
}

TEST_CASE("leray projection") {
  const Grid g = Grid::make(3, 16, 3.0);
  const Field J = random_band_limited(g, 6, 5);
  const Field P = leray_project(J);
  CHECK(rel_l2_diff(leray_project(P), P) < 1e-12);
  CHECK(max_abs(component_divergence_free_residual(P, 0)) <= 1e-12 * max_coeff(P));
  CHECK(max_abs(component_divergence_free_residual(P, 1)) <= 1e-12 * max_coeff(P));

  const Field phi = random_band_limited(g, 1, 6);
  Field grad(g, 6);
  const NormFlavor e = NormFlavor::euclidean(3);
  for (int a = 0; a < 3; ++a) {
    const Field da = apply_scalar_multiplier(phi, [a](const Wavevector& xi) { return I * xi[a]; }, 0.0);
    grad.insert(a, da);
    grad.insert(3 + a, da);
  }
  (void)e;
  CHECK(max_abs(leray_project(grad)) < 1e-12 * max_abs(grad));
}

TEST_CASE("fractional laplacian") {
  const Grid g = Grid::make(2, 32, 4.0);
  Field f = random_band_limited(g, 1, 7);
  Field c = to_spectrum(f);
  c.data[0] = 0.0;
  f = from_spectrum(c);
  CHECK(rel_l2_diff(fractional_laplacian(f, 0.0), f) < 1e-13);
  CHECK(rel_l2_diff(fractional_laplacian(fractional_laplacian(f, 1.0), -1.0), f) < 1e-12);
  const int k[3] = {2, -3, 0};
  const Field m = single_mode(g, k);
  const double r = std::hypot(2 * pi * 2 / 4.0, 2 * pi * 3 / 4.0);
  CHECK(rel_l2_diff(fractional_laplacian(m, 0.7), std::pow(r, 0.7) * m) < 1e-13);
  Field shifted = f;
  for (auto& v : shifted.data) v += 1.0;
  CHECK_THROWS_WITH_AS(fractional_laplacian(shifted, -1.0), doctest::Contains("MeanNotZero"), Error);
}

TEST_CASE("divergence and charges") {
  const Grid g = Grid::make(3, 16, 3.0);
  const Field J = leray_project(random_band_limited(g, 6, 8));
  const Charges ch = divergence_and_charges(J);
  CHECK(max_abs(ch.rho_e) < 1e-12 * max_abs(J));
  CHECK(max_abs(ch.rho_m) < 1e-12 * max_abs(J));

  const Field phi = random_band_limited(g, 1, 9);
  Field grad(g, 6);
  for (int a = 0; a < 3; ++a)
    grad.insert(a, apply_scalar_multiplier(phi, [a](const Wavevector& xi) { return I * xi[a]; }, 0.0));
  const Field lap = apply_scalar_multiplier(phi, [](const Wavevector& xi) { return cd(-xi.squaredNorm()); }, 0.0);
  CHECK(rel_l2_diff(divergence_and_charges(grad).rho_e, lap) < 1e-12);
  const Field rho_hat = to_spectrum(divergence_and_charges(grad).rho_e);
  CHECK(std::abs(rho_hat.data[0]) < 1e-14 * max_abs(rho_hat));

  const Grid g2 = Grid::make(2, 16, 3.0);
  const Charges c2 = divergence_and_charges(random_band_limited(g2, 3, 10));
  CHECK(max_abs(c2.rho_m) == 0.0);
}

TEST_CASE("charge split") {
  const cd w(0.8, 0.45);
  const Grid g = Grid::make(2, 32, 5.0);
  const Field J = random_band_limited(g, 3, 12);
  auto charge_part = [&](const Material2& mat) {
    Field c = to_spectrum(J);
    for (std::size_t p = 0; p < g.points(); ++p) {
      if (p == 0) {
        for (int k = 0; k < 3; ++k) c.at(k, p) = 0.0;
        continue;
      }
      const auto v = charge_column_2d(w, g.wavevector_at(p), mat, {c.at(0, p), c.at(1, p), c.at(2, p)});
      for (int k = 0; k < 3; ++k) c.at(k, p) = v[k];
    }
    return from_spectrum(c);
  };
  for (const Material2& mat : {Material2::identity(), Material2(2.0, 0.0, 2.0, 1.3)}) {
    const Field d = solve(w, J, mat) - solve(w, leray_project(J), mat);
    CHECK(rel_l2_diff(d, charge_part(mat)) < 1e-11);
  }

  // Anisotropic: a gradient current also drives H, which the charge column never does.
  const Material2 mat(2.0, 0.4, 0.8, 1.7);
  const Field grad = J - leray_project(J);
  const Field u = solve(w, grad, mat);
  CHECK(max_abs(charge_part(mat).extract(2)) == 0.0);
  CHECK(l2_norm(u.extract(2)) > 1e-3 * l2_norm(u));
}

TEST_CASE("half laplacian resolvent") {
  const Grid g = Grid::make(2, 16, 2.0);
  const int k[3] = {1, 2, 0};
  const Field m = single_mode(g, k);
  const Material2 mat(2.0, 0.4, 0.8, 1.7);
  const NormFlavor fl = NormFlavor::eps_prime(mat);
  const cd w(0.4, 0.3);
  const double r = fl(g.wavevector_at(g.flatten(std::array<int, 3>{1, 2, 0}.data())));
  CHECK(rel_l2_diff(half_laplacian_resolvent(m, w, 1, fl), (1.0 / (w + r)) * m) < 1e-13);
  const Field f = random_band_limited(g, 1, 11);
  const Field back = apply_scalar_multiplier(half_laplacian_resolvent(f, w, 1, fl),
                                             [&](const Wavevector& xi) { return w + fl(xi); }, w);
  CHECK(rel_l2_diff(back, f) < 1e-13);
  CHECK_THROWS_AS(half_laplacian_resolvent(f, cd(1.0), 1, fl), Error);
}

TEST_CASE("lebesgue norms") {
  const Grid g = Grid::make(3, 8, 1.0);
  Field one(g, 1);
  for (auto& v : one.data) v = 1.0;
  for (double p : {1.0, 2.0, 3.5, double(INFINITY)}) CHECK(lebesgue_norm(one, p) == doctest::Approx(1.0).epsilon(1e-14));
  const Field f = random_band_limited(g, 6, 12);
  CHECK(lebesgue_norm(cd(0, -3) * f, 3.0) == doctest::Approx(3.0 * lebesgue_norm(f, 3.0)).epsilon(1e-13));
}

TEST_CASE("rotation equivariance about the distinguished axis") {
  const Grid g = Grid::make(3, 16, {3.0, 4.0, 4.0});
  const Material3 mat = Material3::from_ab(4, 1);
  const Field J = random_band_limited(g, 6, 13);
  const cd w(0.7, 0.25);
  const Field a = solve(w, quarter_turn(J), mat);
  const Field b = quarter_turn(solve(w, J, mat));
  CHECK(rel_l2_diff(a, b) < 1e-11);
}

TEST_CASE("scaling covariance") {
  const Material3 mat(2.0, 0.5, 3, 1.5);
  const Grid g = Grid::make(3, 16, {3.0, 4.0, 5.0});
  const double lambda = 2.5;
  const Grid gl = Grid::make(3, 16, {3.0 / lambda, 4.0 / lambda, 5.0 / lambda});
  const Field J = random_band_limited(g, 6, 14);
  Field Jl = J;
  Jl.grid = gl;
  const cd w(0.7, -0.25);
  Field ref = solve(w, J, mat);
  ref.grid = gl;
  CHECK(rel_l2_diff(solve(lambda * w, Jl, mat), (1.0 / lambda) * ref) < 1e-11);
}

TEST_CASE("2D v-construction") {
  const Material2 mat(2.0, 0.4, 0.8, 1.7);
  const NormFlavor fl = NormFlavor::eps_prime(mat);
  const Grid g = Grid::make(2, 32, 6.0);
  const Field f = random_band_limited(g, 1, 15);
  const cd w(1.1, 0.3);
  Field v(g, 3);
  v.insert(0, -2.0 * riesz(f, 1, fl));
  v.insert(1, 2.0 * riesz(f, 0, fl));
  const Field u = solve(w, v, mat);

  const Field em = half_laplacian_resolvent(f, w, -1, fl), ep = half_laplacian_resolvent(f, w, 1, fl);
  Field literal(g, 3);
  literal.insert(0, -1.0 * riesz(em + ep, 1, fl));
  literal.insert(1, riesz(em + ep, 0, fl));
  literal.insert(2, mat.mu() * (ep - em));
  CHECK(rel_l2_diff(u, -I * literal) < 1e-10);
}

TEST_CASE("3D example vector") {
  const Grid g = Grid::make(3, 16, 4.0);
  const Field f = random_band_limited(g, 1, 16);
  const NormFlavor e = NormFlavor::euclidean(3);
  const cd w(0.9, 0.35);
  for (const Material3& mat : {Material3::from_ab(1, 1), Material3::from_ab(4, 1), Material3::from_ab(0.5, 3)}) {
    const double sb = std::sqrt(mat.b());
    Field J(g, 6);
    J.insert(1, -1.0 * riesz(f, 2, e));
    J.insert(2, riesz(f, 1, e));
    const Field u = solve(w, J, mat);

    const NormFlavor fl = NormFlavor::euclidean(3, mat.b());
    const Field em = half_laplacian_resolvent(f, w, -1, fl), ep = half_laplacian_resolvent(f, w, 1, fl);
    const Field s = em + ep, d = em - ep;
    Field literal(g, 6);
    literal.insert(1, -1.0 * riesz(s, 2, e));
    literal.insert(2, riesz(s, 1, e));
    literal.insert(3, -1.0 * (riesz(riesz(d, 1, e), 1, e) + riesz(riesz(d, 2, e), 2, e)));
    literal.insert(4, riesz(riesz(d, 0, e), 1, e));
    literal.insert(5, riesz(riesz(d, 0, e), 2, e));
    literal = I * literal;

    Field exact(g, 6);
    for (int c = 0; c < 3; ++c) exact.insert(c, -0.5 * literal.extract(c));
    for (int c = 3; c < 6; ++c) exact.insert(c, (-0.5 * sb) * literal.extract(c));
    CHECK(rel_l2_diff(u, exact) < 1e-10);
  }
}
