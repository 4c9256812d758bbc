#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mxw/region.hpp"
#include "mxw/spectral.hpp"

namespace mxw {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

// 1 for t <= 0, 0 for t >= 1, C-infinity in between (built from exp(-1/t)).
double smooth_step(double t);

struct CutoffSpec {
  double r_in = 1.0;
  double r_out = 2.0;

  static CutoffSpec make(double r_in, double r_out);
  double operator()(double r) const { return smooth_step((r - r_in) / (r_out - r_in)); }
};

// A source on R^d described by its Fourier transform. `eval` writes
// ncomp values per node: out[q * ncomp + c].
struct SpectralSource {
  int dim = 2;
  int ncomp = 1;
  double plateau_radius = 0.0;  // spectrum is unwindowed for |xi| <= plateau_radius
  double support_radius = 0.0;  // and vanishes for |xi| >= support_radius
  std::array<double, 3> box_lo{0, 0, 0}, box_hi{0, 0, 0};  // where the spatial mass sits
  std::function<void(const double* nodes, std::size_t nq, cd* out)> eval;
};

// Band-limited extension of grid samples, f^(xi) = h^d sum_j f(x_j) exp(-i x_j xi),
// times a smooth radial window that is 1 below `plateau` and 0 above `support`
// (defaults: 0.7 and 0.95 of the smallest Nyquist radius pi/h).
SpectralSource grid_source(const Field& f, double plateau = -1.0, double support = -1.0,
                           Exec exec = Exec::parallel);

// Analytic spectrum; `fn` must vanish (to rounding) for |xi| >= support.
SpectralSource function_source(int dim, int ncomp, double support, double spatial_radius,
                               std::function<void(const Wavevector&, cd*)> fn);

// Angular rule on {||xi||_G = omega}. delta_weights integrate F(xi) delta(||xi||_G - omega) dxi,
// area_weights integrate F dsigma.
struct SurfaceQuadrature {
  int dim = 2;
  std::vector<double> nodes;
  std::vector<double> delta_weights;
  std::vector<double> area_weights;

  std::size_t size() const { return delta_weights.size(); }
  static SurfaceQuadrature make(const NormFlavor& flavor, double omega, int angular);
};

struct LapOptions {
  int angular = 0;          // 0 chooses from the phase scale; else phi nodes (2D) / theta nodes (3D)
  int order = 12;           // Gauss-Legendre nodes per regular radial panel
  double refine = 1.0;      // scales every node count
  double delta0 = 0.1;      // extrapolation ladder delta_k = delta0 2^-k
  int levels = 7;           // k = 0 .. levels-1
  double tolerance = 1e-5;  // cross-validation and convergence bound
  Exec exec = Exec::parallel;
};

enum class LapMethod { extrapolate, quadrature };

// Scalar pieces, all including the (2 pi)^-d inverse-transform factor.
Field e_delta(const SpectralSource& f, const Grid& out, double omega, double delta, int sign,
              const CutoffSpec& beta, const NormFlavor& flavor, const LapOptions& opts = {});
Field pv_part(const SpectralSource& f, const Grid& out, double omega, const CutoffSpec& beta,
              const NormFlavor& flavor, const LapOptions& opts = {});
// sign * i pi * (2 pi)^-d int beta f^ e^{ix xi} delta(||xi|| - omega) dxi, so that
// e_delta -> pv_part + surface_part as delta -> 0.
Field surface_part(const SpectralSource& f, const Grid& out, double omega, int sign, const CutoffSpec& beta,
                   const SurfaceQuadrature& quad, const LapOptions& opts = {});

// Limiting resolvent P_sign(omega) J. The source/grid overloads need a canonical
// Material3; the Field overloads canonicalize.
Field lap_solve(double omega, const SpectralSource& J, const Grid& out, const Material2& mat, int sign,
                LapMethod method, const CutoffSpec& beta, const LapOptions& opts = {});
Field lap_solve(double omega, const SpectralSource& J, const Grid& out, const Material3& mat, int sign,
                LapMethod method, const CutoffSpec& beta, const LapOptions& opts = {});
Field lap_solve(double omega, const Field& J, const Material2& mat, int sign, LapMethod method,
                const CutoffSpec& beta, const LapOptions& opts = {});
Field lap_solve(double omega, const Field& J, const Material3& mat, int sign, LapMethod method,
                const CutoffSpec& beta, const LapOptions& opts = {});

struct LapCrossCheck {
  Field extrapolate;
  Field quadrature;
  double rel_diff = 0.0;
};
// Runs both methods; throws MethodsDisagree when rel_diff > opts.tolerance.
LapCrossCheck lap_cross_validate(double omega, const SpectralSource& J, const Grid& out, const Material2& mat,
                                 int sign, const CutoffSpec& beta, const LapOptions& opts = {});
LapCrossCheck lap_cross_validate(double omega, const SpectralSource& J, const Grid& out, const Material3& mat,
                                 int sign, const CutoffSpec& beta, const LapOptions& opts = {});

// Sum over singular spheres of the surface-delta contributions for `sign`;
// P_+ - P_- equals twice the value for sign = +1.
Field lap_surface_terms(double omega, const SpectralSource& J, const Grid& out, const Material2& mat, int sign,
                        const CutoffSpec& beta, const LapOptions& opts = {});
Field lap_surface_terms(double omega, const SpectralSource& J, const Grid& out, const Material3& mat, int sign,
                        const CutoffSpec& beta, const LapOptions& opts = {});

// p(omega, xi) applied under the integral of the limiting solution, compared
// with the source itself sampled on `out`. Returns the relative L2 defect.
double lap_forward_residual(double omega, const SpectralSource& J, const Grid& out, const Material2& mat, int sign,
                            LapMethod method, const CutoffSpec& beta, const LapOptions& opts = {});
double lap_forward_residual(double omega, const SpectralSource& J, const Grid& out, const Material3& mat, int sign,
                            LapMethod method, const CutoffSpec& beta, const LapOptions& opts = {});

// The source sampled on `out`: (2 pi)^-d int J^(xi) e^{ix xi} dxi.
Field synthesize_source(const SpectralSource& J, const Grid& out, const LapOptions& opts = {});

// Lattice high-frequency part: solve(omega + i sign delta, (1 - beta(D)) J).
Field high_part(double omega, double delta, int sign, const Field& J, const Material2& mat, const CutoffSpec& beta);
Field high_part(double omega, double delta, int sign, const Field& J, const Material3& mat, const CutoffSpec& beta);

struct BlowupProbe {
  std::vector<double> deltas;
  std::vector<double> ratios;
  LineFit fit;
};
// Lattice lower bound for ||P(omega + i sign delta)^-1||_{p->q} using the v-construction
// on an annulus of lattice modes with | ||xi||_eps' - omega | <= width. The slope is
// expected near -gamma.
BlowupProbe lap_blowup_probe(double omega, const LebesguePair& pair, const Material2& mat,
                             const std::vector<double>& deltas, const Grid& grid, double width, int sign = 1);

}  // namespace mxw
