#pragma once

#include <string>
#include <vector>

#include "mxw/field.hpp"
#include "mxw/symbol.hpp"

namespace mxw {

// (x, y) = (1/p, 1/q) in the unit square, for dimension d. Pairs built by
// `rational` keep x = num_x/den, y = num_y/den exactly, and the exponent and
// membership arithmetic is then done in integers.
struct LebesguePair {
  double x = 0.5;
  double y = 0.5;
  int d = 2;
  long long num_x = 0, num_y = 0, den = 0;

  static LebesguePair make(double x, double y, int d);
  static LebesguePair rational(long long num_x, long long num_y, long long den, int d);
  bool exact() const { return den > 0; }
  LebesguePair dual() const;
};

double gamma_exponent(const LebesguePair& pr);
// alpha = 1 - d (x - y); kappa = |omega|^(gamma - alpha) dist^(-gamma).
double alpha_exponent(const LebesguePair& pr);

enum class KappaVariant { real_axis, ray };
double kappa(const LebesguePair& pr, cd omega, KappaVariant variant = KappaVariant::real_axis);

enum class RegionSet { R0_half, R1, P };
bool membership(const LebesguePair& pr, RegionSet set);
const char* region_set_name(RegionSet set);

struct RegionQuery {
  LebesguePair pair;
  double ell = 1.0;
  double C = 1.0;  // estimate constant; not known analytically
  double t = 0.5;
};

// omega in Z(ell) iff kappa(omega) <= ell. Throws EmptyRegion when alpha = 0 and ell < 1.
bool z_region(const RegionQuery& q, cd omega);

struct ZBoundary {
  enum class Kind { curve, cone, whole_plane } kind = Kind::curve;
  // Z lies outside the curve when alpha > 0 and inside when alpha < 0; for a cone it
  // is the double sector |sin arg omega| >= cone_sine.
  bool outside = true;
  double cone_sine = 0.0;
  // Four polylines, one per quadrant, each ordered by increasing |arg| from the real axis.
  std::vector<std::vector<cd>> polylines;
};
// The level set kappa = ell, sampled at `resolution` angles per quadrant; rays and
// curves are clipped at |omega| <= radius_cap.
ZBoundary z_boundary(const RegionQuery& q, int resolution, double radius_cap = 10.0);

struct Enclosure {
  double exponent = 0.0;  // pq / (q - p)
  double norm = 0.0;
  double threshold = 0.0;  // t / (C ell)
  bool satisfied = false;
  bool in_R0_half = false, in_R1 = false, in_P = false;
  std::string statement;
};
// Throws ExponentOrder unless q > p, i.e. y < x.
Enclosure eigenvalue_enclosure(const RegionQuery& q, const Field& V);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the log residuals
  int points = 0;
};
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

enum class ProbeFamily { annulus, knapp, radial };
enum class ProbeSweep { dist, modulus };
const char* probe_family_name(ProbeFamily f);

struct ProbeSetup {
  int n = 64;
  double length = 120.0;
  double width = 1e-9;  // annulus half-width in frequency units
  double a = 1.0, b = 1.0;  // 3D material (canonical); the annulus family uses eps = I, mu = 1
};

struct ScalingProbe {
  std::vector<cd> omegas;
  std::vector<double> abscissa;  // dist(omega, R) or |omega|
  std::vector<double> ratios;    // ||u||_q / ||J||_p
  LineFit fit;
};

// Lattice v-construction on the modes with | ||xi||_eps' - |Re omega| | <= width.
double annulus_ratio(const LebesguePair& pr, cd omega, const Material2& mat, const Grid& grid, double width);
// Ratio ||solve(omega, J)||_q / ||J||_p for one family member.
double probe_ratio(const LebesguePair& pr, ProbeFamily family, cd omega, const ProbeSetup& setup);
ScalingProbe norm_scaling_probe(const LebesguePair& pr, ProbeFamily family, const std::vector<cd>& omegas,
                                ProbeSweep sweep, const ProbeSetup& setup = {});

}  // namespace mxw
