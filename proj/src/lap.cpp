#include "mxw/lap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace mxw {

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre rule needs at least one node");
  static std::mutex mtx;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const unsigned un = static_cast<unsigned>(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double pn = std::legendre(un, x);
      const double pm = n > 1 ? std::legendre(un - 1, x) : 1.0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double pn = std::legendre(un, x);
    const double pm = n > 1 ? std::legendre(un - 1, x) : 1.0;
    dp = n * (x * pn - pm) / (x * x - 1.0);
    rule.x[i] = x;
    rule.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double smooth_step(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

CutoffSpec CutoffSpec::make(double r_in, double r_out) {
  if (!(r_in > 0.0) || !(r_out > r_in) || !std::isfinite(r_out))
    throw Error(ErrorKind::InvalidArgument, "cutoff needs 0 < r_in < r_out");
  return CutoffSpec{r_in, r_out};
}

namespace {

double inv_two_pi_pow(int d) { return std::pow(2.0 * pi, -d); }

double norm_of(const double* v, int d) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += v[a] * v[a];
  return std::sqrt(s);
}

Wavevector to_wavevector(const double* v, int d) {
  Wavevector xi(d);
  for (int a = 0; a < d; ++a) xi(a) = v[a];
  return xi;
}

// Nodes, their coefficients and the final synthesis.
struct Accum {
  int dim;
  int ncomp;
  std::vector<double> nodes;
  std::vector<cd> coef;

  std::size_t size() const { return coef.size() / ncomp; }

  // fill(q, xi, source values, out coefficients)
  template <class F>
  void add(const SpectralSource& src, const std::vector<double>& xs, F&& fill) {
    const std::size_t nq = xs.size() / dim;
    if (nq == 0) return;
    std::vector<cd> vals(nq * src.ncomp);
    src.eval(xs.data(), nq, vals.data());
    const std::size_t base = size();
    coef.resize((base + nq) * ncomp);
    const long long n = static_cast<long long>(nq);
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < n; ++q)
      fill(static_cast<std::size_t>(q), xs.data() + q * dim, vals.data() + q * src.ncomp,
           coef.data() + (base + q) * ncomp);
    nodes.insert(nodes.end(), xs.begin(), xs.end());
  }

  Field synthesize(const Grid& g, Exec exec) const {
    Field f(g, ncomp);
    nonuniform_synthesis(g, ncomp, nodes.data(), coef.data(), size(), f.data.data(), exec);
    return f;
  }
};

struct Frame {
  Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
  double det_s = 1.0;
};

Frame make_frame(const RMat& g) {
  const int d = static_cast<int>(g.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(g)};
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorKind::InvalidArgument, "norm matrix must be positive definite");
  Frame fr;
  fr.s.setIdentity();
  fr.s.topLeftCorner(d, d) = es.operatorInverseSqrt();
  fr.det_s = 1.0 / std::sqrt(es.eigenvalues().prod());
  return fr;
}

struct Ray {
  Eigen::Vector3d u;
  double w;
};

// 2D: n-point trapezoid in phi. 3D: n Gauss nodes in theta (weight sin theta)
// times 2n trapezoid nodes in phi, u = (cos t, sin t cos p, sin t sin p).
std::vector<Ray> angular_rule(int dim, int n) {
  std::vector<Ray> rays;
  if (dim == 2) {
    rays.reserve(n);
    for (int j = 0; j < n; ++j) {
      const double phi = 2.0 * pi * (j + 0.5) / n;
      rays.push_back({Eigen::Vector3d(std::cos(phi), std::sin(phi), 0.0), 2.0 * pi / n});
    }
    return rays;
  }
  const GaussRule& gl = gauss_legendre(n);
  const int nphi = 2 * n;
  rays.reserve(static_cast<std::size_t>(n) * nphi);
  for (int i = 0; i < n; ++i) {
    const double th = 0.5 * pi * (gl.x[i] + 1.0);
    const double wt = 0.5 * pi * gl.w[i] * std::sin(th);
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2.0 * pi * (j + 0.5) / nphi;
      rays.push_back({Eigen::Vector3d(std::cos(th), std::sin(th) * std::cos(phi), std::sin(th) * std::sin(phi)),
                      wt * 2.0 * pi / nphi});
    }
  }
  return rays;
}

// Largest distance between a point of the source box and a point of the output box.
double phase_scale(const SpectralSource& src, const Grid& out) {
  double s = 0.0;
  for (int a = 0; a < out.dim; ++a) {
    const double lo = 0.0, hi = out.length[a] - out.spacing(a);
    const double e = std::max(std::abs(hi - src.box_lo[a]), std::abs(src.box_hi[a] - lo));
    s += e * e;
  }
  return std::sqrt(s);
}

int scaled(double n, double refine) { return std::max(1, static_cast<int>(std::ceil(n * refine))); }

// Number of nodes per full circle resolving exp(i X R cos phi).
int angular_count(int dim, double X, double R, const LapOptions& opts) {
  if (opts.angular > 0) return scaled(opts.angular, opts.refine);
  const double k = X * R;
  const double full = k + 10.0 * std::cbrt(k) + 16.0;
  if (dim == 2) {
    int n = scaled(full, opts.refine);
    return n + (n % 2);
  }
  return scaled(0.5 * full, opts.refine);
}

constexpr int transition_panels = 4;
constexpr int transition_order = 16;
constexpr int central_order = 20;
constexpr int graded_order = 10;
constexpr double max_phase_per_panel = 10.0;

using RadialList = std::vector<std::pair<double, cd>>;

template <class K>
void add_panel(RadialList& out, double a, double b, int order, const K& kernel) {
  const GaussRule& gl = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < gl.x.size(); ++i) {
    const double r = mid + half * gl.x[i];
    out.emplace_back(r, half * gl.w[i] * kernel(r));
  }
}

template <class K>
void add_uniform(RadialList& out, double a, double b, double max_w, int min_panels, int order, const K& kernel) {
  if (!(b > a)) return;
  const int n = std::max(min_panels, static_cast<int>(std::ceil((b - a) / max_w)));
  for (int p = 0; p < n; ++p) add_panel(out, a + (b - a) * p / n, a + (b - a) * (p + 1) / n, order, kernel);
}

// Panels on [a, b] whose widths grow geometrically from `first` away from `from`
// (which is a or b), capped at max_w.
template <class K>
void add_graded(RadialList& out, double a, double b, double from, double first, double max_w, int order,
                const K& kernel) {
  if (!(b > a)) return;
  double w = std::min(first, max_w);
  double done = 0.0;
  const double len = b - a;
  while (done < len) {
    double step = std::min(w, len - done);
    if (len - done - step < 0.5 * step) step = len - done;
    if (from == a)
      add_panel(out, a + done, a + done + step, order, kernel);
    else
      add_panel(out, b - done - step, b - done, order, kernel);
    done += step;
    w = std::min(2.0 * w, max_w);
  }
}

// Radial layout along one ray, in units of the flavor radius r.
struct RaySegments {
  double rho;
  double T;       // half-width of the symmetric window around rho
  double r_pl;    // cutoff plateau edge
  double r_max;   // cutoff support edge
  double max_w;   // longest regular panel
  int order;
  int ntr;
  int tr_order;
};

template <class K>
void add_outer(RadialList& out, const RaySegments& s, const K& kernel) {
  if (s.rho - s.T > 1e-12 * s.rho)
    add_graded(out, 0.0, s.rho - s.T, s.rho - s.T, s.T, s.max_w, s.order, kernel);
  add_graded(out, s.rho + s.T, s.r_pl, s.rho + s.T, s.T, s.max_w, s.order, kernel);
  add_uniform(out, s.r_pl, s.r_max, s.max_w, s.ntr, s.tr_order, kernel);
}

// cpv / (r - rho) in the principal-value sense plus csurf * delta(r - rho).
RadialList pv_radial(const RaySegments& s, cd cpv, cd csurf) {
  RadialList out;
  add_outer(out, s, [&](double r) { return cpv / (r - s.rho); });
  RadialList pairs;
  add_uniform(pairs, 0.0, s.T, s.max_w, 1, s.order, [](double) { return cd(1.0); });
  for (const auto& [t, w] : pairs) {
    out.emplace_back(s.rho + t, cpv * w / t);
    out.emplace_back(s.rho - t, -cpv * w / t);
  }
  if (csurf != cd(0.0)) out.emplace_back(s.rho, csurf);
  return out;
}

// Regular kernel that is sharply peaked (width >= delta_min) at rho.
template <class K>
RadialList graded_radial(const RaySegments& s, double delta_min, int refine_order_c, int refine_order_g,
                         const K& kernel) {
  RadialList out;
  add_outer(out, s, kernel);
  const double dc = std::min(0.5 * delta_min, 0.5 * s.T);
  add_panel(out, s.rho - dc, s.rho + dc, refine_order_c, kernel);
  double a = dc;
  while (a < s.T) {
    double b = std::min(2.0 * a, s.T);
    if (s.T - b < 0.5 * (b - a)) b = s.T;
    add_uniform(out, s.rho + a, s.rho + b, s.max_w, 1, refine_order_g, kernel);
    add_uniform(out, s.rho - b, s.rho - a, s.max_w, 1, refine_order_g, kernel);
    a = b;
  }
  return out;
}

struct Ladder {
  std::vector<double> deltas;
  std::vector<double> weights;  // Lagrange weights for extrapolation to delta = 0
};

Ladder make_ladder(const LapOptions& opts) {
  if (opts.levels < 2 || !(opts.delta0 > 0.0))
    throw Error(ErrorKind::InvalidArgument, "extrapolation needs delta0 > 0 and at least two levels");
  Ladder l;
  for (int k = 0; k < opts.levels; ++k) l.deltas.push_back(opts.delta0 * std::ldexp(1.0, -k));
  for (int k = 0; k < opts.levels; ++k) {
    double w = 1.0;
    for (int j = 0; j < opts.levels; ++j)
      if (j != k) w *= l.deltas[j] / (l.deltas[j] - l.deltas[k]);
    l.weights.push_back(w);
  }
  return l;
}

struct Context {
  int dim;
  const SpectralSource& src;
  const Grid& out;
  const CutoffSpec& beta;
  const LapOptions& opts;
  double X;
};

Context make_context(const SpectralSource& src, const Grid& out, const CutoffSpec& beta, const LapOptions& opts) {
  if (src.dim != out.dim) throw Error(ErrorKind::InvalidArgument, "source and output dimensions differ");
  if (!src.eval) throw Error(ErrorKind::InvalidArgument, "source has no spectrum");
  if (!(opts.refine > 0.0) || opts.order < 2) throw Error(ErrorKind::InvalidArgument, "invalid quadrature options");
  // Rays in the singular-sphere coordinates have no breakpoints at the source window.
  if (src.plateau_radius < src.support_radius && beta.r_out > src.plateau_radius * (1.0 + 1e-12))
    throw Error(ErrorKind::InvalidArgument, "cutoff support must lie inside the plateau of the source window");
  return Context{out.dim, src, out, beta, opts, std::max(phase_scale(src, out), 1e-3)};
}

// One term integrated in the polar coordinates of the norm G: xi = r S u.
// radial(segments) gives the radial nodes with kernel and weight; dir(v) gives
// the matrix attached to the ray direction v (unit Euclidean).
template <class RadialFn, class DirFn, class Pre>
void add_flavor_term(Accum& acc, const Context& cx, const RMat& g, double rho, const RadialFn& radial,
                     const DirFn& dir, const Pre& pre) {
  const int d = cx.dim;
  const Frame fr = make_frame(g);
  const LapOptions& o = cx.opts;
  // In Euclidean terms the nodes reach r_out.
  const auto rays = angular_rule(d, angular_count(d, cx.X, cx.beta.r_out, o));
  const double norm = inv_two_pi_pow(d);
  const int order = scaled(o.order, o.refine);
  const int ntr = scaled(transition_panels, o.refine);

  std::vector<double> xs;
  std::vector<cd> fac;
  std::vector<int> ray_of;
  std::vector<SymbolMatrix> mats;
  mats.reserve(rays.size());
  for (std::size_t k = 0; k < rays.size(); ++k) {
    const Eigen::Vector3d v = fr.s * rays[k].u;
    const double c = v.norm();
    RaySegments seg;
    seg.rho = rho;
    seg.r_pl = cx.beta.r_in / c;
    seg.r_max = cx.beta.r_out / c;
    if (!(rho < seg.r_pl * (1.0 - 1e-12)))
      throw Error(ErrorKind::InvalidArgument, "singular sphere must lie inside the cutoff plateau");
    seg.T = std::min(rho, seg.r_pl - rho);
    seg.max_w = max_phase_per_panel / (cx.X * c) / o.refine;
    seg.order = order;
    seg.ntr = ntr;
    seg.tr_order = scaled(transition_order, o.refine);
    const RadialList rad = radial(seg);
    Wavevector unit(d);
    for (int a = 0; a < d; ++a) unit(a) = v(a) / c;
    mats.push_back(dir(unit));
    for (const auto& [r, kw] : rad) {
      for (int a = 0; a < d; ++a) xs.push_back(r * v(a));
      fac.push_back(norm * rays[k].w * fr.det_s * std::pow(r, d - 1) * cx.beta(r * c) * kw);
      ray_of.push_back(static_cast<int>(k));
    }
  }
  acc.add(cx.src, xs, [&](std::size_t q, const double* xi, const cd* in, cd* outc) {
    SymbolMatrix m = fac[q] * mats[ray_of[q]];
    pre(xi, m);
    const int nc = static_cast<int>(m.rows());
    for (int r = 0; r < nc; ++r) {
      cd s = 0.0;
      for (int c = 0; c < nc; ++c) s += m(r, c) * in[c];
      outc[r] = s;
    }
  });
}

// Euclidean polar nodes over the whole source support; node(xi, m) sets the
// matrix at xi.
template <class NodeFn>
void add_euclidean(Accum& acc, const Context& cx, const NodeFn& node) {
  const int d = cx.dim;
  const LapOptions& o = cx.opts;
  const double R = cx.src.support_radius;
  const auto rays = angular_rule(d, angular_count(d, cx.X, R, o));
  const double max_w = max_phase_per_panel / cx.X / o.refine;
  const int order = scaled(o.order, o.refine);
  const int ntr = scaled(transition_panels, o.refine);

  std::vector<double> brk{0.0, R};
  for (double b : {cx.beta.r_in, cx.beta.r_out, cx.src.plateau_radius})
    if (b > 0.0 && b < R) brk.push_back(b);
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end()), brk.end());
  auto is_transition = [&](double a, double b) {
    return (a >= cx.beta.r_in && b <= cx.beta.r_out) || (a >= cx.src.plateau_radius && b <= R);
  };
  RadialList rad;
  const int tr_order = scaled(transition_order, o.refine);
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
    const bool tr = is_transition(brk[i], brk[i + 1]);
    add_uniform(rad, brk[i], brk[i + 1], max_w, tr ? ntr : 1, tr ? tr_order : order, [](double) { return cd(1.0); });
  }

  const double norm = inv_two_pi_pow(d);
  std::vector<double> xs;
  std::vector<double> fac;
  xs.reserve(rays.size() * rad.size() * d);
  for (const Ray& ray : rays)
    for (const auto& [r, w] : rad) {
      for (int a = 0; a < d; ++a) xs.push_back(r * ray.u(a));
      fac.push_back(norm * ray.w * std::pow(r, d - 1) * w.real());
    }
  acc.add(cx.src, xs, [&](std::size_t q, const double* xi, const cd* in, cd* outc) {
    SymbolMatrix m;
    if (!node(xi, m)) {
      for (int c = 0; c < acc.ncomp; ++c) outc[c] = fac[q] * in[c];
      return;
    }
    const int nc = static_cast<int>(m.rows());
    for (int r = 0; r < nc; ++r) {
      cd s = 0.0;
      for (int c = 0; c < nc; ++c) s += m(r, c) * in[c];
      outc[r] = fac[q] * s;
    }
  });
}

std::vector<cd> scalar_list(const Scalars2& s) { return {s.A, s.B}; }
std::vector<cd> scalar_list(const Scalars3& s) { return {s.A, s.B, s.C, s.D}; }

template <class Mat>
void check_problem(double omega, int sign, const SpectralSource& J, const Grid& out) {
  constexpr int d = std::is_same_v<Mat, Material2> ? 2 : 3;
  if (omega == 0.0 || !std::isfinite(omega)) throw Error(ErrorKind::InvalidArgument, "omega must be real and nonzero");
  if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidArgument, "sign must be +1 or -1");
  if (J.dim != d || out.dim != d) throw Error(ErrorKind::InvalidArgument, "dimension does not match the material");
  if (J.ncomp != ncomp_for_dim(d)) throw Error(ErrorKind::InvalidArgument, "source has the wrong number of components");
}

void check_material(const Material2&) {}
void check_material(const Material3& m) {
  if (!m.canonical()) throw Error(ErrorKind::InvalidArgument, "spectral-source solver needs a canonical material");
}

// Limiting solution, optionally with p(omega, xi) applied under the integral.
template <class Mat>
Field assemble(double omega, const SpectralSource& J, const Grid& out, const Mat& mat, int sign, LapMethod method,
               const CutoffSpec& beta, const LapOptions& opts, bool premultiply) {
  check_problem<Mat>(omega, sign, J, out);
  check_material(mat);
  const Context cx = make_context(J, out, beta, opts);
  const int d = cx.dim;
  const int nc = ncomp_for_dim(d);
  const double rho = std::abs(omega);
  const auto sing = singular_scalars(omega, d);
  const Ladder ladder = method == LapMethod::extrapolate ? make_ladder(opts) : Ladder{};

  auto pre = [&](const double* xi, SymbolMatrix& m) {
    if (premultiply) m = symbol_p(cd(omega), to_wavevector(xi, d), mat) * m;
  };

  Accum acc{d, nc, {}, {}};
  for (int k : sing) {
    const double o = (k % 2 == 0) ? 1.0 : -1.0;
    const RMat g = scalar_norm_matrix(k, mat);
    auto dir = [&](const Wavevector& u) { return inverse_symbol_parts(u, mat).w[k]; };
    if (method == LapMethod::quadrature) {
      auto radial = [&](const RaySegments& s) { return pv_radial(s, I * o, -sign * pi); };
      add_flavor_term(acc, cx, g, rho, radial, dir, pre);
    } else {
      auto kernel = [&](double r) {
        cd s = 0.0;
        for (std::size_t l = 0; l < ladder.deltas.size(); ++l)
          s += ladder.weights[l] / (I * (cd(omega, sign * ladder.deltas[l]) - o * r));
        return s;
      };
      auto radial = [&](const RaySegments& s) {
        return graded_radial(s, ladder.deltas.back(), scaled(central_order, opts.refine),
                             scaled(graded_order, opts.refine), kernel);
      };
      add_flavor_term(acc, cx, g, rho, radial, dir, pre);
    }
  }

  // Scalar coefficients of W_k (and of Wc, last) at frequency w.
  auto coeffs = [&](cd w, const Wavevector& xi, double b, std::vector<cd>& acc_s, cd weight) {
    const std::vector<cd> s = scalar_list(scalar_resolvents(w, xi, mat));
    for (std::size_t k = 0; k < s.size(); ++k) {
      const bool singular = std::find(sing.begin(), sing.end(), static_cast<int>(k)) != sing.end();
      if (!singular)
        acc_s[k] += weight * s[k];
      else if (b < 1.0)
        acc_s[k] += weight * (1.0 - b) * s[k];
    }
    acc_s.back() += weight / (I * w);
  };
  add_euclidean(acc, cx, [&](const double* xp, SymbolMatrix& m) {
    const Wavevector xi = to_wavevector(xp, d);
    const InverseSymbolParts parts = inverse_symbol_parts(xi, mat);
    const double b = beta(xi.norm());
    std::vector<cd> c(parts.w.size() + 1, cd(0.0));
    if (method == LapMethod::quadrature) {
      coeffs(cd(omega), xi, b, c, 1.0);
    } else {
      for (std::size_t l = 0; l < ladder.deltas.size(); ++l)
        coeffs(cd(omega, sign * ladder.deltas[l]), xi, b, c, ladder.weights[l]);
    }
    m = c.back() * parts.wc;
    for (std::size_t k = 0; k < parts.w.size(); ++k) m += c[k] * parts.w[k];
    pre(xp, m);
    return true;
  });
  return acc.synthesize(out, opts.exec);
}

template <class Mat>
Field surface_terms(double omega, const SpectralSource& J, const Grid& out, const Mat& mat, int sign,
                    const CutoffSpec& beta, const LapOptions& opts) {
  check_problem<Mat>(omega, sign, J, out);
  check_material(mat);
  const Context cx = make_context(J, out, beta, opts);
  const int d = cx.dim;
  const int nc = ncomp_for_dim(d);
  const double rho = std::abs(omega);
  const int n_ang = angular_count(d, cx.X, beta.r_out, opts);
  Accum acc{d, nc, {}, {}};
  for (int k : singular_scalars(omega, d)) {
    const SurfaceQuadrature sq = SurfaceQuadrature::make(NormFlavor{scalar_norm_matrix(k, mat)}, rho, n_ang);
    const double norm = inv_two_pi_pow(d) * (-sign * pi);
    acc.add(J, sq.nodes, [&](std::size_t q, const double* xi, const cd* in, cd* outc) {
      const Wavevector v = to_wavevector(xi, d);
      const SymbolMatrix w = inverse_symbol_parts(v, mat).w[k];
      const double c = norm * sq.delta_weights[q] * beta(v.norm());
      for (int r = 0; r < nc; ++r) {
        cd s = 0.0;
        for (int cc = 0; cc < nc; ++cc) s += w(r, cc) * in[cc];
        outc[r] = c * s;
      }
    });
  }
  return acc.synthesize(out, opts.exec);
}

void check_scalar(const SpectralSource& f, const NormFlavor& flavor, double omega) {
  if (f.ncomp != 1) throw Error(ErrorKind::InvalidArgument, "scalar operation needs a one-component source");
  if (flavor.dim() != f.dim) throw Error(ErrorKind::InvalidArgument, "flavor dimension does not match the source");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw Error(ErrorKind::InvalidArgument, "omega must be positive");
}

SymbolMatrix one_by_one(const Wavevector&) { return SymbolMatrix::Identity(1, 1); }
void no_pre(const double*, SymbolMatrix&) {}

Field pv_once(const SpectralSource& f, const Grid& out, double omega, const CutoffSpec& beta, const NormFlavor& flavor,
              const LapOptions& opts) {
  const Context cx = make_context(f, out, beta, opts);
  Accum acc{cx.dim, 1, {}, {}};
  auto radial = [](const RaySegments& s) { return pv_radial(s, cd(1.0), cd(0.0)); };
  add_flavor_term(acc, cx, flavor.g, omega, radial, one_by_one, no_pre);
  return acc.synthesize(out, opts.exec);
}

template <class Mat>
Field lap_field(double omega, const Field& J, const Mat& mat, int sign, LapMethod method, const CutoffSpec& beta,
                const LapOptions& opts) {
  if constexpr (std::is_same_v<Mat, Material2>) {
    return lap_solve(omega, grid_source(J, -1.0, -1.0, opts.exec), J.grid, mat, sign, method, beta, opts);
  } else {
    const Canonicalized c = canonicalize(mat, J);
    const Field u = lap_solve(omega, grid_source(c.currents, -1.0, -1.0, opts.exec), c.currents.grid, c.material,
                              sign, method, beta, opts);
    return c.record.from_canonical(u);
  }
}

template <class Mat>
LapCrossCheck cross(double omega, const SpectralSource& J, const Grid& out, const Mat& mat, int sign,
                    const CutoffSpec& beta, const LapOptions& opts) {
  LapCrossCheck r;
  r.extrapolate = lap_solve(omega, J, out, mat, sign, LapMethod::extrapolate, beta, opts);
  r.quadrature = lap_solve(omega, J, out, mat, sign, LapMethod::quadrature, beta, opts);
  r.rel_diff = rel_l2_diff(r.extrapolate, r.quadrature);
  if (!(r.rel_diff <= opts.tolerance)) {
    std::ostringstream os;
    os << "extrapolation and quadrature differ by " << r.rel_diff << " (tolerance " << opts.tolerance << ")";
    throw Error(ErrorKind::MethodsDisagree, os.str());
  }
  return r;
}

template <class Mat>
double residual(double omega, const SpectralSource& J, const Grid& out, const Mat& mat, int sign, LapMethod method,
                const CutoffSpec& beta, const LapOptions& opts) {
  const Field pu = assemble(omega, J, out, mat, sign, method, beta, opts, true);
  return rel_l2_diff(pu, synthesize_source(J, out, opts));
}

template <class Mat>
Field high(double omega, double delta, int sign, const Field& J, const Mat& mat, const CutoffSpec& beta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidArgument, "sign must be +1 or -1");
  const Field hi = apply_scalar_multiplier(J, [&](const Wavevector& xi) { return cd(1.0 - beta(xi.norm())); },
                                           cd(1.0 - beta(0.0)));
  return solve(cd(omega, sign * delta), hi, mat);
}

}  // namespace

SpectralSource grid_source(const Field& f, double plateau, double support, Exec exec) {
  const Grid& g = f.grid;
  double nyq = std::numeric_limits<double>::infinity();
  for (int a = 0; a < g.dim; ++a) nyq = std::min(nyq, pi / g.spacing(a));
  if (plateau < 0.0) plateau = 0.7 * nyq;
  if (support < 0.0) support = 0.95 * nyq;
  if (!(plateau > 0.0) || !(support > plateau) || support > nyq * (1.0 + 1e-12))
    throw Error(ErrorKind::InvalidArgument, "source window needs 0 < plateau < support <= pi/h");

  SpectralSource s;
  s.dim = g.dim;
  s.ncomp = f.ncomp;
  s.plateau_radius = plateau;
  s.support_radius = support;
  for (int a = 0; a < g.dim; ++a) s.box_hi[a] = g.length[a] - g.spacing(a);
  auto data = std::make_shared<const Field>(f);
  s.eval = [data, plateau, support, exec](const double* nodes, std::size_t nq, cd* out) {
    const int d = data->grid.dim, nc = data->ncomp;
    std::vector<std::size_t> keep;
    std::vector<double> kept;
    for (std::size_t q = 0; q < nq; ++q) {
      if (norm_of(nodes + q * d, d) < support) {
        keep.push_back(q);
        kept.insert(kept.end(), nodes + q * d, nodes + (q + 1) * d);
      }
    }
    std::fill(out, out + nq * nc, cd(0.0));
    std::vector<cd> vals(keep.size() * nc);
    nonuniform_analysis(*data, kept.data(), keep.size(), vals.data(), exec);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      const double w = smooth_step((norm_of(kept.data() + i * d, d) - plateau) / (support - plateau));
      for (int c = 0; c < nc; ++c) out[keep[i] * nc + c] = w * vals[i * nc + c];
    }
  };
  return s;
}

SpectralSource function_source(int dim, int ncomp, double support, double spatial_radius,
                               std::function<void(const Wavevector&, cd*)> fn) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::InvalidArgument, "dimension must be 2 or 3");
  if (ncomp < 1 || !(support > 0.0) || !(spatial_radius >= 0.0) || !fn)
    throw Error(ErrorKind::InvalidArgument, "invalid analytic source");
  SpectralSource s;
  s.dim = dim;
  s.ncomp = ncomp;
  s.plateau_radius = support;
  s.support_radius = support;
  for (int a = 0; a < dim; ++a) {
    s.box_lo[a] = -spatial_radius;
    s.box_hi[a] = spatial_radius;
  }
  s.eval = [dim, ncomp, fn = std::move(fn)](const double* nodes, std::size_t nq, cd* out) {
    const long long n = static_cast<long long>(nq);
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < n; ++q) fn(to_wavevector(nodes + q * dim, dim), out + q * ncomp);
  };
  return s;
}

SurfaceQuadrature SurfaceQuadrature::make(const NormFlavor& flavor, double omega, int angular) {
  if (!(omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "surface radius must be positive");
  if (angular < 3) throw Error(ErrorKind::InvalidArgument, "surface rule needs at least 3 angular nodes");
  const int d = flavor.dim();
  const Frame fr = make_frame(flavor.g);
  SurfaceQuadrature sq;
  sq.dim = d;
  for (const Ray& ray : angular_rule(d, angular)) {
    const Eigen::Vector3d v = omega * (fr.s * ray.u);
    Wavevector xi(d);
    for (int a = 0; a < d; ++a) {
      xi(a) = v(a);
      sq.nodes.push_back(v(a));
    }
    const double dw = fr.det_s * std::pow(omega, d - 1) * ray.w;
    sq.delta_weights.push_back(dw);
    sq.area_weights.push_back(dw * (flavor.g * xi).norm() / omega);
  }
  return sq;
}

Field e_delta(const SpectralSource& f, const Grid& out, double omega, double delta, int sign, const CutoffSpec& beta,
              const NormFlavor& flavor, const LapOptions& opts) {
  check_scalar(f, flavor, omega);
  if (!(delta > 0.0) || !(delta < 0.5)) throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1/2)");
  if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidArgument, "sign must be +1 or -1");
  const Context cx = make_context(f, out, beta, opts);
  Accum acc{cx.dim, 1, {}, {}};
  const cd pole(omega, sign * delta);
  auto kernel = [&](double r) { return 1.0 / (r - pole); };
  auto radial = [&](const RaySegments& s) {
    return graded_radial(s, delta, scaled(central_order, opts.refine), scaled(graded_order, opts.refine), kernel);
  };
  add_flavor_term(acc, cx, flavor.g, omega, radial, one_by_one, no_pre);
  return acc.synthesize(out, opts.exec);
}

Field pv_part(const SpectralSource& f, const Grid& out, double omega, const CutoffSpec& beta, const NormFlavor& flavor,
              const LapOptions& opts) {
  check_scalar(f, flavor, omega);
  const Field coarse = pv_once(f, out, omega, beta, flavor, opts);
  LapOptions fine_opts = opts;
  fine_opts.refine = 2.0 * opts.refine;
  const Field fine = pv_once(f, out, omega, beta, flavor, fine_opts);
  const double diff = rel_l2_diff(fine, coarse);
  if (!(diff <= opts.tolerance)) {
    std::ostringstream os;
    os << "principal value changed by " << diff << " under refinement (tolerance " << opts.tolerance << ")";
    throw Error(ErrorKind::QuadratureNotConverged, os.str());
  }
  return fine;
}

Field surface_part(const SpectralSource& f, const Grid& out, double omega, int sign, const CutoffSpec& beta,
                   const SurfaceQuadrature& quad, const LapOptions& opts) {
  if (f.ncomp != 1) throw Error(ErrorKind::InvalidArgument, "scalar operation needs a one-component source");
  if (quad.dim != f.dim || out.dim != f.dim) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidArgument, "sign must be +1 or -1");
  (void)omega;
  const int d = f.dim;
  const cd norm = inv_two_pi_pow(d) * (double(sign) * pi * I);
  Accum acc{d, 1, {}, {}};
  acc.add(f, quad.nodes, [&](std::size_t q, const double* xi, const cd* in, cd* outc) {
    outc[0] = norm * quad.delta_weights[q] * beta(norm_of(xi, d)) * in[0];
  });
  return acc.synthesize(out, opts.exec);
}

Field lap_solve(double omega, const SpectralSource& J, const Grid& out, const Material2& mat, int sign,
                LapMethod method, const CutoffSpec& beta, const LapOptions& opts) {
  return assemble(omega, J, out, mat, sign, method, beta, opts, false);
}
Field lap_solve(double omega, const SpectralSource& J, const Grid& out, const Material3& mat, int sign,
                LapMethod method, const CutoffSpec& beta, const LapOptions& opts) {
  return assemble(omega, J, out, mat, sign, method, beta, opts, false);
}
Field lap_solve(double omega, const Field& J, const Material2& mat, int sign, LapMethod method,
                const CutoffSpec& beta, const LapOptions& opts) {
  return lap_field(omega, J, mat, sign, method, beta, opts);
}
Field lap_solve(double omega, const Field& J, const Material3& mat, int sign, LapMethod method,
                const CutoffSpec& beta, const LapOptions& opts) {
  return lap_field(omega, J, mat, sign, method, beta, opts);
}

LapCrossCheck lap_cross_validate(double omega, const SpectralSource& J, const Grid& out, const Material2& mat,
                                 int sign, const CutoffSpec& beta, const LapOptions& opts) {
  return cross(omega, J, out, mat, sign, beta, opts);
}
LapCrossCheck lap_cross_validate(double omega, const SpectralSource& J, const Grid& out, const Material3& mat,
                                 int sign, const CutoffSpec& beta, const LapOptions& opts) {
  return cross(omega, J, out, mat, sign, beta, opts);
}

Field lap_surface_terms(double omega, const SpectralSource& J, const Grid& out, const Material2& mat, int sign,
                        const CutoffSpec& beta, const LapOptions& opts) {
  return surface_terms(omega, J, out, mat, sign, beta, opts);
}
Field lap_surface_terms(double omega, const SpectralSource& J, const Grid& out, const Material3& mat, int sign,
                        const CutoffSpec& beta, const LapOptions& opts) {
  return surface_terms(omega, J, out, mat, sign, beta, opts);
}

double lap_forward_residual(double omega, const SpectralSource& J, const Grid& out, const Material2& mat, int sign,
                            LapMethod method, const CutoffSpec& beta, const LapOptions& opts) {
  return residual(omega, J, out, mat, sign, method, beta, opts);
}
double lap_forward_residual(double omega, const SpectralSource& J, const Grid& out, const Material3& mat, int sign,
                            LapMethod method, const CutoffSpec& beta, const LapOptions& opts) {
  return residual(omega, J, out, mat, sign, method, beta, opts);
}

Field synthesize_source(const SpectralSource& J, const Grid& out, const LapOptions& opts) {
  if (J.dim != out.dim) throw Error(ErrorKind::InvalidArgument, "source and output dimensions differ");
  // Any cutoff inside the source plateau works here; only the breakpoints matter.
  const double r = 0.5 * J.plateau_radius;
  const CutoffSpec beta{0.5 * r, r};
  const Context cx = make_context(J, out, beta, opts);
  Accum acc{cx.dim, J.ncomp, {}, {}};
  add_euclidean(acc, cx, [](const double*, SymbolMatrix&) { return false; });
  return acc.synthesize(out, opts.exec);
}

Field high_part(double omega, double delta, int sign, const Field& J, const Material2& mat, const CutoffSpec& beta) {
  return high(omega, delta, sign, J, mat, beta);
}
Field high_part(double omega, double delta, int sign, const Field& J, const Material3& mat, const CutoffSpec& beta) {
  return high(omega, delta, sign, J, mat, beta);
}

BlowupProbe lap_blowup_probe(double omega, const LebesguePair& pair, const Material2& mat,
                             const std::vector<double>& deltas, const Grid& grid, double width, int sign) {
  if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidArgument, "sign must be +1 or -1");
  if (deltas.size() < 2) throw Error(ErrorKind::InvalidArgument, "blow-up probe needs at least two deltas");
  BlowupProbe p;
  p.deltas = deltas;
  for (double d : deltas) {
    if (!(d > 0.0)) throw Error(ErrorKind::InvalidArgument, "deltas must be positive");
    p.ratios.push_back(annulus_ratio(pair, cd(omega, sign * d), mat, grid, width));
  }
  p.fit = fit_loglog(p.deltas, p.ratios);
  return p;
}

}  // namespace mxw
