#include <random>

#include "mxw/cli.hpp"

namespace mxw::cli {

namespace {

struct Sampler {
  std::mt19937_64 rng;

  explicit Sampler(std::uint64_t seed) : rng(seed) {}

  cd omega() {
    std::uniform_real_distribution<double> re(-5.0, 5.0), lg(-3.0, 1.0), sg(0.0, 1.0);
    const double im = std::pow(10.0, lg(rng)) * (sg(rng) < 0.5 ? -1.0 : 1.0);
    return {re(rng), im};
  }
  Wavevector xi(int dim) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> lg(-2.0, 2.0);
    Wavevector x(dim);
    do {
      for (int k = 0; k < dim; ++k) x[k] = nd(rng);
    } while (x.norm() == 0.0);
    return x * (std::pow(10.0, lg(rng)) / x.norm());
  }
  // Direction within 1e-12 .. 1e-5 of the distinguished axis.
  Wavevector near_axis() {
    std::uniform_real_distribution<double> lg(-12.0, -5.0), ph(0.0, 2 * pi), mag(-2.0, 2.0), sg(0.0, 1.0);
    const double e = std::pow(10.0, lg(rng)), t = ph(rng), s = std::pow(10.0, mag(rng));
    return wavevector((sg(rng) < 0.5 ? -1.0 : 1.0) * s, s * e * std::cos(t), s * e * std::sin(t));
  }
  cd unit() {
    std::normal_distribution<double> nd(0.0, 1.0);
    return {nd(rng), nd(rng)};
  }
};

struct Mat2Case {
  std::string name;
  Material2 mat;
};
struct Mat3Case {
  std::string name;
  Material3 mat;
};

std::vector<Mat2Case> materials2() {
  return {{"eps=I,mu=1", Material2::identity()},
          {"eps=(2,0.4,0.8),mu=1.7", Material2(2.0, 0.4, 0.8, 1.7)},
          {"eps=(0.3,-0.1,5),mu=0.2", Material2(0.3, -0.1, 5.0, 0.2)}};
}

std::vector<Mat3Case> materials3() {
  return {{"a=4,b=1", Material3::from_ab(4, 1)},
          {"a=1,b=1", Material3::from_ab(1, 1)},
          {"a=0.2,b=7", Material3::from_ab(0.2, 7)},
          {"a=1,b=4", Material3::from_ab(1, 4)}};
}

// Largest entry of e and where it sits.
double max_entry(const CMat& e, int& row, int& col) {
  double best = -1.0;
  for (int r = 0; r < e.rows(); ++r)
    for (int c = 0; c < e.cols(); ++c)
      if (std::abs(e(r, c)) > best) best = std::abs(e(r, c)), row = r, col = c;
  return best;
}

class SuiteRun {
 public:
  SuiteRun(std::string name, double tol) { res_.name = std::move(name), res_.tolerance = tol; }

  void record(double defect, const std::string& material, cd omega, const Wavevector& xi, int row = -1, int col = -1) {
    ++res_.samples;
    if (!(defect <= res_.tolerance)) {
      if (!res_.first_failure) {
        Witness w;
        w.material = material;
        w.omega = omega;
        w.xi.assign(xi.data(), xi.data() + xi.size());
        w.row = row, w.col = col, w.defect = defect;
        res_.first_failure = w;
      }
      ++res_.failures;
    }
    if (!(defect <= res_.max_defect)) res_.max_defect = std::isnan(defect) ? INFINITY : defect;
  }
  SuiteResult result() const { return res_; }

 private:
  SuiteResult res_;
};

SuiteResult diagonalization2(const VerifyOptions& o) {
  SuiteRun run("diagonalization_2d", o.tol.diagonalization);
  Sampler s(o.seed * 1000 + 1);
  const auto mats = materials2();
  for (long long k = 0; k < o.count; ++k) {
    const auto& m = mats[k % mats.size()];
    const cd w = s.omega();
    const Wavevector xi = s.xi(2);
    const SymbolMatrix p = symbol_p(w, xi, m.mat);
    const EigenDecomposition e = eigen_decomposition(w, xi, m.mat);
    int r = 0, c = 0;
    const double d = max_entry(p - e.m * e.d * e.m_inv, r, c) / p.cwiseAbs().maxCoeff();
    run.record(d, m.name, w, xi, r, c);
  }
  return run.result();
}

SuiteResult diagonalization3(const VerifyOptions& o) {
  SuiteRun run("diagonalization_3d", o.tol.diagonalization);
  Sampler s(o.seed * 1000 + 2);
  const auto mats = materials3();
  for (long long k = 0; k < o.count; ++k) {
    const auto& m = mats[k % mats.size()];
    const cd w = s.omega();
    Wavevector xi = s.xi(3);
    while (!off_axis(xi)) xi = s.xi(3);
    const SymbolMatrix p = symbol_p(w, xi, m.mat);
    const EigenDecomposition e = eigen_decomposition(w, xi, m.mat);
    int r = 0, c = 0;
    const double d = max_entry(p - e.m * e.d * e.m_inv, r, c) / p.cwiseAbs().maxCoeff();
    run.record(d, m.name, w, xi, r, c);
  }
  return run.result();
}

SuiteResult eigenvector_inverse(const VerifyOptions& o) {
  SuiteRun run("eigenvector_inverse", o.tol.diagonalization);
  Sampler s(o.seed * 1000 + 3);
  const auto m2 = materials2();
  const auto m3 = materials3();
  for (long long k = 0; k < o.count; ++k) {
    const bool two = k % 2 == 0;
    const cd w = s.omega();
    Wavevector xi = s.xi(two ? 2 : 3);
    while (!two && !off_axis(xi)) xi = s.xi(3);
    const EigenDecomposition e = two ? eigen_decomposition(w, xi, m2[k / 2 % m2.size()].mat)
                                     : eigen_decomposition(w, xi, m3[k / 2 % m3.size()].mat);
    int r = 0, c = 0;
    const double d = max_entry(e.m * e.m_inv - CMat::Identity(e.m.rows(), e.m.cols()), r, c);
    run.record(d, two ? m2[k / 2 % m2.size()].name : m3[k / 2 % m3.size()].name, w, xi, r, c);
  }
  return run.result();
}

SuiteResult determinant2(const VerifyOptions& o) {
  SuiteRun run("determinant_2d", o.tol.determinant);
  Sampler s(o.seed * 1000 + 4);
  const auto mats = materials2();
  for (long long k = 0; k < o.count; ++k) {
    const auto& m = mats[k % mats.size()];
    const cd w = s.omega();
    const Wavevector xi = s.xi(2);
    const EigenDecomposition e = eigen_decomposition(w, xi, m.mat);
    run.record(std::abs(Eigen::MatrixXcd(e.m).determinant() + 1.0), m.name, w, xi);
  }
  return run.result();
}

// |det m| / alpha^4 equals 4 / (a b^(3/2)); the constant was measured and frozen.
SuiteResult determinant3(const VerifyOptions& o) {
  SuiteRun run("determinant_3d_bracket", o.tol.det_bracket);
  Sampler s(o.seed * 1000 + 5);
  const auto mats = materials3();
  for (long long k = 0; k < o.count; ++k) {
    const auto& m = mats[k % mats.size()];
    Wavevector xi = s.xi(3);
    while (!off_axis(xi)) xi = s.xi(3);
    const DetDiagnostics d = det_diagnostics(xi, m.mat);
    const double frozen = 4.0 / (m.mat.a() * std::pow(m.mat.b(), 1.5));
    run.record(std::abs(std::abs(d.det_m) / std::pow(d.alpha, 4) / frozen - 1.0), m.name, cd(0.0), xi);
  }
  return run.result();
}

SuiteResult inverse2(const VerifyOptions& o) {
  SuiteRun run("master_inverse_2d", o.tol.inverse);
  Sampler s(o.seed * 1000 + 6);
  const auto mats = materials2();
  for (long long k = 0; k < o.count; ++k) {
    const auto& m = mats[k % mats.size()];
    const cd w = s.omega();
    const Wavevector xi = s.xi(2);
    int r = 0, c = 0;
    const double d =
        max_entry(symbol_p(w, xi, m.mat) * resolvent_matrix_2d(w, xi, m.mat) - CMat::Identity(3, 3), r, c);
    run.record(d, m.name, w, xi, r, c);
  }
  return run.result();
}

// Every tenth point sits near the axis (LU fallback) and every tenth uses a
// non-canonical material through the canonicalizing entry point.
SuiteResult inverse3(const VerifyOptions& o) {
  SuiteRun run("master_inverse_3d", o.tol.inverse);
  Sampler s(o.seed * 1000 + 7);
  const auto mats = materials3();
  const Material3 general(2.0, 0.5, 3, 1.5);
  for (long long k = 0; k < o.count; ++k) {
    const cd w = s.omega();
    const auto& m = mats[k % mats.size()];
    Wavevector xi;
    SymbolMatrix M, p;
    std::string name = m.name;
    if (k % 10 == 3) {
      xi = s.near_axis();
      M = inverse_symbol(w, xi, m.mat);
      p = symbol_p(w, xi, m.mat);
      name += ",near-axis";
    } else if (k % 10 == 7) {
      xi = s.xi(3);
      M = inverse_symbol(w, xi, general);
      p = symbol_p(w, xi, general);
      name = "eps=(2,2,0.5),axis=3,mu=1.5";
    } else {
      xi = s.xi(3);
      while (!off_axis(xi)) xi = s.xi(3);
      M = resolvent_matrix_3d(w, xi, m.mat, o.mutation);
      p = symbol_p(w, xi, m.mat);
    }
    int r = 0, c = 0;
    run.record(max_entry(p * M - CMat::Identity(6, 6), r, c), name, w, xi, r, c);
  }
  return run.result();
}

SuiteResult charge_kernel(const VerifyOptions& o) {
  SuiteRun run("charge_kernel", o.tol.charge_kernel);
  Sampler s(o.seed * 1000 + 8);
  const auto m2 = materials2();
  const auto m3 = materials3();
  for (long long k = 0; k < o.count; ++k) {
    const cd w = s.omega();
    const double scale = std::max(1.0, 1.0 / std::abs(w));
    if (k % 2 == 0) {
      const auto& m = m2[k / 2 % m2.size()];
      const Wavevector xi = s.xi(2);
      const Wavevector t = xi / xi.norm();
      CVec v(3);
      v << -t[1], t[0], s.unit();
      const CVec j = s.unit() * v;
      run.record((m2c_display(w, xi, m.mat) * j).cwiseAbs().maxCoeff() / (j.norm() * scale), m.name, w, xi);
    } else {
      const auto& m = m3[k / 2 % m3.size()];
      Wavevector xi = s.xi(3);
      while (!off_axis(xi)) xi = s.xi(3);
      const Eigen::Vector3d q(xi[0], xi[1], xi[2]);
      const Eigen::Vector3d t1 = q.unitOrthogonal(), t2 = q.normalized().cross(t1);
      CVec j(6);
      j.head(3) = s.unit() * t1.cast<cd>() + s.unit() * t2.cast<cd>();
      j.tail(3) = s.unit() * t1.cast<cd>() + s.unit() * t2.cast<cd>();
      run.record((m3c_display(w, xi, m.mat) * j).cwiseAbs().maxCoeff() / (j.norm() * scale), m.name, w, xi);
    }
  }
  return run.result();
}

nlohmann::json witness_json(const Witness& w) {
  return {{"material", w.material},
          {"omega", {w.omega.real(), w.omega.imag()}},
          {"xi", w.xi},
          {"entry", {w.row, w.col}},
          {"defect", w.defect}};
}

}  // namespace

bool VerifyReport::pass() const {
  for (const auto& s : suites)
    if (!s.pass()) return false;
  return true;
}

const SuiteResult* VerifyReport::suite(const std::string& name) const {
  for (const auto& s : suites)
    if (s.name == name) return &s;
  return nullptr;
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["tolerances"] = tol.to_json();
  j["mutation"] = mutation.active() ? nlohmann::json{mutation.row, mutation.col} : nlohmann::json(nullptr);
  j["pass"] = pass();
  for (const auto& s : suites) {
    nlohmann::json e{{"name", s.name},
                     {"samples", s.samples},
                     {"max_defect", s.max_defect},
                     {"tolerance", s.tolerance},
                     {"failures", s.failures},
                     {"pass", s.pass()}};
    e["first_failure"] = s.first_failure ? witness_json(*s.first_failure) : nlohmann::json(nullptr);
    j["suites"].push_back(e);
  }
  return j;
}

namespace {

using SuiteFn = SuiteResult (*)(const VerifyOptions&);
const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r = {
      {"diagonalization_2d", diagonalization2}, {"diagonalization_3d", diagonalization3},
      {"eigenvector_inverse", eigenvector_inverse}, {"determinant_2d", determinant2},
      {"determinant_3d_bracket", determinant3}, {"master_inverse_2d", inverse2},
      {"master_inverse_3d", inverse3}, {"charge_kernel", charge_kernel}};
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& e : registry()) n.push_back(e.first);
    return n;
  }();
  return names;
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& opts) {
  for (const auto& [n, fn] : registry())
    if (n == name) return fn(opts);
  throw Error(ErrorKind::InvalidArgument, "unknown verify suite " + name);
}

VerifyReport run_verify(const VerifyOptions& opts) {
  VerifyReport r;
  r.seed = opts.seed;
  r.tol = opts.tol;
  r.mutation = opts.mutation;
  for (const auto& [n, fn] : registry()) r.suites.push_back(fn(opts));
  return r;
}

}  // namespace mxw::cli
