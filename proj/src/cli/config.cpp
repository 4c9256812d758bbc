#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mxw/cli.hpp"

namespace mxw::cli {

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, "config key '" + key + "': " + what);
}

double parse_double(const std::string& key, const std::string& s, bool allow_infinite = false) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) bad_key(key, "expected a number, got '" + s + "'");
  if (std::isnan(v) || (std::isinf(v) && !allow_infinite)) bad_key(key, "value must be finite");
  return v;
}

long long parse_integer(const std::string& key, const std::string& s) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) bad_key(key, "expected an integer, got '" + s + "'");
  return v;
}

// Strips the "Kind: " prefix that Error adds, so the message can be re-wrapped.
std::string bare_message(const Error& e) {
  const std::string w = e.what();
  const auto pos = w.find(": ");
  return pos == std::string::npos ? w : w.substr(pos + 2);
}

template <class Fn>
auto in_section(const std::string& section, Fn fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), "config section [" + section + "]: " + bare_message(e));
  }
}

// "3/4" or "0.75". Returns numerator and denominator when the value is rational.
struct Fraction {
  double value;
  long long num = 0, den = 0;
};

Fraction parse_fraction(const std::string& key, const std::string& s) {
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const long long a = parse_integer(key, s.substr(0, slash));
    const long long b = parse_integer(key, s.substr(slash + 1));
    if (b <= 0) bad_key(key, "denominator must be positive");
    return {double(a) / double(b), a, b};
  }
  if (s.find_first_of(".eE") == std::string::npos) {
    const long long a = parse_integer(key, s);
    return {double(a), a, 1};
  }
  return {parse_double(key, s)};
}

ProbeFamily parse_family(const std::string& key, const std::string& s) {
  for (ProbeFamily f : {ProbeFamily::annulus, ProbeFamily::knapp, ProbeFamily::radial})
    if (s == probe_family_name(f)) return f;
  bad_key(key, "unknown probe family '" + s + "' (annulus, knapp, radial, lap_blowup)");
}

}  // namespace

ConfigTable ConfigTable::parse(const std::string& text) {
  std::istringstream in(text);
  ConfigTable t;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;
    t.values_[item.fullname()] = item.inputs;
  }
  return t;
}

ConfigTable ConfigTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const std::vector<std::string>& ConfigTable::tokens(const std::string& key) const {
  read_.insert(key);
  return values_.at(key);
}

std::string ConfigTable::text(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const auto& v = tokens(key);
  if (v.size() != 1) bad_key(key, "expected a single value");
  return v[0];
}

double ConfigTable::number(const std::string& key, double fallback) const {
  return has(key) ? parse_double(key, text(key, "")) : fallback;
}

long long ConfigTable::integer(const std::string& key, long long fallback) const {
  return has(key) ? parse_integer(key, text(key, "")) : fallback;
}

bool ConfigTable::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = text(key, "");
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  bad_key(key, "expected true or false, got '" + s + "'");
}

std::vector<double> ConfigTable::numbers(const std::string& key, const std::vector<double>& fallback,
                                         bool allow_infinite) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const std::string& s : tokens(key)) out.push_back(parse_double(key, s, allow_infinite));
  return out;
}

std::vector<std::string> ConfigTable::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!read_.count(k)) out.push_back(k);
  return out;
}

nlohmann::json Tolerances::to_json() const {
  return {{"residual", residual},
          {"solenoidal", solenoidal},
          {"diagonalization", diagonalization},
          {"determinant", determinant},
          {"det_bracket", det_bracket},
          {"inverse", inverse},
          {"charge_kernel", charge_kernel},
          {"lap_agreement", lap_agreement},
          {"lap_difference", lap_difference},
          {"lap_residual", lap_residual},
          {"slope", slope},
          {"ray_slope", ray_slope}};
}

JobConfig job_from_table(const ConfigTable& t) {
  JobConfig c;

  in_section("grid", [&] {
    c.dim = int(t.integer("grid.dim", 2));
    c.n = int(t.integer("grid.n", 64));
    const auto len = t.numbers("grid.length", {2 * pi});
    if (len.size() == 1) {
      c.length = {len[0], len[0], len[0]};
    } else if (int(len.size()) == c.dim) {
      for (int a = 0; a < c.dim; ++a) c.length[a] = len[a];
    } else {
      bad_key("grid.length", "expected 1 or " + std::to_string(c.dim) + " values");
    }
    (void)c.grid();
    return 0;
  });

  in_section("material", [&] {
    if (c.dim == 2) {
      c.mat2 = Material2(t.number("material.eps11", 1.0), t.number("material.eps12", 0.0),
                         t.number("material.eps22", 1.0), t.number("material.mu", 1.0));
    } else if (t.has("material.eps")) {
      const auto e = t.numbers("material.eps", {});
      if (e.size() != 3) bad_key("material.eps", "expected the 3 diagonal entries");
      c.mat3 = material3_from_diagonal({e[0], e[1], e[2]}, t.number("material.mu", 1.0));
    } else {
      c.mat3 = Material3(t.number("material.eps_axis", 1.0), t.number("material.eps_perp", 1.0),
                         int(t.integer("material.axis", 1)), t.number("material.mu", 1.0));
    }
    return 0;
  });

  c.omega = {t.number("omega.re", 1.0), t.number("omega.im", 0.5)};

  in_section("source", [&] {
    c.source.kind = t.text("source.kind", "random");
    if (c.source.kind != "random" && c.source.kind != "solenoidal" && c.source.kind != "file")
      bad_key("source.kind", "expected random, solenoidal or file");
    c.source.path = t.text("source.path", "");
    if (c.source.kind == "file" && c.source.path.empty()) bad_key("source.path", "required when kind = file");
    const long long seed = t.integer("source.seed", 1);
    if (seed < 0) bad_key("source.seed", "must be nonnegative");
    c.source.seed = std::uint64_t(seed);
    c.source.kmax = int(t.integer("source.kmax", std::min(4, c.n / 2 - 1)));
    if (c.source.kmax < 0 || 2 * c.source.kmax >= c.n) bad_key("source.kmax", "must satisfy 0 <= kmax < n/2");
    return 0;
  });

  in_section("tolerances", [&] {
    auto tol = [&](const char* name, double& v) {
      v = t.number(std::string("tolerances.") + name, v);
      if (!(v > 0.0)) bad_key(std::string("tolerances.") + name, "must be positive");
    };
    tol("residual", c.tol.residual);
    tol("solenoidal", c.tol.solenoidal);
    tol("diagonalization", c.tol.diagonalization);
    tol("determinant", c.tol.determinant);
    tol("det_bracket", c.tol.det_bracket);
    tol("inverse", c.tol.inverse);
    tol("charge_kernel", c.tol.charge_kernel);
    tol("lap_agreement", c.tol.lap_agreement);
    tol("lap_difference", c.tol.lap_difference);
    tol("lap_residual", c.tol.lap_residual);
    tol("slope", c.tol.slope);
    tol("ray_slope", c.tol.ray_slope);
    return 0;
  });

  c.prefix = t.text("output.prefix", "");
  c.charge_q = t.numbers("solve.charge_q", {2.0}, true);
  for (double q : c.charge_q)
    if (!(q >= 1.0)) bad_key("solve.charge_q", "exponents must be >= 1 (use inf for the max norm)");

  in_section("lap", [&] {
    c.lap_method = t.text("lap.method", "both");
    if (c.lap_method != "both" && c.lap_method != "extrapolate" && c.lap_method != "quadrature")
      bad_key("lap.method", "expected both, extrapolate or quadrature");
    c.lap_plateau = t.number("lap.plateau", -1.0);
    c.lap_support = t.number("lap.support", -1.0);
    c.cutoff_in = t.number("lap.cutoff_in", -1.0);
    c.cutoff_out = t.number("lap.cutoff_out", -1.0);
    if ((c.cutoff_in > 0.0) != (c.cutoff_out > 0.0)) bad_key("lap.cutoff_out", "give both cutoff radii or neither");
    if (c.cutoff_in > 0.0) (void)CutoffSpec::make(c.cutoff_in, c.cutoff_out);
    c.lap.angular = int(t.integer("lap.angular", 0));
    c.lap.order = int(t.integer("lap.order", c.lap.order));
    c.lap.refine = t.number("lap.refine", 1.0);
    c.lap.delta0 = t.number("lap.delta0", c.lap.delta0);
    c.lap.levels = int(t.integer("lap.levels", c.lap.levels));
    if (c.lap.angular < 0 || c.lap.order < 2 || !(c.lap.refine > 0.0) || !(c.lap.delta0 > 0.0) || c.lap.levels < 1)
      bad_key("lap", "angular >= 0, order >= 2, refine > 0, delta0 > 0 and levels >= 1 are required");
    c.lap.tolerance = c.tol.lap_agreement;
    c.blowup = t.flag("lap.blowup", false);
    c.blowup_deltas = t.numbers("lap.blowup_deltas", {0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125});
    for (double d : c.blowup_deltas)
      if (!(d > 0.0)) bad_key("lap.blowup_deltas", "deltas must be positive");
    c.blowup_width = t.number("lap.blowup_width", 1e-9);
    return 0;
  });

  in_section("region", [&] {
    const int d = int(t.integer("region.d", c.dim));
    const Fraction x = parse_fraction("region.x", t.text("region.x", "1/2"));
    const Fraction y = parse_fraction("region.y", t.text("region.y", "1/2"));
    if (x.den > 0 && y.den > 0) {
      const long long den = std::lcm(x.den, y.den);
      c.pair = LebesguePair::rational(x.num * (den / x.den), y.num * (den / y.den), den, d);
    } else {
      c.pair = LebesguePair::make(x.value, y.value, d);
    }
    c.ell = t.number("region.ell", 2.0);
    c.C = t.number("region.C", 1.0);
    c.t = t.number("region.t", 0.5);
    if (!(c.ell > 0.0) || !(c.C > 0.0) || !(c.t > 0.0)) bad_key("region", "ell, C and t must be positive");
    c.boundary_resolution = int(t.integer("region.resolution", 64));
    c.radius_cap = t.number("region.radius_cap", 10.0);
    c.map_size = int(t.integer("region.map_size", 101));
    if (c.boundary_resolution < 2 || !(c.radius_cap > 0.0) || c.map_size < 2)
      bad_key("region", "resolution >= 2, radius_cap > 0 and map_size >= 2 are required");
    const auto pts = t.numbers("region.points", {});
    if (pts.size() % 2) bad_key("region.points", "expected x, y pairs");
    for (std::size_t k = 0; k < pts.size(); k += 2) {
      (void)LebesguePair::make(pts[k], pts[k + 1], d);
      c.points.push_back({pts[k], pts[k + 1]});
    }
    c.potential_path = t.text("region.potential", "");
    return 0;
  });

  in_section("probe", [&] {
    const std::string family = t.text("probe.family", "annulus");
    c.probe_lap_blowup = family == "lap_blowup";
    if (!c.probe_lap_blowup) c.family = parse_family("probe.family", family);
    const std::string sweep = t.text("probe.sweep", "dist");
    if (sweep == "dist")
      c.sweep = ProbeSweep::dist;
    else if (sweep == "modulus")
      c.sweep = ProbeSweep::modulus;
    else
      bad_key("probe.sweep", "expected dist or modulus");
    const auto re = t.numbers("probe.omega_re", {});
    const auto im = t.numbers("probe.omega_im", {});
    if (re.size() != im.size()) bad_key("probe.omega_im", "omega_re and omega_im must have the same length");
    for (std::size_t k = 0; k < re.size(); ++k) c.probe_omegas.emplace_back(re[k], im[k]);
    c.probe.n = int(t.integer("probe.n", c.probe.n));
    c.probe.length = t.number("probe.length", c.probe.length);
    c.probe.width = t.number("probe.width", c.probe.width);
    c.probe.a = t.number("probe.a", 1.0);
    c.probe.b = t.number("probe.b", 1.0);
    (void)Grid::make(c.family == ProbeFamily::annulus ? 2 : 3, c.probe.n, c.probe.length);
    (void)Material3::from_ab(c.probe.a, c.probe.b);
    return 0;
  });

  in_section("verify", [&] {
    c.verify_count = t.integer("verify.count", 20000);
    if (c.verify_count < 1) bad_key("verify.count", "must be positive");
    c.mutation.row = int(t.integer("verify.mutation_row", -1));
    c.mutation.col = int(t.integer("verify.mutation_col", -1));
    if (c.mutation.active() && (c.mutation.row > 5 || c.mutation.col > 5))
      bad_key("verify.mutation_row", "mutation entry must lie in the 6x6 block");
    c.verify_solution = t.text("verify.solution", "");
    return 0;
  });

  const auto extra = t.unused();
  if (!extra.empty()) bad_key(extra.front(), "unknown key");
  return c;
}

}  // namespace mxw::cli
