#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mxw/lap.hpp"
#include "mxw/region.hpp"

namespace mxw::cli {

// Flat "section.key" -> value table read from an INI-style file.
class ConfigTable {
 public:
  static ConfigTable parse(const std::string& text);
  static ConfigTable load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = {value}; }

  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback,
                              bool allow_infinite = false) const;

  // Keys that were present but never looked up.
  std::vector<std::string> unused() const;

 private:
  const std::vector<std::string>& tokens(const std::string& key) const;

  std::map<std::string, std::vector<std::string>> values_;
  mutable std::set<std::string> read_;
};

struct SourceSpec {
  std::string kind = "random";  // random | solenoidal | file
  std::string path;
  std::uint64_t seed = 1;
  int kmax = 4;
};

// Defaults are the acceptance values.
struct Tolerances {
  double residual = 1e-10;
  double solenoidal = 1e-11;
  double diagonalization = 1e-12;
  double determinant = 1e-12;
  double det_bracket = 1e-9;
  double inverse = 1e-10;
  double charge_kernel = 1e-12;
  double lap_agreement = 1e-5;
  double lap_difference = 1e-6;
  double lap_residual = 1e-6;
  double slope = 0.1;
  double ray_slope = 0.15;

  nlohmann::json to_json() const;
};

struct JobConfig {
  int dim = 2;
  int n = 64;
  std::array<double, 3> length{2 * pi, 2 * pi, 2 * pi};
  Material2 mat2 = Material2::identity();
  Material3 mat3;
  cd omega{1.0, 0.5};
  SourceSpec source;
  Tolerances tol;
  std::string prefix;
  std::vector<double> charge_q{2.0};  // exponents for the printed charge norms

  // lap
  std::string lap_method = "both";  // both | extrapolate | quadrature
  double lap_plateau = -1.0, lap_support = -1.0;
  double cutoff_in = -1.0, cutoff_out = -1.0;
  LapOptions lap;
  bool blowup = false;
  std::vector<double> blowup_deltas;
  double blowup_width = 1e-9;

  // region and probe
  LebesguePair pair = LebesguePair::rational(1, 1, 2, 2);
  double ell = 2.0, C = 1.0, t = 0.5;
  int boundary_resolution = 64;
  double radius_cap = 10.0;
  int map_size = 101;
  std::vector<std::array<double, 2>> points;  // given as a flat list x1, y1, x2, y2, ...
  std::string potential_path;
  ProbeFamily family = ProbeFamily::annulus;
  bool probe_lap_blowup = false;  // family = lap_blowup: sweep delta at real omega instead
  ProbeSweep sweep = ProbeSweep::dist;
  std::vector<cd> probe_omegas;
  ProbeSetup probe;

  // verify
  long long verify_count = 20000;
  EntryMutation mutation;
  std::string verify_solution;  // optional field file checked against the source

  Grid grid() const { return Grid::make(dim, n, length); }
  int ncomp() const { return ncomp_for_dim(dim); }
};

// Validates everything that can be checked before computing. Errors name the
// offending key and the violated constraint.
JobConfig job_from_table(const ConfigTable& table);

// Binary field files: "MXFD", u32 version, u32 dim, u32 ncomp, u32 n per axis,
// f64 length per axis, then interleaved little-endian (re, im) samples.
constexpr std::uint32_t field_file_version = 1;
std::vector<unsigned char> encode_field(const Field& f);
Field decode_field(const std::vector<unsigned char>& bytes);
void write_field(const std::filesystem::path& path, const Field& f);
Field read_field(const std::filesystem::path& path);

// Shortest round-trip decimal form.
std::string format_number(double v);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& values);
  const std::string& str() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string text_;
};

// Randomized invariant suites for the symbol and multiplier layers.
struct VerifyOptions {
  std::uint64_t seed = 1;
  long long count = 20000;  // samples per dimension and suite
  EntryMutation mutation;
  Tolerances tol;
};

struct Witness {
  std::string material;
  cd omega;
  std::vector<double> xi;
  int row = -1, col = -1;
  double defect = 0.0;
};

struct SuiteResult {
  std::string name;
  long long samples = 0;
  double max_defect = 0.0;
  double tolerance = 0.0;
  long long failures = 0;
  std::optional<Witness> first_failure;
  bool pass() const { return failures == 0; }
};

struct VerifyReport {
  std::uint64_t seed = 0;
  Tolerances tol;
  EntryMutation mutation;
  std::vector<SuiteResult> suites;
  bool pass() const;
  const SuiteResult* suite(const std::string& name) const;
  nlohmann::json to_json() const;
};

VerifyReport run_verify(const VerifyOptions& opts);
const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, const VerifyOptions& opts);

struct RunContext {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides config seeds
  std::ostream* log = nullptr;
};

// Exit codes: 0 pass, 1 failure, 2 cross-validation disagreement.
int cmd_solve(const JobConfig& cfg, const RunContext& ctx);
int cmd_verify(const JobConfig& cfg, const RunContext& ctx);
int cmd_lap(const JobConfig& cfg, const RunContext& ctx);
int cmd_region(const JobConfig& cfg, const RunContext& ctx);
int cmd_probe(const JobConfig& cfg, const RunContext& ctx);

}  // namespace mxw::cli
