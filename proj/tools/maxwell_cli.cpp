#include <CLI11.hpp>

#include <iostream>

#include "mxw/cli.hpp"

int main(int argc, char** argv) {
  using namespace mxw::cli;
  CLI::App app{"Time-harmonic Maxwell solver and verification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--config", config_path, "INI job file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "seed overriding the config");
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the default)")->check(CLI::NonNegativeNumber);

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const JobConfig&, const RunContext&);
  };
  const Sub subs[] = {
      {"solve", "solve P(omega, D) u = J at complex omega", cmd_solve},
      {"verify", "run the randomized symbol and multiplier suites", cmd_verify},
      {"lap", "limiting solutions at real omega, both methods", cmd_lap},
      {"region", "exponent maps, membership tables and Z boundaries", cmd_region},
      {"probe", "norm-scaling probes and fitted slopes", cmd_probe},
  };
  for (const Sub& s : subs) app.add_subcommand(s.name, s.help);

  CLI11_PARSE(app, argc, argv);

  try {
    const ConfigTable table = config_path.empty() ? ConfigTable{} : ConfigTable::load(config_path);
    const JobConfig cfg = job_from_table(table);
    if (threads > 0) mxw::set_thread_count(threads);
    RunContext ctx;
    ctx.out_dir = out_dir;
    if (seed_opt->count()) ctx.seed = seed;
    for (const Sub& s : subs)
      if (app.got_subcommand(s.name)) return s.run(cfg, ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
