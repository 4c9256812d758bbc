#include <fstream>
#include <iomanip>
#include <iostream>

#include "mxw/cli.hpp"

namespace mxw::cli {

namespace {

std::ostream& log_of(const RunContext& ctx) { return ctx.log ? *ctx.log : std::cout; }

std::filesystem::path output(const JobConfig& c, const RunContext& ctx, const std::string& name) {
  std::filesystem::create_directories(ctx.out_dir);
  return ctx.out_dir / (c.prefix + name);
}

void save_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << v;
  return s.str();
}

Field make_source(const JobConfig& c, const RunContext& ctx) {
  const Grid g = c.grid();
  if (c.source.kind == "file") {
    Field f = read_field(c.source.path);
    if (!(f.grid == g) || f.ncomp != c.ncomp())
      throw Error(ErrorKind::InvalidArgument, "source file grid or component count does not match [grid]");
    return f;
  }
  Field J = random_band_limited(g, c.ncomp(), ctx.seed.value_or(c.source.seed), c.source.kmax);
  return c.source.kind == "solenoidal" ? leray_project(J) : J;
}

Field solve_any(const JobConfig& c, cd w, const Field& J) {
  return c.dim == 2 ? solve(w, J, c.mat2) : solve(w, J, c.mat3);
}

Field forward_any(const JobConfig& c, cd w, const Field& u) {
  return c.dim == 2 ? forward_operator(w, u, c.mat2) : forward_operator(w, u, c.mat3);
}

// i omega div D = rho_e and i omega div B = rho_m for any solution.
double divergence_defect(cd w, const Field& u, const Field& J) {
  const Charges cu = divergence_and_charges(u), cj = divergence_and_charges(J);
  const cd s = 1.0 / (I * w);
  const double num = std::hypot(l2_norm(cu.rho_e - s * cj.rho_e), l2_norm(cu.rho_m - s * cj.rho_m));
  double kmax = 0.0;
  for (int a = 0; a < u.grid.dim; ++a) kmax = std::max(kmax, pi / u.grid.spacing(a));
  return num / (kmax * l2_norm(u));
}

BlowupProbe blowup(const JobConfig& c, double w) {
  try {
    return lap_blowup_probe(w, c.pair, c.mat2, c.blowup_deltas, c.grid(), c.blowup_width);
  } catch (const Error& e) {
    std::string msg = e.what();
    msg = msg.substr(msg.find(": ") + 2);
    throw Error(e.kind(), msg + " (omega must lie within lap.blowup_width of a lattice shell)");
  }
}

}  // namespace

int cmd_solve(const JobConfig& c, const RunContext& ctx) {
  std::ostream& log = log_of(ctx);
  if (c.omega.imag() == 0.0) {
    log << "error: omega is real; use lap subcommand for limiting solutions\n";
    return 1;
  }
  const Field J = make_source(c, ctx);
  const Field u = solve_any(c, c.omega, J);
  const double residual = rel_l2_diff(forward_any(c, c.omega, u), J);
  const double div = divergence_defect(c.omega, u, J);

  const Charges ch = divergence_and_charges(J);
  nlohmann::json charges = nlohmann::json::array();
  log << "residual " << sci(residual) << " (tolerance " << sci(c.tol.residual) << ")\n";
  log << "divergence defect " << sci(div) << "\n";
  for (double q : c.charge_q) {
    const double ne = lebesgue_norm(fractional_laplacian(ch.rho_e, -0.5), q);
    const double nm = c.dim == 3 ? lebesgue_norm(fractional_laplacian(ch.rho_m, -0.5), q) : 0.0;
    log << "charge norm q=" << q << " rho_e " << sci(ne) << " rho_m " << sci(nm) << "\n";
    charges.push_back({{"q", std::isinf(q) ? nlohmann::json("inf") : nlohmann::json(q)}, {"rho_e", ne}, {"rho_m", nm}});
  }

  write_field(output(c, ctx, "solution.mxfd"), u);
  bool pass = residual <= c.tol.residual;
  if (c.source.kind == "solenoidal") pass = pass && div <= c.tol.solenoidal;
  save_json(output(c, ctx, "solve_report.json"), {{"omega", {c.omega.real(), c.omega.imag()}},
                                                   {"residual", residual},
                                                   {"divergence_defect", div},
                                                   {"charge_norms", charges},
                                                   {"tolerances", c.tol.to_json()},
                                                   {"pass", pass}});
  log << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int cmd_verify(const JobConfig& c, const RunContext& ctx) {
  std::ostream& log = log_of(ctx);
  VerifyOptions o;
  o.seed = ctx.seed.value_or(1);
  o.count = c.verify_count;
  o.mutation = c.mutation;
  o.tol = c.tol;
  const VerifyReport r = run_verify(o);
  nlohmann::json j = r.to_json();

  bool pass = r.pass();
  if (!c.verify_solution.empty()) {
    const Field u = read_field(c.verify_solution);
    const Field J = make_source(c, ctx);
    if (!(u.grid == J.grid) || u.ncomp != J.ncomp)
      throw Error(ErrorKind::InvalidArgument, "verify.solution does not match the configured source grid");
    const double rt = rel_l2_diff(forward_any(c, c.omega, u), J);
    log << "round_trip defect " << sci(rt) << " tolerance " << sci(c.tol.residual) << "\n";
    j["round_trip"] = {{"defect", rt}, {"tolerance", c.tol.residual}, {"pass", rt <= c.tol.residual}};
    pass = pass && rt <= c.tol.residual;
  }
  j["pass"] = pass;

  for (const auto& s : r.suites)
    log << std::left << std::setw(24) << s.name << (s.pass() ? " pass " : " FAIL ") << "samples " << s.samples
        << " max defect " << sci(s.max_defect) << " tolerance " << sci(s.tolerance) << "\n";
  for (const auto& s : r.suites) {
    if (!s.first_failure) continue;
    const Witness& w = *s.first_failure;
    log << "first failure in " << s.name << ": material " << w.material << ", omega " << w.omega << ", xi (";
    for (std::size_t k = 0; k < w.xi.size(); ++k) log << (k ? ", " : "") << w.xi[k];
    log << "), entry (" << w.row << ", " << w.col << "), defect " << sci(w.defect) << "\n";
    break;
  }
  save_json(output(c, ctx, "verify_report.json"), j);
  return pass ? 0 : 1;
}

int cmd_lap(const JobConfig& c, const RunContext& ctx) {
  std::ostream& log = log_of(ctx);
  if (c.omega.imag() != 0.0) {
    log << "error: lap works at real frequency; set omega.im = 0\n";
    return 1;
  }
  const double w = c.omega.real();
  Field J = make_source(c, ctx);
  TransformRecord record;
  Material3 m3 = c.mat3;
  if (c.dim == 3) {
    Canonicalized cz = canonicalize(c.mat3, J);
    J = std::move(cz.currents);
    m3 = cz.material;
    record = cz.record;
  }
  const Grid& g = J.grid;
  const SpectralSource src = grid_source(J, c.lap_plateau, c.lap_support);
  const CutoffSpec beta = c.cutoff_in > 0.0 ? CutoffSpec::make(c.cutoff_in, c.cutoff_out)
                                            : CutoffSpec::make(0.7 * src.plateau_radius, 0.95 * src.plateau_radius);
  const LapOptions& o = c.lap;
  const LapMethod main = c.lap_method == "extrapolate" ? LapMethod::extrapolate : LapMethod::quadrature;
  auto restore = [&](const Field& f) { return c.dim == 3 ? record.from_canonical(f) : f; };

  nlohmann::json report{{"omega", w}, {"tolerances", c.tol.to_json()}};
  bool pass = true;
  Field limit[2];
  for (int k = 0; k < 2; ++k) {
    const int sign = k == 0 ? 1 : -1;
    const std::string tag = sign > 0 ? "plus" : "minus";
    if (c.lap_method == "both") {
      LapCrossCheck cc;
      try {
        cc = c.dim == 2 ? lap_cross_validate(w, src, g, c.mat2, sign, beta, o)
                        : lap_cross_validate(w, src, g, m3, sign, beta, o);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::MethodsDisagree) throw;
        log << "methods disagree (sign " << sign << "): " << e.what() << "\n";
        return 2;
      }
      log << "sign " << std::showpos << sign << std::noshowpos << " methods agree to " << sci(cc.rel_diff) << "\n";
      report[tag]["method_agreement"] = cc.rel_diff;
      write_field(output(c, ctx, "lap_" + tag + "_extrapolate.mxfd"), restore(cc.extrapolate));
      write_field(output(c, ctx, "lap_" + tag + "_quadrature.mxfd"), restore(cc.quadrature));
      limit[k] = cc.quadrature;
    } else {
      limit[k] = c.dim == 2 ? lap_solve(w, src, g, c.mat2, sign, main, beta, o)
                            : lap_solve(w, src, g, m3, sign, main, beta, o);
      write_field(output(c, ctx, "lap_" + tag + "_" + c.lap_method + ".mxfd"), restore(limit[k]));
    }
    const double res = c.dim == 2 ? lap_forward_residual(w, src, g, c.mat2, sign, main, beta, o)
                                  : lap_forward_residual(w, src, g, m3, sign, main, beta, o);
    log << "sign " << std::showpos << sign << std::noshowpos << " residual " << sci(res) << " tolerance "
        << sci(c.tol.lap_residual) << "\n";
    report[tag]["residual"] = res;
    pass = pass && res <= c.tol.lap_residual;
  }

  const Field surf = c.dim == 2 ? lap_surface_terms(w, src, g, c.mat2, 1, beta, o)
                                : lap_surface_terms(w, src, g, m3, 1, beta, o);
  const double diff = rel_l2_diff(limit[0] - limit[1], cd(2.0) * surf);
  log << "difference identity defect " << sci(diff) << " tolerance " << sci(c.tol.lap_difference) << "\n";
  report["difference_identity"] = diff;
  pass = pass && diff <= c.tol.lap_difference;

  if (c.blowup) {
    if (c.dim != 2) throw Error(ErrorKind::InvalidArgument, "lap.blowup is available in two dimensions");
    const BlowupProbe bp = blowup(c, w);
    Csv csv({"delta", "ratio"});
    for (std::size_t k = 0; k < bp.deltas.size(); ++k) csv.row({bp.deltas[k], bp.ratios[k]});
    csv.save(output(c, ctx, "lap_blowup.csv"));
    log << "blow-up slope " << bp.fit.slope << " (expected about " << -gamma_exponent(c.pair) << "), residual "
        << sci(bp.fit.residual) << "\n";
    report["blowup"] = {{"slope", bp.fit.slope}, {"residual", bp.fit.residual}, {"gamma", gamma_exponent(c.pair)}};
  }
  report["pass"] = pass;
  save_json(output(c, ctx, "lap_report.json"), report);
  log << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int cmd_region(const JobConfig& c, const RunContext& ctx) {
  std::ostream& log = log_of(ctx);
  const LebesguePair& pr = c.pair;
  const int m = c.map_size - 1;

  Csv map({"x", "y", "gamma"});
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) {
      const LebesguePair p = LebesguePair::rational(i, j, m, pr.d);
      map.row({p.x, p.y, gamma_exponent(p)});
    }
  map.save(output(c, ctx, "gamma_map.csv"));
  log << "gamma(" << pr.x << ", " << pr.y << "; d=" << pr.d << ") = " << gamma_exponent(pr)
      << ", alpha = " << alpha_exponent(pr) << "\n";

  Csv table({"x", "y", "R0_half", "R1", "P"});
  std::vector<std::array<double, 2>> pts = c.points;
  if (pts.empty()) pts.push_back({pr.x, pr.y});
  for (const auto& xy : pts) {
    const LebesguePair p = LebesguePair::make(xy[0], xy[1], pr.d);
    std::vector<std::string> row{format_number(xy[0]), format_number(xy[1])};
    log << "(" << xy[0] << ", " << xy[1] << "):";
    for (RegionSet s : {RegionSet::R0_half, RegionSet::R1, RegionSet::P}) {
      const bool in = membership(p, s);
      row.push_back(in ? "1" : "0");
      log << " " << region_set_name(s) << "=" << (in ? "yes" : "no");
    }
    log << "\n";
    table.row(row);
  }
  table.save(output(c, ctx, "membership.csv"));

  RegionQuery q;
  q.pair = pr;
  q.ell = c.ell;
  q.C = c.C;
  q.t = c.t;
  try {
    const ZBoundary b = z_boundary(q, c.boundary_resolution, c.radius_cap);
    const char* kind = b.kind == ZBoundary::Kind::cone ? "cone" : b.kind == ZBoundary::Kind::curve ? "curve" : "whole plane";
    log << "Z(" << c.ell << ") boundary: " << kind;
    if (b.kind == ZBoundary::Kind::cone) log << ", |sin arg omega| >= " << b.cone_sine;
    if (b.kind == ZBoundary::Kind::curve) log << (b.outside ? ", region outside the curve" : ", region inside the curve");
    log << "\n";
    for (std::size_t k = 0; k < b.polylines.size(); ++k) {
      Csv line({"re_omega", "im_omega"});
      for (const cd& z : b.polylines[k]) line.row({z.real(), z.imag()});
      line.save(output(c, ctx, "z_boundary_q" + std::to_string(k + 1) + ".csv"));
    }
    if (c.omega != cd(0.0) && c.omega.imag() != 0.0)
      log << "omega " << c.omega << ": kappa " << kappa(pr, c.omega) << ", in Z: " << (z_region(q, c.omega) ? "yes" : "no")
          << "\n";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyRegion) throw;
    log << "Z(" << c.ell << ") is empty: " << e.what() << "\n";
  }

  if (!c.potential_path.empty()) {
    const Field V = read_field(c.potential_path);
    try {
      const Enclosure e = eigenvalue_enclosure(q, V);
      log << e.statement << "\n";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ExponentOrder) throw;
      log << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}

int cmd_probe(const JobConfig& c, const RunContext& ctx) {
  std::ostream& log = log_of(ctx);
  const LebesguePair& pr = c.pair;
  const double gamma = gamma_exponent(pr), alpha = alpha_exponent(pr);

  if (c.probe_lap_blowup) {
    if (c.dim != 2) throw Error(ErrorKind::InvalidArgument, "the lap_blowup probe is two-dimensional");
    const BlowupProbe bp = blowup(c, c.omega.real());
    Csv csv({"delta", "ratio"});
    for (std::size_t k = 0; k < bp.deltas.size(); ++k) csv.row({bp.deltas[k], bp.ratios[k]});
    csv.save(output(c, ctx, "probe.csv"));
    Csv fit({"slope", "intercept", "residual", "points", "predicted"});
    fit.row({bp.fit.slope, bp.fit.intercept, bp.fit.residual, double(bp.fit.points), -gamma});
    fit.save(output(c, ctx, "probe_fit.csv"));
    log << "lap blow-up slope " << bp.fit.slope << " residual " << sci(bp.fit.residual) << " (predicted " << -gamma
        << ")\n";
    return 0;
  }

  std::vector<cd> omegas = c.probe_omegas;
  if (omegas.empty()) {
    if (c.family == ProbeFamily::annulus) {
      const double w = 5.0 * 2.0 * pi / c.probe.length;
      for (int k = 2; k <= 8; ++k) omegas.emplace_back(w, std::ldexp(1.0, -k));
    } else if (c.sweep == ProbeSweep::dist) {
      for (double d : {0.4, 0.3, 0.2, 0.15, 0.1, 0.07}) omegas.emplace_back(std::sqrt(1.0 - d * d), d);
    } else {
      for (double r : {0.5, 0.6, 0.75, 0.9, 1.1}) omegas.push_back(std::polar(r, 0.15));
    }
  }
  const ScalingProbe p = norm_scaling_probe(pr, c.family, omegas, c.sweep, c.probe);
  Csv csv({"re_omega", "im_omega", c.sweep == ProbeSweep::dist ? "dist" : "modulus", "ratio"});
  for (std::size_t k = 0; k < p.omegas.size(); ++k)
    csv.row({p.omegas[k].real(), p.omegas[k].imag(), p.abscissa[k], p.ratios[k]});
  csv.save(output(c, ctx, "probe.csv"));

  // kappa ~ dist^-gamma along dist sweeps and |omega|^-alpha along rays.
  const double predicted = (c.sweep == ProbeSweep::dist ? -gamma : -alpha) + 0.0;
  const double tol = c.sweep == ProbeSweep::dist ? c.tol.slope : c.tol.ray_slope;
  // Growth faster than kappa in the direction where kappa grows.
  const bool exceeds = predicted < 0.0 || c.sweep == ProbeSweep::dist ? p.fit.slope < predicted - tol
                                                                      : p.fit.slope > predicted + tol;
  Csv fit({"slope", "intercept", "residual", "points", "predicted"});
  fit.row({p.fit.slope, p.fit.intercept, p.fit.residual, double(p.fit.points), predicted});
  fit.save(output(c, ctx, "probe_fit.csv"));
  log << probe_family_name(c.family) << " probe, " << p.omegas.size() << " samples: slope " << p.fit.slope
      << " residual " << sci(p.fit.residual) << " (predicted " << predicted << ")\n";
  if (exceeds) log << "probe exceeds the predicted exponent beyond tolerance " << tol << "\n";
  return exceeds ? 1 : 0;
}

}  // namespace mxw::cli
