#include "torsionlab/cli.hpp"

#include "torsionlab/errors.hpp"
#include "torsionlab/experiments.hpp"
#include "torsionlab/field.hpp"
#include "torsionlab/serialize.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>

namespace torsionlab {
namespace {

/// Raised for flag combinations CLI11 cannot express; mapped to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct DomainFlags {
  std::string family;
  std::string spec_file;
  std::string name;
  std::optional<double> radius, width, height, notch, r_in, r_out, rho, tube_w, tube_len;
  std::optional<int> holes, balls;
  std::string vertices;
  std::string bitmap;
};

struct GridFlags {
  std::string h;
  std::string levels;
};

struct OutputFlags {
  std::string format = "json";
  std::string out;
};

void add_domain_flags(CLI::App* app, DomainFlags& f) {
  app->add_option("--domain", f.family,
                  "Domain family: disk, square, rectangle, l_shape, annulus, punctured_square, dumbbell, polygon, "
                  "bitmap");
  app->add_option("--spec", f.spec_file, "JSON file with a domain spec (instead of --domain)");
  app->add_option("--name", f.name, "Domain name used in reports");
  app->add_option("--radius", f.radius, "Disk radius, or ball radius of a dumbbell");
  app->add_option("--width", f.width, "Rectangle or L-shape width (square side)");
  app->add_option("--height", f.height, "Rectangle or L-shape height");
  app->add_option("--notch", f.notch, "Side of the square removed from the L-shape");
  app->add_option("--r-in", f.r_in, "Annulus inner radius");
  app->add_option("--r-out", f.r_out, "Annulus outer radius");
  app->add_option("--holes", f.holes, "Holes per side of a punctured square");
  app->add_option("--rho", f.rho, "Hole radius of a punctured square");
  app->add_option("--balls", f.balls, "Number of dumbbell balls");
  app->add_option("--tube-w", f.tube_w, "Dumbbell tube width");
  app->add_option("--tube-len", f.tube_len, "Dumbbell gap between balls");
  app->add_option("--vertices", f.vertices, "Polygon vertices as x,y;x,y;...");
  app->add_option("--bitmap", f.bitmap, "P5 PGM mask, one pixel per cell of side h");
}

void add_grid_flags(CLI::App* app, GridFlags& g) {
  auto* h = app->add_option("--h", g.h, "Grid spacing");
  auto* levels = app->add_option("--levels", g.levels, "Comma-separated halving grid spacings, e.g. 1/32,1/64,1/128");
  h->excludes(levels);
}

void add_output_flags(CLI::App* app, OutputFlags& o) {
  app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--out", o.out, "Write to this file instead of standard output");
}

double parse_number(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    const double num = std::stod(text.substr(0, slash), &used);
    if (used != slash) throw std::invalid_argument(text);
    const std::string rest = text.substr(slash + 1);
    const double den = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    return num / den;
  } catch (const std::logic_error&) {
    throw UsageError("not a number: '" + text + "'");
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> grid_levels(const GridFlags& g, double fallback) {
  if (!g.h.empty()) return {parse_number(g.h)};
  if (g.levels.empty()) return {fallback};
  std::vector<double> out;
  for (const std::string& item : split(g.levels, ',')) out.push_back(parse_number(item));
  return out;
}

DomainEntry build_domain(const DomainFlags& f) {
  const std::vector<std::pair<std::string, bool>> given = {
      {"radius", f.radius.has_value()}, {"width", f.width.has_value()},   {"height", f.height.has_value()},
      {"notch", f.notch.has_value()},   {"r-in", f.r_in.has_value()},     {"r-out", f.r_out.has_value()},
      {"holes", f.holes.has_value()},   {"rho", f.rho.has_value()},       {"balls", f.balls.has_value()},
      {"tube-w", f.tube_w.has_value()}, {"tube-len", f.tube_len.has_value()},
      {"vertices", !f.vertices.empty()}, {"bitmap", !f.bitmap.empty()}};
  DomainEntry entry;
  if (!f.spec_file.empty()) {
    if (!f.family.empty()) throw UsageError("--spec and --domain are mutually exclusive");
    for (const auto& [flag, set] : given) {
      if (set) throw UsageError("--" + flag + " conflicts with --spec");
    }
    const Json j = read_json(f.spec_file);
    entry.spec = domain_from_json(j);
    entry.name = j.contains("name") ? j.at("name").get<std::string>() : family_name(entry.spec);
  } else {
    if (f.family.empty()) throw UsageError("a domain is required: --domain or --spec");
    static const std::map<std::string, std::set<std::string>> allowed = {
        {"disk", {"radius"}},
        {"square", {"width"}},
        {"rectangle", {"width", "height"}},
        {"l_shape", {"width", "height", "notch"}},
        {"lshape", {"width", "height", "notch"}},
        {"annulus", {"r-in", "r-out"}},
        {"punctured_square", {"holes", "rho"}},
        {"punctured", {"holes", "rho"}},
        {"dumbbell", {"balls", "radius", "tube-w", "tube-len"}},
        {"polygon", {"vertices"}},
        {"bitmap", {"bitmap"}}};
    const auto it = allowed.find(f.family);
    if (it == allowed.end()) throw UsageError("unknown domain family '" + f.family + "'");
    for (const auto& [flag, set] : given) {
      if (set && !it->second.count(flag)) throw UsageError("--" + flag + " does not apply to --domain " + f.family);
    }
    const auto need = [](const auto& v, const char* flag) {
      if (!v) throw UsageError(std::string("--") + flag + " is required for this domain");
      return *v;
    };
    if (f.family == "disk") {
      entry.spec = Disk{f.radius.value_or(1.0)};
    } else if (f.family == "square") {
      entry.spec = Rectangle{f.width.value_or(1.0), f.width.value_or(1.0)};
    } else if (f.family == "rectangle") {
      entry.spec = Rectangle{need(f.width, "width"), need(f.height, "height")};
    } else if (f.family == "l_shape" || f.family == "lshape") {
      entry.spec = LShape{f.width.value_or(1.0), f.height.value_or(1.0), f.notch.value_or(0.5)};
    } else if (f.family == "annulus") {
      entry.spec = Annulus{need(f.r_in, "r-in"), need(f.r_out, "r-out")};
    } else if (f.family == "punctured_square" || f.family == "punctured") {
      entry.spec = PuncturedSquare{need(f.holes, "holes"), need(f.rho, "rho")};
    } else if (f.family == "dumbbell") {
      entry.spec = Dumbbell{need(f.balls, "balls"), f.radius.value_or(0.5), f.tube_w.value_or(0.3),
                            f.tube_len.value_or(0.25)};
    } else if (f.family == "polygon") {
      Polygon p;
      for (const std::string& pair : split(f.vertices, ';')) {
        const std::vector<std::string> xy = split(pair, ',');
        if (xy.size() != 2) throw UsageError("polygon vertices must be x,y pairs separated by ';'");
        p.vertices.emplace_back(parse_number(xy[0]), parse_number(xy[1]));
      }
      entry.spec = std::move(p);
    } else {
      if (f.bitmap.empty()) throw UsageError("--bitmap is required for this domain");
      entry.spec = Bitmap{f.bitmap};
    }
    validate(entry.spec);
    entry.name = f.family;
  }
  if (!f.name.empty()) entry.name = f.name;
  return entry;
}

void emit(const std::string& text, const OutputFlags& o, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_text(o.out, text);
  }
}

std::string summary_csv(const std::vector<FunctionalSummary>& rows) {
  std::ostringstream s;
  s << "domain,h,extrapolated,area,inradius,lambda,t_rigidity,norm_l2_w,norm_linf_w,product,f_value,phi_1inf,"
       "phi_12,dist_argmax_w,dist_argmax_u,hole_count,simply_connected\n";
  for (const FunctionalSummary& r : rows) {
    s << r.domain << ',' << format_double(r.h) << ',' << (r.extrapolated ? "true" : "false");
    for (double v : {r.area, r.inradius, r.lambda, r.t_rigidity, r.norm_l2_w, r.norm_linf_w, r.product, r.f_value,
                     r.phi_1inf, r.phi_12, r.dist_argmax_w, r.dist_argmax_u}) {
      s << ',' << format_double(v);
    }
    s << ',' << r.hole_count << ',' << (r.simply_connected ? "true" : "false") << '\n';
  }
  return s.str();
}

std::filesystem::path output_dir(const std::string& flag, const std::optional<Json>& config) {
  if (!flag.empty()) return flag;
  if (config && config->contains("out_dir")) return config->at("out_dir").get<std::string>();
  if (const char* env = std::getenv("TORSIONLAB_OUT_DIR"); env && *env) return env;
  return "results";
}

std::string check_list() {
  std::string text = "Checks:\n";
  for (const CheckInfo& c : check_registry()) text += "  " + c.id + "  " + c.description + "\n";
  return text;
}

int cmd_constants(const OutputFlags& o, double c0, std::ostream& out) {
  const ConstantTable& t = constant_table(c0);
  if (o.format == "json") {
    emit(to_json(t).dump(2) + "\n", o, out);
  } else {
    std::string csv = "name,value,decimal\n";
    const Json j = to_json(t);
    for (const auto& [name, value] : j.items()) {
      if (!value.is_number()) continue;
      const auto dec = t.decimal.find(name);
      csv += name + "," + format_double(value.get<double>()) + "," +
             (dec == t.decimal.end() ? std::string() : dec->second) + "\n";
    }
    emit(csv, o, out);
  }
  return kExitOk;
}

int cmd_solve(const DomainEntry& entry, const std::vector<double>& levels, const SolveOptions& opts,
              const OutputFlags& o, const std::string& fields_dir, std::ostream& out) {
  std::vector<FunctionalSummary> summaries;
  for (double h : levels) {
    DomainMask mask = rasterize(entry.spec, h);
    mask.name = entry.name;
    const TorsionSolution w = solve_torsion(mask, opts.tol);
    const SpectralSolution u = solve_principal_eigen(mask, opts.eigen);
    const DistanceField d = distance_field(mask);
    summaries.push_back(summarize(mask, w, u, d));
    if (!fields_dir.empty() && h == levels.back()) {
      const std::filesystem::path dir = fields_dir;
      std::filesystem::create_directories(dir);
      write_pgm(mask, dir / "mask.pgm");
      write_raw(w.w, dir / "torsion.raw");
      write_raw(u.u, dir / "eigenfunction.raw");
      write_csv(w.w, mask, dir / "torsion.csv");
      write_csv(u.u, mask, dir / "eigenfunction.csv");
    }
  }
  const FunctionalSummary summary = combine_levels(summaries);
  if (o.format == "json") {
    Json lv = Json::array();
    for (const FunctionalSummary& s : summaries) lv.push_back(to_json(s));
    const Json j{{"kind", "solve"},
                 {"domain", entry.name},
                 {"spec", to_json(entry.spec)},
                 {"summary", to_json(summary)},
                 {"levels", lv},
                 {"constants_snapshot_id", constant_table().snapshot_id}};
    emit(j.dump(2) + "\n", o, out);
  } else {
    std::vector<FunctionalSummary> rows = summaries;
    if (summary.extrapolated) rows.push_back(summary);
    emit(summary_csv(rows), o, out);
  }
  return kExitOk;
}

int cmd_audit(DomainEntry entry, const std::vector<double>& levels, const SolveOptions& opts, const OutputFlags& o,
              const std::string& checks_flag, std::optional<double> c, const std::string& x0, double c0,
              std::ostream& out) {
  std::vector<std::string> checks = split(checks_flag, ',');
  for (const std::string& id : checks) {
    const auto& reg = check_registry();
    if (std::none_of(reg.begin(), reg.end(), [&](const CheckInfo& i) { return i.id == id; })) {
      throw UsageError("unknown check id '" + id + "'");
    }
  }
  if (c) {
    if (!(*c > 0.0)) throw UsageError("--c must be positive");
    entry.pointwise_c = *c;
  }
  if (!x0.empty()) {
    const std::vector<std::string> xy = split(x0, ',');
    if (xy.size() != 2) throw UsageError("--x0 must be x,y");
    entry.boundary_point = Eigen::Vector2d(parse_number(xy[0]), parse_number(xy[1]));
  }
  const bool full = checks.empty() || std::any_of(checks.begin(), checks.end(),
                                                  [](const std::string& id) { return !is_summary_check(id); });
  const ConstantTable& k = constant_table(c0);
  DomainResult result = analyze_domain(entry, levels, opts, k, full);
  if (result.non_convergence) throw NoConvergence(result.error, 0, 0.0);
  if (!result.error.empty()) throw Error(result.error);
  if (!checks.empty()) {
    std::erase_if(result.reports, [&](const BoundReport& r) {
      return std::find(checks.begin(), checks.end(), r.check_id) == checks.end();
    });
  }
  const bool failed = std::any_of(result.reports.begin(), result.reports.end(),
                                  [](const BoundReport& r) { return r.status == CheckStatus::Fail; });
  if (o.format == "json") {
    Json reports = Json::array();
    for (const BoundReport& r : result.reports) reports.push_back(to_json(r));
    const Json j{{"kind", "audit"},
                 {"domain", entry.name},
                 {"spec", to_json(entry.spec)},
                 {"summary", to_json(result.summary)},
                 {"reports", reports},
                 {"constants_snapshot_id", k.snapshot_id}};
    emit(j.dump(2) + "\n", o, out);
  } else {
    std::string csv = report_csv_header() + "\n";
    for (const BoundReport& r : result.reports) csv += report_csv_row(r) + "\n";
    emit(csv, o, out);
  }
  return failed ? kExitCheckFailed : kExitOk;
}

int cmd_scenario(ExperimentConfig cfg, const std::optional<Json>& raw, const std::string& out_dir_flag,
                 std::ostream& out) {
  cfg.out_dir = output_dir(out_dir_flag, raw);
  const bool ok = run_scenario(cfg);
  out << cfg.scenario << ": " << (ok ? "pass" : "FAIL") << " -> " << (cfg.out_dir / (cfg.scenario + ".json")).string()
      << "\n";
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_convergence(const DomainEntry& entry, const std::vector<double>& levels, const SolveOptions& opts,
                    const OutputFlags& o, std::ostream& out) {
  if (levels.size() < 3) throw UsageError("convergence needs --levels with at least three halving spacings");
  const ConvergenceReport r = convergence_study(entry, levels, opts);
  emit(o.format == "json" ? to_json(r).dump(2) + "\n" : to_csv(r), o, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Torsion and principal-eigenvalue solver with inequality audits"};
  app.require_subcommand(1, 1);
  app.footer(check_list());
  app.set_version_flag("--version", "0.1.0");
  app.set_help_flag("--help", "Print this help message and exit");

  OutputFlags constants_out, solve_out, audit_out, conv_out;
  DomainFlags solve_domain, audit_domain, conv_domain;
  GridFlags solve_grid, audit_grid, conv_grid;
  SolveOptions opts;
  double c0 = kBlochLandauLower;
  std::string fields_dir, checks, x0, config_path, out_dir, family;
  std::optional<double> c;
  int threads = -1;
  bool validate_oracles = false;

  auto* constants = app.add_subcommand("constants", "Print every constant with 30-digit decimal strings");
  add_output_flags(constants, constants_out);
  constants->add_option("--c0", c0, "Bloch-Landau lower bound")->check(CLI::PositiveNumber);

  const auto add_solver_flags = [&](CLI::App* sub) {
    sub->add_option("--tol", opts.tol, "Relative CG residual tolerance")->check(CLI::Range(1e-16, 1e-4));
    sub->add_option("--eigen-tol", opts.eigen.tol_rel, "Relative eigenvalue tolerance")
        ->check(CLI::PositiveNumber);
  };

  auto* solve = app.add_subcommand("solve", "Solve torsion and eigenproblem on one domain and summarize");
  add_domain_flags(solve, solve_domain);
  add_grid_flags(solve, solve_grid);
  add_output_flags(solve, solve_out);
  add_solver_flags(solve);
  solve->add_option("--save-fields", fields_dir, "Directory for mask.pgm and raw/csv fields of the finest grid");

  auto* audit = app.add_subcommand("audit", "Audit inequalities on one domain");
  add_domain_flags(audit, audit_domain);
  add_grid_flags(audit, audit_grid);
  add_output_flags(audit, audit_out);
  add_solver_flags(audit);
  audit->add_option("--checks", checks, "Comma-separated check ids (default: all)");
  audit->add_option("--c", c, "Free parameter of the pointwise torsion bound");
  audit->add_option("--x0", x0, "Boundary point x,y for the boundary-growth check");
  audit->add_option("--c0", c0, "Bloch-Landau lower bound")->check(CLI::PositiveNumber);
  audit->footer(check_list());

  auto* corpus = app.add_subcommand("corpus", "Audit every domain of a corpus config");
  auto* sweep = app.add_subcommand("sweep", "Run a punctured-square or dumbbell sweep");
  auto* oracle = app.add_subcommand("oracle", "Validate the solver against closed-form values");
  for (CLI::App* sub : {corpus, sweep, oracle}) {
    sub->add_option("--config", config_path, "Experiment config JSON")->check(CLI::ExistingFile);
    sub->add_option("--out-dir", out_dir, "Output directory (default: TORSIONLAB_OUT_DIR or ./results)");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  }
  corpus->add_flag("--validate", validate_oracles, "Run the oracle suite first and mark results accordingly");
  sweep->add_option("--family", family, "Built-in sweep when no config is given")
      ->check(CLI::IsMember({"punctured", "dumbbell"}));

  auto* conv = app.add_subcommand("convergence", "Observed convergence orders over halving grids");
  add_domain_flags(conv, conv_domain);
  add_grid_flags(conv, conv_grid);
  add_output_flags(conv, conv_out);
  add_solver_flags(conv);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*constants) return cmd_constants(constants_out, c0, out);
    if (*solve) {
      const DomainEntry entry = build_domain(solve_domain);
      return cmd_solve(entry, grid_levels(solve_grid, 1.0 / 64), opts, solve_out, fields_dir, out);
    }
    if (*audit) {
      const DomainEntry entry = build_domain(audit_domain);
      return cmd_audit(entry, grid_levels(audit_grid, 1.0 / 64), opts, audit_out, checks, c, x0, c0, out);
    }
    if (*conv) {
      const DomainEntry entry = build_domain(conv_domain);
      return cmd_convergence(entry, grid_levels(conv_grid, 1.0 / 64), opts, conv_out, out);
    }
    std::optional<Json> raw;
    if (!config_path.empty()) raw = read_json(config_path);
    ExperimentConfig cfg;
    if (*corpus) {
      cfg = raw ? config_from_json(*raw) : default_corpus_config();
      if (cfg.kind != ScenarioKind::Corpus) throw UsageError("config is not a corpus scenario");
      if (validate_oracles) cfg.validate_with_oracles = true;
    } else if (*sweep) {
      if (raw && !family.empty()) throw UsageError("--config and --family are mutually exclusive");
      if (!raw && family.empty()) throw UsageError("sweep needs --config or --family");
      cfg = raw ? config_from_json(*raw)
                : (family == "punctured" ? default_punctured_config() : default_dumbbell_config());
      if (cfg.kind != ScenarioKind::SweepPunctured && cfg.kind != ScenarioKind::SweepDumbbell) {
        throw UsageError("config is not a sweep scenario");
      }
    } else {
      cfg = raw ? config_from_json(*raw) : default_oracle_config();
      if (cfg.kind != ScenarioKind::Oracle) throw UsageError("config is not an oracle scenario");
    }
    if (threads >= 0) cfg.threads = threads;
    return cmd_scenario(cfg, raw, out_dir, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const NoConvergence& e) {
    err << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const BadSpec& e) {
    err << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const EmptyRaster& e) {
    err << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RasterInfeasible& e) {
    err << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  }
}

}  // namespace torsionlab
