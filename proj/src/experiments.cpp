#include "torsionlab/experiments.hpp"

#include "torsionlab/errors.hpp"
#include "torsionlab/extrapolation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

namespace torsionlab {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Results land at their input index regardless of scheduling.
template <class F>
auto parallel_map(std::size_t count, int threads, F&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errors(count);
  unsigned workers = threads > 0 ? unsigned(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, unsigned(std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        out[k] = fn(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

bool halving(const std::vector<double>& levels) {
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (std::abs(levels[k - 1] / levels[k] - 2.0) > 1e-9) return false;
  }
  return true;
}

void check_levels(const std::vector<double>& levels, const std::string& what) {
  if (levels.empty()) throw BadSpec(what + ": no grid levels");
  if (levels.size() == 2) throw BadSpec(what + ": extrapolation needs at least three levels");
  for (double h : levels) {
    if (!(h > 0.0)) throw BadSpec(what + ": grid spacing must be positive");
  }
  if (!halving(levels)) throw BadSpec(what + ": grid levels must halve from coarse to fine");
}

template <class T>
void check_sorted(const std::vector<T>& v, const std::string& what) {
  if (v.empty()) throw BadSpec(what + " must be nonempty");
  if (!std::is_sorted(v.begin(), v.end()) || std::adjacent_find(v.begin(), v.end()) != v.end()) {
    throw BadSpec(what + " must be strictly increasing");
  }
}

std::vector<double> levels_from_json(const Json& j, const char* key) {
  if (!j.at(key).is_array()) throw BadSpec(std::string(key) + " must be an array");
  std::vector<double> out;
  for (const Json& v : j.at(key)) {
    if (!v.is_number()) throw BadSpec(std::string(key) + " entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

DomainEntry entry_from_json(const Json& j) {
  DomainEntry e;
  e.spec = domain_from_json(j);
  e.name = j.contains("name") ? j.at("name").get<std::string>() : family_name(e.spec);
  if (j.contains("levels")) e.levels = levels_from_json(j, "levels");
  if (j.contains("boundary_point")) {
    const Json& p = j.at("boundary_point");
    if (!p.is_array() || p.size() != 2) throw BadSpec("boundary_point must be [x, y]");
    e.boundary_point = Eigen::Vector2d(p[0].get<double>(), p[1].get<double>());
  }
  if (j.contains("c")) e.pointwise_c = j.at("c").get<double>();
  return e;
}

Json entry_to_json(const DomainEntry& e) {
  Json j{{"name", e.name}};
  const Json spec = to_json(e.spec);
  for (const auto& [k, v] : spec.items()) j[k] = v;
  if (!e.levels.empty()) j["levels"] = e.levels;
  if (e.boundary_point) j["boundary_point"] = {e.boundary_point->x(), e.boundary_point->y()};
  if (e.pointwise_c) j["c"] = *e.pointwise_c;
  return j;
}

std::optional<Eigen::Vector2d> boundary_point_for(const DomainEntry& e) {
  if (e.boundary_point) return e.boundary_point;
  if (const auto* l = std::get_if<LShape>(&e.spec)) return Eigen::Vector2d(l->a - l->notch, l->b - l->notch);
  return std::nullopt;
}

BoundReport not_applicable_report(const NotApplicable& na, const std::string& domain, const ConstantTable& k) {
  BoundReport r;
  r.check_id = na.check_id();
  r.domain = domain;
  r.status = CheckStatus::NotApplicable;
  r.pass = true;
  r.note = na.what();
  r.constants_snapshot_id = k.snapshot_id;
  return r;
}

/// Lowest-index inside cell at least 3h from the outside, distinct from `avoid`.
std::optional<Cell> near_boundary_source(const DomainMask& mask, const DistanceField& dist, const Cell& avoid) {
  for (int j = 0; j < mask.grid.ny; ++j) {
    for (int i = 0; i < mask.grid.nx; ++i) {
      if (mask.inside(i, j) && dist.d(i, j) >= 3.0 * mask.grid.h && !(Cell{i, j} == avoid)) return Cell{i, j};
    }
  }
  return std::nullopt;
}

OracleCheck compare(const std::string& domain, const std::string& quantity, double computed, double expected,
                    double tolerance) {
  OracleCheck c{domain, quantity, computed, expected, std::abs(computed / expected - 1.0), tolerance, false};
  c.pass = c.rel_error <= tolerance;
  return c;
}

void summary_row(std::ostringstream& out, const FunctionalSummary& s) {
  out << format_double(s.area) << ',' << format_double(s.inradius) << ',' << format_double(s.lambda) << ','
      << format_double(s.t_rigidity) << ',' << format_double(s.norm_linf_w) << ',' << format_double(s.product)
      << ',' << format_double(s.f_value) << ',' << s.hole_count << ',' << (s.simply_connected ? "true" : "false");
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Oracle: return "oracle";
    case ScenarioKind::Corpus: return "corpus";
    case ScenarioKind::SweepPunctured: return "sweep_punctured";
    case ScenarioKind::SweepDumbbell: return "sweep_dumbbell";
    case ScenarioKind::Convergence: return "convergence";
  }
  return "corpus";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  for (ScenarioKind k : {ScenarioKind::Oracle, ScenarioKind::Corpus, ScenarioKind::SweepPunctured,
                         ScenarioKind::SweepDumbbell, ScenarioKind::Convergence}) {
    if (to_string(k) == s) return k;
  }
  throw BadSpec("unknown scenario kind: " + s);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.scenario.empty()) throw BadSpec("scenario id must be nonempty");
  if (!(cfg.solve.tol > 0.0 && cfg.solve.tol <= 1e-4)) throw BadSpec("solver tolerance must lie in (0, 1e-4]");
  if (!(cfg.solve.eigen.tol_rel > 0.0)) throw BadSpec("eigen tolerance must be positive");
  if (!(cfg.bloch_landau_lower > 0.0)) throw BadSpec("Bloch-Landau lower bound must be positive");
  switch (cfg.kind) {
    case ScenarioKind::Oracle:
    case ScenarioKind::Corpus:
    case ScenarioKind::Convergence:
      if (cfg.domains.empty()) throw BadSpec("scenario needs at least one domain");
      check_levels(cfg.levels, "levels");
      for (const DomainEntry& e : cfg.domains) {
        if (!e.levels.empty()) check_levels(e.levels, e.name + " levels");
        if (cfg.kind == ScenarioKind::Convergence && (e.levels.empty() ? cfg.levels : e.levels).size() < 3) {
          throw BadSpec("convergence study needs at least three levels");
        }
      }
      break;
    case ScenarioKind::SweepPunctured:
      check_sorted(cfg.punctured.N, "punctured N list");
      check_sorted(cfg.punctured.rho, "punctured rho list");
      if (!(cfg.punctured.h > 0.0)) throw BadSpec("punctured sweep h must be positive");
      break;
    case ScenarioKind::SweepDumbbell:
      check_sorted(cfg.dumbbell.n, "dumbbell n list");
      check_levels(cfg.dumbbell.levels, "dumbbell levels");
      validate(DomainSpec{Dumbbell{cfg.dumbbell.n.front(), cfg.dumbbell.R, cfg.dumbbell.tube_w,
                                   cfg.dumbbell.tube_len}});
      break;
  }
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw BadSpec("experiment config must be a JSON object");
  static const std::vector<std::string> known = {"scenario", "kind",     "domains",   "levels",
                                                  "tol",      "eigen_tol", "punctured", "dumbbell",
                                                  "out_dir",  "threads",  "c0",        "validate_with_oracles"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw BadSpec("unknown config key: " + key);
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("kind")) cfg.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
    cfg.scenario = j.contains("scenario") ? j.at("scenario").get<std::string>() : to_string(cfg.kind);
    if (j.contains("domains")) {
      for (const Json& d : j.at("domains")) cfg.domains.push_back(entry_from_json(d));
    }
    if (j.contains("levels")) cfg.levels = levels_from_json(j, "levels");
    if (j.contains("tol")) cfg.solve.tol = j.at("tol").get<double>();
    if (j.contains("eigen_tol")) cfg.solve.eigen.tol_rel = j.at("eigen_tol").get<double>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("c0")) cfg.bloch_landau_lower = j.at("c0").get<double>();
    if (j.contains("validate_with_oracles")) cfg.validate_with_oracles = j.at("validate_with_oracles").get<bool>();
    if (j.contains("punctured")) {
      const Json& p = j.at("punctured");
      if (p.contains("N")) cfg.punctured.N = p.at("N").get<std::vector<int>>();
      if (p.contains("rho")) cfg.punctured.rho = p.at("rho").get<std::vector<double>>();
      if (p.contains("h")) cfg.punctured.h = p.at("h").get<double>();
    }
    if (j.contains("dumbbell")) {
      const Json& d = j.at("dumbbell");
      if (d.contains("n")) cfg.dumbbell.n = d.at("n").get<std::vector<int>>();
      if (d.contains("R")) cfg.dumbbell.R = d.at("R").get<double>();
      if (d.contains("tube_w")) cfg.dumbbell.tube_w = d.at("tube_w").get<double>();
      if (d.contains("tube_len")) cfg.dumbbell.tube_len = d.at("tube_len").get<double>();
      if (d.contains("levels")) cfg.dumbbell.levels = levels_from_json(d, "levels");
    }
  } catch (const Json::exception& e) {
    throw BadSpec(std::string("malformed experiment config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

Json to_json(const ExperimentConfig& cfg) {
  Json domains = Json::array();
  for (const DomainEntry& e : cfg.domains) domains.push_back(entry_to_json(e));
  return Json{{"scenario", cfg.scenario},
              {"kind", to_string(cfg.kind)},
              {"domains", domains},
              {"levels", cfg.levels},
              {"tol", cfg.solve.tol},
              {"eigen_tol", cfg.solve.eigen.tol_rel},
              {"punctured", {{"N", cfg.punctured.N}, {"rho", cfg.punctured.rho}, {"h", cfg.punctured.h}}},
              {"dumbbell",
               {{"n", cfg.dumbbell.n},
                {"R", cfg.dumbbell.R},
                {"tube_w", cfg.dumbbell.tube_w},
                {"tube_len", cfg.dumbbell.tube_len},
                {"levels", cfg.dumbbell.levels}}},
              {"out_dir", cfg.out_dir.string()},
              {"threads", cfg.threads},
              {"c0", cfg.bloch_landau_lower},
              {"validate_with_oracles", cfg.validate_with_oracles}};
}

ExperimentConfig default_oracle_config() {
  ExperimentConfig cfg;
  cfg.scenario = "oracle";
  cfg.kind = ScenarioKind::Oracle;
  cfg.levels = {1.0 / 64, 1.0 / 128, 1.0 / 256};
  cfg.domains = {{"disk", Disk{1.0}, {}, {}, {}},
                 {"square", Rectangle{1.0, 1.0}, {}, {}, {}},
                 {"slab", Rectangle{1.0, 32.0}, {1.0 / 8, 1.0 / 16, 1.0 / 32}, {}, {}}};
  return cfg;
}

ExperimentConfig default_corpus_config() {
  ExperimentConfig cfg;
  cfg.scenario = "corpus";
  cfg.kind = ScenarioKind::Corpus;
  cfg.levels = {1.0 / 32, 1.0 / 64, 1.0 / 128};
  cfg.domains = {{"disk", Disk{1.0}, {}, {}, {}},
                 {"square", Rectangle{1.0, 1.0}, {}, {}, {}},
                 {"rectangle_1x8", Rectangle{1.0, 8.0}, {}, {}, {}},
                 {"lshape", LShape{1.0, 1.0, 0.5}, {}, {}, {}},
                 {"dumbbell", Dumbbell{3, 0.5, 0.3, 0.25}, {}, {}, {}},
                 {"punctured_square", PuncturedSquare{3, 0.1}, {}, {}, {}},
                 {"annulus", Annulus{0.5, 1.0}, {}, {}, {}}};
  return cfg;
}

ExperimentConfig default_punctured_config() {
  ExperimentConfig cfg;
  cfg.scenario = "sweep_punctured";
  cfg.kind = ScenarioKind::SweepPunctured;
  return cfg;
}

ExperimentConfig default_dumbbell_config() {
  ExperimentConfig cfg;
  cfg.scenario = "sweep_dumbbell";
  cfg.kind = ScenarioKind::SweepDumbbell;
  return cfg;
}

DomainResult analyze_domain(const DomainEntry& entry, const std::vector<double>& levels, const SolveOptions& opts,
                            const ConstantTable& k, bool full_audit) {
  const auto start = Clock::now();
  DomainResult result;
  result.name = entry.name;
  result.spec = entry.spec;
  try {
    std::optional<DomainMask> mask;
    std::optional<TorsionSolution> torsion;
    std::optional<SpectralSolution> spectral;
    std::optional<DistanceField> dist;
    for (double h : levels) {
      mask = rasterize(entry.spec, h);
      mask->name = entry.name;
      torsion = solve_torsion(*mask, opts.tol);
      spectral = solve_principal_eigen(*mask, opts.eigen);
      dist = distance_field(*mask);
      result.levels.push_back(summarize(*mask, *torsion, *spectral, *dist));
    }
    result.summary = combine_levels(result.levels);
    result.reports = audit_summary_all(result.summary, k);

    if (full_audit) {
      const auto guarded = [&](auto&& run) {
        try {
          run();
        } catch (const NotApplicable& na) {
          result.reports.push_back(not_applicable_report(na, entry.name, k));
        }
      };
      const double lambda = spectral->lambda;
      guarded([&] {
        result.reports.push_back(
            audit_pointwise_w(*mask, *torsion, *dist, lambda, entry.pointwise_c.value_or(k.distance_gain_argmax), k));
      });
      const Cell q = spectral->argmax_cell;
      const double range = inradius(*dist).value;
      const ScalarField gq = solve_green_column(*mask, q, opts.tol);
      std::vector<BoundReport> kernel = audit_green_kernel(*mask, gq, q, *dist, lambda, range, k);
      if (const auto edge = near_boundary_source(*mask, *dist, q)) {
        const ScalarField ge = solve_green_column(*mask, *edge, opts.tol);
        for (BoundReport& r : audit_green_kernel(*mask, ge, *edge, *dist, lambda, range, k)) {
          kernel.push_back(std::move(r));
        }
      }
      result.reports.insert(result.reports.end(), kernel.begin(), kernel.end());
      guarded([&] { result.reports.push_back(audit_refined_identity(*mask, *torsion, *spectral, gq, k)); });
      if (const auto x0 = boundary_point_for(entry)) {
        guarded([&] {
          BoundReport r = audit_boundary_growth(entry.spec, *x0, k.growth_radius, levels.back(), k, 1.0, opts.tol);
          r.domain = entry.name;
          result.reports.push_back(std::move(r));
        });
      }
    }
    sort_reports(result.reports);
  } catch (const NoConvergence& e) {
    result.error = e.what();
    result.non_convergence = true;
  } catch (const Error& e) {
    result.error = e.what();
  }
  result.seconds = seconds_since(start);
  return result;
}

SeriesValue square_torsional_rigidity(int max_index) {
  // sum over odd m, n of 64 / (pi^6 m^2 n^2 (m^2 + n^2)); inner sums run from
  // small to large magnitude within each row
  const double pi = std::numbers::pi;
  const double c = 64.0 / std::pow(pi, 6);
  double total = 0.0;
  for (int m = max_index; m >= 1; m -= 2) {
    if (m % 2 == 0) continue;
    double row = 0.0;
    const double m2 = double(m) * m;
    for (int n = max_index - (max_index % 2 == 0); n >= 1; n -= 2) {
      const double n2 = double(n) * n;
      row += 1.0 / (n2 * (m2 + n2));
    }
    total += row / m2;
  }
  const double M = max_index;
  // pairs with max(m, n) > M: at most 2 sum_{m > M odd} (pi^2/8) m^-4
  const double tail = 2.0 * c * (pi * pi / 8.0) / (6.0 * M * M * M);
  return {c * total, tail};
}

SeriesValue square_max_torsion(int max_index) {
  const double pi = std::numbers::pi;
  double sum = 0.0;
  for (int m = max_index - (max_index % 2 == 0); m >= 1; m -= 2) {
    const double sign = ((m - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    sum += sign * 4.0 / (std::pow(pi, 3) * std::pow(double(m), 3) * std::cosh(m * pi / 2.0));
  }
  const double M = max_index + 2;
  const double tail = 8.0 / (std::pow(pi, 3) * M * M * M) * std::exp(-M * pi / 2.0);
  return {0.125 - sum, tail};
}

OracleReport run_oracle_suite(const ExperimentConfig& cfg) {
  const ConstantTable& k = constant_table(cfg.bloch_landau_lower);
  OracleReport report;
  report.domains = parallel_map(cfg.domains.size(), cfg.threads, [&](std::size_t i) {
    const DomainEntry& e = cfg.domains[i];
    return analyze_domain(e, e.levels.empty() ? cfg.levels : e.levels, cfg.solve, k, false);
  });
  const double j0sq = k.bessel_zero * k.bessel_zero;
  const double pi = std::numbers::pi;
  for (const DomainResult& d : report.domains) {
    if (!d.error.empty()) {
      report.checks.push_back({d.name, "solve", 0.0, 0.0, 1.0, 0.0, false});
      continue;
    }
    const FunctionalSummary& s = d.summary;
    if (const auto* disk = std::get_if<Disk>(&d.spec)) {
      const double R = disk->R;
      report.checks.push_back(compare(d.name, "lambda", s.lambda, j0sq / (R * R), 0.015));
      report.checks.push_back(compare(d.name, "norm_linf_w", s.norm_linf_w, R * R / 4.0, 0.015));
      report.checks.push_back(compare(d.name, "t_rigidity", s.t_rigidity, pi * std::pow(R, 4) / 8.0, 0.015));
      report.checks.push_back(compare(d.name, "product", s.product, j0sq / 4.0, 0.015));
    } else if (const auto* rect = std::get_if<Rectangle>(&d.spec)) {
      const double a = rect->a, b = rect->b;
      const double lambda = pi * pi * (1.0 / (a * a) + 1.0 / (b * b));
      if (a == b) {
        report.checks.push_back(compare(d.name, "lambda", s.lambda, lambda, 0.005));
        report.checks.push_back(
            compare(d.name, "t_rigidity", s.t_rigidity, square_torsional_rigidity().value * std::pow(a, 4), 0.01));
        report.checks.push_back(
            compare(d.name, "norm_linf_w", s.norm_linf_w, square_max_torsion().value * a * a, 0.01));
      } else {
        report.checks.push_back(compare(d.name, "lambda", s.lambda, lambda, 0.02));
        if (std::max(a, b) >= 16.0 * std::min(a, b)) {
          report.checks.push_back(compare(d.name, "product", s.product, pi * pi / 8.0, 0.02));
        }
      }
    }
  }
  report.passed = std::all_of(report.checks.begin(), report.checks.end(), [](const OracleCheck& c) { return c.pass; });
  return report;
}

void require_oracles(const OracleReport& report) {
  for (const OracleCheck& c : report.checks) {
    if (!c.pass) {
      throw OracleViolation(c.domain + " " + c.quantity + ": relative error " + format_double(c.rel_error) +
                            " exceeds " + format_double(c.tolerance));
    }
  }
}

CorpusReport run_corpus_audit(const ExperimentConfig& cfg) {
  const ConstantTable& k = constant_table(cfg.bloch_landau_lower);
  CorpusReport report;
  if (cfg.validate_with_oracles) {
    ExperimentConfig oracle = default_oracle_config();
    oracle.solve = cfg.solve;
    oracle.threads = cfg.threads;
    report.validation = run_oracle_suite(oracle).passed ? "validated" : "unvalidated";
  }
  report.domains = parallel_map(cfg.domains.size(), cfg.threads, [&](std::size_t i) {
    const DomainEntry& e = cfg.domains[i];
    return analyze_domain(e, e.levels.empty() ? cfg.levels : e.levels, cfg.solve, k, true);
  });
  for (const DomainResult& d : report.domains) {
    if (!d.error.empty()) report.errors.push_back(d.name + ": " + d.error);
    for (const BoundReport& r : d.reports) {
      switch (r.status) {
        case CheckStatus::Pass: ++report.pass_count; break;
        case CheckStatus::NotApplicable: ++report.not_applicable_count; break;
        case CheckStatus::Fail:
          ++report.fail_count;
          report.failures.push_back(r);
          break;
      }
    }
  }
  return report;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw FitDegenerate("log-log fit needs at least three points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw FitDegenerate("log-log fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 1e-14)) throw FitDegenerate("log-log fit has no spread in x");
  return (n * sxy - sx * sy) / denom;
}

SweepReport sweep_punctured(const ExperimentConfig& cfg) {
  const ConstantTable& k = constant_table(cfg.bloch_landau_lower);
  const double h = cfg.punctured.h;
  struct Point {
    int N;
    double rho;
  };
  std::vector<Point> points;
  for (int N : cfg.punctured.N) {
    for (double rho : cfg.punctured.rho) points.push_back({N, rho});
  }
  SweepReport report;
  report.family = "punctured_square";
  const DomainResult base = analyze_domain({"square", Rectangle{1.0, 1.0}, {}, {}, {}}, {h}, cfg.solve, k, false);
  if (!base.error.empty()) throw Error("baseline square failed: " + base.error);
  report.baseline = base.summary;

  report.rows = parallel_map(points.size(), cfg.threads, [&](std::size_t i) {
    const Point p = points[i];
    SweepRow row;
    std::ostringstream label;
    label << "N=" << p.N << ",rho=" << format_double(p.rho);
    row.label = label.str();
    row.parameter = p.rho;
    if (!(p.rho > 3.0 * h)) {
      row.error = RasterInfeasible("hole radius must exceed 3h").what();
      return row;
    }
    const DomainEntry entry{"punctured_square_" + row.label, PuncturedSquare{p.N, p.rho}, {}, {}, {}};
    const DomainResult d = analyze_domain(entry, {h}, cfg.solve, k, false);
    row.summary = d.summary;
    row.reports = d.reports;
    row.error = d.error;
    row.seconds = d.seconds;
    if (d.error.empty()) row.torsion_ratio = d.summary.t_rigidity / (d.summary.area * d.summary.area);
    return row;
  });

  bool any = false;
  report.product_between = true;
  report.holes_match = true;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const SweepRow& row = report.rows[i];
    if (!row.error.empty()) continue;
    any = true;
    if (!(row.summary.product > 1.0 && row.summary.product < report.baseline->product)) {
      report.product_between = false;
    }
    if (row.summary.hole_count != points[i].N * points[i].N) report.holes_match = false;
  }
  if (!any) {
    report.product_between = false;
    report.holes_match = false;
  }
  return report;
}

SweepReport sweep_dumbbell(const ExperimentConfig& cfg) {
  const ConstantTable& k = constant_table(cfg.bloch_landau_lower);
  const DumbbellSweep& p = cfg.dumbbell;
  SweepReport report;
  report.family = "dumbbell";
  report.rows = parallel_map(p.n.size(), cfg.threads, [&](std::size_t i) {
    SweepRow row;
    row.label = "n=" + std::to_string(p.n[i]);
    row.parameter = p.n[i];
    const DomainEntry entry{"dumbbell_" + row.label, Dumbbell{p.n[i], p.R, p.tube_w, p.tube_len}, {}, {}, {}};
    const DomainResult d = analyze_domain(entry, p.levels, cfg.solve, k, false);
    row.summary = d.summary;
    row.reports = d.reports;
    row.error = d.error;
    row.seconds = d.seconds;
    if (d.error.empty()) row.torsion_ratio = d.summary.t_rigidity / (d.summary.area * d.summary.area);
    return row;
  });
  std::vector<double> xs, ys;
  for (const SweepRow& row : report.rows) {
    if (!row.error.empty()) continue;
    xs.push_back(row.parameter);
    ys.push_back(row.torsion_ratio);
  }
  report.slope = log_log_slope(xs, ys);
  report.slope_in_range = report.slope >= -1.5 && report.slope <= -0.5;
  report.ratio_decreasing = std::adjacent_find(ys.begin(), ys.end(), std::less_equal<>()) == ys.end();
  return report;
}

ConvergenceReport convergence_study(const DomainEntry& entry, const std::vector<double>& levels,
                                    const SolveOptions& opts) {
  if (levels.size() < 3) throw BadSpec("convergence study needs at least three levels");
  if (!halving(levels)) throw Error("grid levels must halve h from coarse to fine");
  const ConstantTable& k = constant_table();
  ConvergenceReport report;
  report.domain = entry.name;
  report.levels = levels;
  std::vector<FunctionalSummary> summaries;
  for (double h : levels) {
    const DomainResult d = analyze_domain(entry, {h}, opts, k, false);
    if (d.non_convergence) throw NoConvergence(d.error, 0, 0.0);
    if (!d.error.empty()) throw Error(d.error);
    summaries.push_back(d.summary);
  }
  const std::vector<std::pair<std::string, double FunctionalSummary::*>> quantities = {
      {"area", &FunctionalSummary::area},
      {"inradius", &FunctionalSummary::inradius},
      {"lambda", &FunctionalSummary::lambda},
      {"t_rigidity", &FunctionalSummary::t_rigidity},
      {"norm_l2_w", &FunctionalSummary::norm_l2_w},
      {"norm_linf_w", &FunctionalSummary::norm_linf_w},
      {"product", &FunctionalSummary::product},
      {"f_value", &FunctionalSummary::f_value}};
  for (const auto& [name, member] : quantities) {
    ConvergenceRow row;
    row.quantity = name;
    std::vector<LevelValue> values;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      row.values.push_back(summaries[i].*member);
      values.push_back({levels[i], summaries[i].*member});
    }
    try {
      const ExtrapolationResult e = richardson(values);
      row.extrapolated = e.value;
      row.error_estimate = e.error_estimate;
      row.observed_order = e.observed_order;
      row.monotone = true;
    } catch (const DegenerateSequence&) {
      row.extrapolated = row.values.back();
      row.error_estimate = std::abs(row.values.back() - row.values[row.values.size() - 2]);
      row.monotone = false;
    }
    report.rows.push_back(row);
  }
  return report;
}

Json to_json(const DomainResult& r) {
  Json levels = Json::array();
  for (const FunctionalSummary& s : r.levels) levels.push_back(to_json(s));
  Json reports = Json::array();
  for (const BoundReport& b : r.reports) reports.push_back(to_json(b));
  return Json{{"name", r.name},       {"spec", to_json(r.spec)}, {"error", r.error},
              {"non_convergence", r.non_convergence}, {"summary", to_json(r.summary)},
              {"levels", levels},     {"reports", reports}};
}

Json to_json(const OracleReport& r) {
  Json checks = Json::array();
  for (const OracleCheck& c : r.checks) {
    checks.push_back(Json{{"domain", c.domain},
                          {"quantity", c.quantity},
                          {"computed", c.computed},
                          {"expected", c.expected},
                          {"rel_error", c.rel_error},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass}});
  }
  Json domains = Json::array();
  for (const DomainResult& d : r.domains) domains.push_back(to_json(d));
  return Json{{"kind", "oracle"}, {"passed", r.passed}, {"checks", checks}, {"domains", domains}};
}

Json to_json(const CorpusReport& r) {
  Json domains = Json::array();
  for (const DomainResult& d : r.domains) domains.push_back(to_json(d));
  Json failures = Json::array();
  for (const BoundReport& b : r.failures) failures.push_back(to_json(b));
  return Json{{"kind", "corpus"},
              {"validation", r.validation},
              {"pass_count", r.pass_count},
              {"fail_count", r.fail_count},
              {"not_applicable_count", r.not_applicable_count},
              {"errors", r.errors},
              {"failures", failures},
              {"domains", domains}};
}

Json to_json(const SweepReport& r) {
  Json rows = Json::array();
  for (const SweepRow& row : r.rows) {
    Json reports = Json::array();
    for (const BoundReport& b : row.reports) reports.push_back(to_json(b));
    rows.push_back(Json{{"label", row.label},
                        {"parameter", row.parameter},
                        {"torsion_ratio", row.torsion_ratio},
                        {"error", row.error},
                        {"summary", to_json(row.summary)},
                        {"reports", reports}});
  }
  Json j{{"kind", "sweep"}, {"family", r.family}, {"rows", rows}};
  if (r.baseline) j["baseline"] = to_json(*r.baseline);
  if (r.family == "punctured_square") {
    j["product_between"] = r.product_between;
    j["holes_match"] = r.holes_match;
  } else {
    j["ratio_decreasing"] = r.ratio_decreasing;
    j["slope"] = r.slope;
    j["slope_in_range"] = r.slope_in_range;
  }
  return j;
}

Json to_json(const ConvergenceReport& r) {
  Json rows = Json::array();
  for (const ConvergenceRow& row : r.rows) {
    rows.push_back(Json{{"quantity", row.quantity},
                        {"values", row.values},
                        {"extrapolated", row.extrapolated},
                        {"error_estimate", row.error_estimate},
                        {"observed_order", row.observed_order},
                        {"monotone", row.monotone}});
  }
  return Json{{"kind", "convergence"}, {"domain", r.domain}, {"levels", r.levels}, {"rows", rows}};
}

std::string to_csv(const OracleReport& r) {
  std::ostringstream out;
  out << "domain,quantity,computed,expected,rel_error,tolerance,pass\n";
  for (const OracleCheck& c : r.checks) {
    out << c.domain << ',' << c.quantity << ',' << format_double(c.computed) << ',' << format_double(c.expected)
        << ',' << format_double(c.rel_error) << ',' << format_double(c.tolerance) << ','
        << (c.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string to_csv(const CorpusReport& r) {
  std::string out = report_csv_header() + "\n";
  for (const DomainResult& d : r.domains) {
    for (const BoundReport& b : d.reports) out += report_csv_row(b) + "\n";
  }
  return out;
}

std::string to_csv(const SweepReport& r) {
  std::ostringstream out;
  out << "label,parameter,area,inradius,lambda,t_rigidity,norm_linf_w,product,f_value,hole_count,"
         "simply_connected,torsion_ratio,error\n";
  for (const SweepRow& row : r.rows) {
    out << '"' << row.label << "\"," << format_double(row.parameter) << ',';
    summary_row(out, row.summary);
    out << ',' << format_double(row.torsion_ratio) << ",\"" << row.error << "\"\n";
  }
  return out.str();
}

std::string to_csv(const ConvergenceReport& r) {
  std::ostringstream out;
  out << "quantity";
  for (double h : r.levels) out << ",h=" << format_double(h);
  out << ",extrapolated,error_estimate,observed_order,monotone\n";
  for (const ConvergenceRow& row : r.rows) {
    out << row.quantity;
    for (double v : row.values) out << ',' << format_double(v);
    out << ',' << format_double(row.extrapolated) << ',' << format_double(row.error_estimate) << ','
        << format_double(row.observed_order) << ',' << (row.monotone ? "true" : "false") << '\n';
  }
  return out.str();
}

void write_scenario(const std::filesystem::path& dir, const std::string& scenario, const Json& report,
                    const std::string& csv, const Json& meta) {
  write_json(dir / (scenario + ".json"), report);
  write_text(dir / (scenario + ".csv"), csv);
  write_json(dir / (scenario + ".meta.json"), meta);
}

bool run_scenario(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto start = Clock::now();
  Json report, rows = Json::object();
  std::string csv;
  bool ok = true;
  switch (cfg.kind) {
    case ScenarioKind::Oracle: {
      const OracleReport r = run_oracle_suite(cfg);
      for (const DomainResult& d : r.domains) rows[d.name] = d.seconds;
      report = to_json(r);
      csv = to_csv(r);
      ok = r.passed;
      break;
    }
    case ScenarioKind::Corpus: {
      const CorpusReport r = run_corpus_audit(cfg);
      for (const DomainResult& d : r.domains) rows[d.name] = d.seconds;
      report = to_json(r);
      csv = to_csv(r);
      ok = r.fail_count == 0 && r.errors.empty() && r.validation != "unvalidated";
      break;
    }
    case ScenarioKind::SweepPunctured:
    case ScenarioKind::SweepDumbbell: {
      const bool punctured = cfg.kind == ScenarioKind::SweepPunctured;
      const SweepReport r = punctured ? sweep_punctured(cfg) : sweep_dumbbell(cfg);
      for (const SweepRow& row : r.rows) {
        rows[row.label] = row.seconds;
        for (const BoundReport& b : row.reports) ok = ok && b.status != CheckStatus::Fail;
        if (!punctured) ok = ok && row.error.empty();
      }
      report = to_json(r);
      csv = to_csv(r);
      ok = ok && (punctured ? r.product_between && r.holes_match : r.ratio_decreasing && r.slope_in_range);
      break;
    }
    case ScenarioKind::Convergence: {
      Json studies = Json::array();
      for (const DomainEntry& e : cfg.domains) {
        const ConvergenceReport r = convergence_study(e, e.levels.empty() ? cfg.levels : e.levels, cfg.solve);
        studies.push_back(to_json(r));
        csv += to_csv(r);
      }
      report = Json{{"kind", "convergence"}, {"studies", studies}};
      break;
    }
  }
  report["scenario"] = cfg.scenario;
  report["constants_snapshot_id"] = constant_table(cfg.bloch_landau_lower).snapshot_id;
  report["config"] = to_json(cfg);
  const Json meta{{"scenario", cfg.scenario}, {"wall_seconds", seconds_since(start)}, {"rows", rows}};
  write_scenario(cfg.out_dir, cfg.scenario, report, csv, meta);
  return ok;
}

}  // namespace torsionlab
