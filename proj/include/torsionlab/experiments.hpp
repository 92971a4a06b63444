#pragma once

#include "torsionlab/audit.hpp"
#include "torsionlab/constants.hpp"
#include "torsionlab/geometry.hpp"
#include "torsionlab/serialize.hpp"
#include "torsionlab/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace torsionlab {

struct SolveOptions {
  double tol = 1e-10;
  EigenOptions eigen;
};

struct DomainEntry {
  std::string name;
  DomainSpec spec;
  /// Overrides the scenario levels when nonempty.
  std::vector<double> levels;
  /// Boundary point for the boundary-growth check; the re-entrant corner is used for L-shapes.
  std::optional<Eigen::Vector2d> boundary_point;
  /// Free parameter of the pointwise torsion bound; defaults to the distance-gain maximiser.
  std::optional<double> pointwise_c;
};

struct PuncturedSweep {
  std::vector<int> N = {3};
  std::vector<double> rho = {0.015, 0.03, 0.045, 0.06};
  double h = 1.0 / 256;
};

struct DumbbellSweep {
  std::vector<int> n = {2, 4, 8};
  double R = 0.5;
  double tube_w = 0.3;
  double tube_len = 0.25;
  std::vector<double> levels = {1.0 / 16, 1.0 / 32, 1.0 / 64};
};

enum class ScenarioKind { Oracle, Corpus, SweepPunctured, SweepDumbbell, Convergence };

struct ExperimentConfig {
  std::string scenario = "corpus";
  ScenarioKind kind = ScenarioKind::Corpus;
  std::vector<DomainEntry> domains;
  std::vector<double> levels = {1.0 / 64, 1.0 / 128, 1.0 / 256};
  SolveOptions solve;
  PuncturedSweep punctured;
  DumbbellSweep dumbbell;
  std::filesystem::path out_dir = "results";
  int threads = 0;  // 0 = hardware concurrency
  double bloch_landau_lower = kBlochLandauLower;
  bool validate_with_oracles = false;
};

/// Checks level counts, halving, sorted nonempty sweep lists. Throws BadSpec.
void validate(const ExperimentConfig& cfg);

ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& cfg);
std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& s);

ExperimentConfig default_oracle_config();
ExperimentConfig default_corpus_config();
ExperimentConfig default_punctured_config();
ExperimentConfig default_dumbbell_config();

/// Solves, summarizes and audits one domain over its grid levels. Pointwise,
/// kernel, refined and boundary checks run on the finest level.
struct DomainResult {
  std::string name;
  DomainSpec spec;
  std::vector<FunctionalSummary> levels;
  FunctionalSummary summary;
  std::vector<BoundReport> reports;
  std::string error;          // empty on success
  bool non_convergence = false;
  double seconds = 0.0;       // wall clock, kept out of deterministic reports
};

DomainResult analyze_domain(const DomainEntry& entry, const std::vector<double>& levels, const SolveOptions& opts,
                            const ConstantTable& constants, bool full_audit = true);

struct OracleCheck {
  std::string domain;
  std::string quantity;
  double computed = 0.0;
  double expected = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  std::vector<DomainResult> domains;
  bool passed = false;
};

OracleReport run_oracle_suite(const ExperimentConfig& cfg);
/// Throws OracleViolation naming the first failing quantity.
void require_oracles(const OracleReport& report);

/// Fourier-series values for the unit square with certified truncation bounds.
struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;
};
SeriesValue square_torsional_rigidity(int max_index = 2001);
SeriesValue square_max_torsion(int max_index = 41);

struct CorpusReport {
  std::vector<DomainResult> domains;
  int pass_count = 0;
  int fail_count = 0;
  int not_applicable_count = 0;
  std::vector<BoundReport> failures;
  std::vector<std::string> errors;  // domains whose solve failed
  std::string validation = "not_run";  // validated | unvalidated | not_run
};

CorpusReport run_corpus_audit(const ExperimentConfig& cfg);

struct SweepRow {
  std::string label;
  double parameter = 0.0;
  FunctionalSummary summary;
  std::vector<BoundReport> reports;
  double torsion_ratio = 0.0;  // T / |D|^2
  std::string error;
  double seconds = 0.0;
};

struct SweepReport {
  std::string family;
  std::vector<SweepRow> rows;
  std::optional<FunctionalSummary> baseline;  // unpunctured square on the same grid
  bool product_between = false;   // 1 < product < baseline product on every feasible row
  bool holes_match = false;       // hole_count = N^2 on every feasible row
  bool ratio_decreasing = false;
  double slope = 0.0;
  bool slope_in_range = false;
};

SweepReport sweep_punctured(const ExperimentConfig& cfg);
SweepReport sweep_dumbbell(const ExperimentConfig& cfg);

/// Least-squares slope of log(y) against log(x). Throws FitDegenerate below three points.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ConvergenceRow {
  std::string quantity;
  std::vector<double> values;
  double extrapolated = 0.0;
  double error_estimate = 0.0;
  double observed_order = 0.0;
  bool monotone = false;
};

struct ConvergenceReport {
  std::string domain;
  std::vector<double> levels;
  std::vector<ConvergenceRow> rows;
};

/// Throws BadSpec for fewer than three levels and Error unless h halves.
ConvergenceReport convergence_study(const DomainEntry& entry, const std::vector<double>& levels,
                                    const SolveOptions& opts);

Json to_json(const DomainResult& r);
Json to_json(const OracleReport& r);
Json to_json(const CorpusReport& r);
Json to_json(const SweepReport& r);
Json to_json(const ConvergenceReport& r);

std::string to_csv(const OracleReport& r);
std::string to_csv(const CorpusReport& r);
std::string to_csv(const SweepReport& r);
std::string to_csv(const ConvergenceReport& r);

/// Writes <dir>/<scenario>.json, .csv and the wall-clock sidecar .meta.json.
void write_scenario(const std::filesystem::path& dir, const std::string& scenario, const Json& report,
                    const std::string& csv, const Json& meta);

/// Runs the scenario named by cfg.kind and writes its outputs. Returns true
/// when every check and oracle passed.
bool run_scenario(const ExperimentConfig& cfg);

}  // namespace torsionlab
