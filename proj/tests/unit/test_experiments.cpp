#include "torsionlab/errors.hpp"
#include "torsionlab/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>
#include <string>

using namespace torsionlab;

namespace {

// Single series for the square torsion function at the centre, summed far
// past the library's truncation: w(1/2,1/2) = 1/8 - (4/pi^3) sum_k (-1)^k / ((2k+1)^3 cosh((2k+1) pi/2)).
double square_centre_reference() {
  double s = 0.0;
  for (int k = 0; k < 60; ++k) {
    const double m = 2.0 * k + 1.0;
    s += (k % 2 ? -1.0 : 1.0) / (m * m * m * std::cosh(m * std::numbers::pi / 2.0));
  }
  return 0.125 - 4.0 / std::pow(std::numbers::pi, 3) * s;
}

// T = 1/12 - (16/pi^5) sum_k tanh((2k+1) pi/2) / (2k+1)^5 for the unit square.
double square_rigidity_reference() {
  double s = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double m = 2.0 * k + 1.0;
    s += std::tanh(m * std::numbers::pi / 2.0) / std::pow(m, 5);
  }
  return 1.0 / 12.0 - 16.0 / std::pow(std::numbers::pi, 5) * s;
}

}  // namespace

TEST_CASE("square Fourier oracles agree with single-series closed forms") {
  const SeriesValue t = square_torsional_rigidity();
  const SeriesValue m = square_max_torsion();
  CHECK(std::abs(t.value - square_rigidity_reference()) <= t.tail_bound + 1e-15);
  CHECK(std::abs(m.value - square_centre_reference()) <= m.tail_bound + 1e-15);
  CHECK(t.value == doctest::Approx(0.035144).epsilon(1e-4));
  CHECK(m.value == doctest::Approx(0.073671).epsilon(1e-4));
  CHECK(t.tail_bound < 1e-9);
  CHECK(m.tail_bound < 1e-9);
}

TEST_CASE("log-log slope") {
  CHECK(log_log_slope({1, 2, 4}, {1, 0.5, 0.25}) == doctest::Approx(-1.0));
  CHECK(log_log_slope({2, 4, 8}, {3, 12, 48}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(log_log_slope({1, 2}, {1, 2}), FitDegenerate);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = default_corpus_config();
  CHECK_NOTHROW(validate(cfg));
  cfg.levels = {1.0 / 32, 1.0 / 64};
  CHECK_THROWS_AS(validate(cfg), BadSpec);
  cfg.levels = {1.0 / 32, 1.0 / 48, 1.0 / 96};
  CHECK_THROWS_AS(validate(cfg), BadSpec);
  cfg = default_punctured_config();
  cfg.punctured.rho = {0.05, 0.03};
  CHECK_THROWS_AS(validate(cfg), BadSpec);
  cfg = default_dumbbell_config();
  cfg.dumbbell.n = {};
  CHECK_THROWS_AS(validate(cfg), BadSpec);
}

TEST_CASE("config JSON round trip and unknown keys") {
  for (const ExperimentConfig& cfg : {default_oracle_config(), default_corpus_config(), default_punctured_config(),
                                      default_dumbbell_config()}) {
    const Json j = to_json(cfg);
    CHECK(to_json(config_from_json(j)) == j);
  }
  Json j = to_json(default_corpus_config());
  j["colour"] = "blue";
  CHECK_THROWS_AS(config_from_json(j), BadSpec);
  CHECK_THROWS_AS(config_from_json(Json{{"kind", "galaxy"}}), BadSpec);
  CHECK_THROWS_AS(config_from_json(Json{{"levels", {0.1, 0.05}}}), BadSpec);
  CHECK(scenario_kind_from_string(to_string(ScenarioKind::SweepDumbbell)) == ScenarioKind::SweepDumbbell);
}

TEST_CASE("analyze_domain audits a coarse L-shape end to end") {
  const ConstantTable& k = constant_table();
  const DomainEntry entry{"lshape", LShape{1.0, 1.0, 0.5}, {}, {}, {}};
  const DomainResult r = analyze_domain(entry, {1.0 / 16, 1.0 / 32, 1.0 / 64}, {}, k, true);
  REQUIRE(r.error.empty());
  CHECK(r.levels.size() == 3);
  CHECK(r.summary.extrapolated);
  // kernel checks run at the eigenfunction peak and again at a source near the boundary
  std::set<std::string> ids;
  for (const BoundReport& b : r.reports) ids.insert(b.check_id);
  CHECK(ids.size() == check_registry().size());
  CHECK(r.reports.size() > check_registry().size());
  for (const BoundReport& b : r.reports) CHECK_MESSAGE(b.status == CheckStatus::Pass, b.check_id);
}

TEST_CASE("analyze_domain records failures instead of throwing") {
  const DomainEntry tiny{"tiny", Disk{0.01}, {}, {}, {}};
  const DomainResult r = analyze_domain(tiny, {0.5}, {}, constant_table(), false);
  CHECK_FALSE(r.error.empty());
}

TEST_CASE("punctured sweep marks rasters too coarse for the holes") {
  ExperimentConfig cfg = default_punctured_config();
  cfg.punctured.h = 1.0 / 64;
  cfg.punctured.rho = {0.03, 0.06};
  const SweepReport r = sweep_punctured(cfg);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].error.find("3h") != std::string::npos);
  CHECK(r.rows[1].error.empty());
  CHECK(r.rows[1].summary.hole_count == 9);
  CHECK(r.holes_match);
  CHECK(r.product_between);
}

TEST_CASE("convergence study needs three halving levels") {
  const DomainEntry disk{"disk", Disk{1.0}, {}, {}, {}};
  CHECK_THROWS_AS(convergence_study(disk, {1.0 / 16, 1.0 / 32}, {}), BadSpec);
  CHECK_THROWS_AS(convergence_study(disk, {1.0 / 16, 1.0 / 24, 1.0 / 48}, {}), Error);
  const ConvergenceReport c = convergence_study(disk, {1.0 / 16, 1.0 / 32, 1.0 / 64}, {});
  CHECK(c.rows.size() == 8);
  for (const ConvergenceRow& row : c.rows) CHECK(row.values.size() == 3);
}

TEST_CASE("scenario outputs are written atomically with a meta sidecar") {
  ExperimentConfig cfg = default_dumbbell_config();
  cfg.dumbbell.n = {1, 2, 3};
  cfg.dumbbell.levels = {1.0 / 8, 1.0 / 16, 1.0 / 32};
  cfg.out_dir = std::filesystem::temp_directory_path() / "torsionlab_test_experiments";
  std::filesystem::remove_all(cfg.out_dir);
  run_scenario(cfg);
  for (const char* ext : {".json", ".csv", ".meta.json"}) {
    CHECK(std::filesystem::exists(cfg.out_dir / (cfg.scenario + ext)));
  }
  const Json j = read_json(cfg.out_dir / (cfg.scenario + ".json"));
  CHECK(j.at("constants_snapshot_id") == constant_table().snapshot_id);
  CHECK_FALSE(j.dump().find("seconds") != std::string::npos);
}
