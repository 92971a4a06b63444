#include "torsionlab/errors.hpp"
#include "torsionlab/extrapolation.hpp"
#include "torsionlab/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace torsionlab;

namespace {

std::vector<LevelValue> model(double limit, double a, double p, std::vector<double> hs) {
  std::vector<LevelValue> out;
  for (double h : hs) out.push_back({h, limit + a * std::pow(h, p)});
  return out;
}

}  // namespace

TEST_CASE("recovers limit and order of a pure power law") {
  for (double p : {1.0, 2.0, 1.5}) {
    const auto lv = model(3.0, 0.7, p, {0.1, 0.05, 0.025});
    const ExtrapolationResult r = richardson(lv);
    CHECK(r.observed_order == doctest::Approx(p).epsilon(1e-10));
    CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("assumed order uses the last two levels") {
  const auto lv = model(1.0, -2.0, 2.0, {0.2, 0.1});
  const ExtrapolationResult r = richardson(lv, 2.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate sequences") {
  const std::vector<LevelValue> flat{{0.1, 1.0}, {0.05, 1.0}, {0.025, 1.0}};
  CHECK_THROWS_AS(richardson(flat), DegenerateSequence);
  const std::vector<LevelValue> zigzag{{0.1, 1.0}, {0.05, 1.1}, {0.025, 1.05}};
  CHECK_THROWS_AS(richardson(zigzag), DegenerateSequence);
  const std::vector<LevelValue> not_halving{{0.1, 1.0}, {0.03, 1.1}, {0.015, 1.15}};
  CHECK_THROWS_AS(richardson(not_halving), Error);
}

TEST_CASE("fallback keeps the finest value with an honest error bar") {
  const std::vector<LevelValue> zigzag{{0.1, 1.0}, {0.05, 1.1}, {0.025, 1.05}};
  const ExtrapolationResult r = extrapolate_or_finest(zigzag);
  CHECK(r.value == 1.05);
  CHECK(r.error_estimate == doctest::Approx(0.1));
  const auto good = model(2.0, 1.0, 1.0, {0.1, 0.05, 0.025});
  CHECK(extrapolate_or_finest(good).value == doctest::Approx(2.0));
}

TEST_CASE("adaptive Gauss-Kronrod quadrature") {
  const QuadratureResult a = integrate([](double x) { return std::exp(-x * x); }, 0.0, 6.0);
  CHECK(a.value == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-13));
  const QuadratureResult b = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(b.value - 2.0 / 3.0) < 1e-11);
  CHECK(b.intervals > 1);
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, 1e-15, 0.0, 8),
                  NoConvergence);
}
