#include "torsionlab/constants.hpp"
#include "torsionlab/errors.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

using namespace torsionlab;
using HP = HighPrecision;

namespace {

// Frozen from an independent 40-digit evaluation (mpmath: besseljzero, findroot
// on the logarithmic derivative of the gain, zeta, besselk).
const HP kJ0("2.40482555769577276862163187933");
const HP kProductGain("1.78551035572390137121192193735e-7");
const HP kProductGainArgmax("4.64859924022571931095612383105");
const HP kDistanceGain("6.15044111497738253284107197786e-3");
const HP kDistanceGainArgmax("4.50654729443582143300988206288");
const HP kGrowthScale("5.90726214772751841184945549739e-5");
const HP kPackaged("2.72601719256107597536575052606e-13");
const HP kExcess("1.43263138488291996692057911101e-16");
const HP kMeanToMax("2.72744982394595850458964925734e-13");
const HP kZeta3("1.20205690315959428539973816151");
const HP kCeiling("2.10633185562753150132587718217");
const HP kCeilingClassic("8.15888308335967185650339272875");

double rel(const HP& a, const HP& b) { return static_cast<double>(abs(a - b) / abs(b)); }

// Independent brute-force scan: std::pow at every node of a uniform grid.
GainMaximum<double> own_scan(int a, int b, double step) {
  const double lo = 4.5 * std::log(2.0), hi = 30.0;
  GainMaximum<double> best{-1.0, 0.0};
  const long n = static_cast<long>((hi - lo) / step);
  for (long k = 0; k <= n; ++k) {
    const double c = lo + double(k) * step;
    const double g = std::pow(1.0 - std::pow(2.0, 4.5) * std::exp(-c), a) / std::pow(c, b);
    if (g > best.value) best = {g, c};
  }
  return best;
}

}  // namespace

TEST_CASE("high-precision constants match the frozen independent values") {
  const ConstantSet<HP> k = evaluate_constants<HP>();
  CHECK(rel(k.bessel_zero, kJ0) < 1e-28);
  CHECK(rel(k.product_gain.value, kProductGain) < 1e-25);
  CHECK(rel(k.distance_gain.value, kDistanceGain) < 1e-25);
  CHECK(rel(k.product_gain.argmax, kProductGainArgmax) < 1e-11);
  CHECK(rel(k.distance_gain.argmax, kDistanceGainArgmax) < 1e-11);
  CHECK(rel(k.growth_scale, kGrowthScale) < 1e-28);
  CHECK(rel(k.packaged_deficit, kPackaged) < 1e-28);
  CHECK(rel(k.deficit, kPackaged) < 1e-6);
  CHECK(rel(k.product_excess, kExcess) < 1e-24);
  CHECK(rel(k.mean_to_max_deficit, kMeanToMax) < 1e-24);
  CHECK(rel(k.zeta3, kZeta3) < 1e-28);
  CHECK(k.zeta3_tail_width < 1e-12);
  CHECK(rel(k.product_ceiling, kCeiling) < 1e-28);
  CHECK(rel(k.product_ceiling_classic, kCeilingClassic) < 1e-28);
}

TEST_CASE("deficit is the smallest candidate and the product excess exceeds 1e-16") {
  const ConstantSet<HP> k = evaluate_constants<HP>();
  CHECK(k.deficit_candidates[0] == HP(1) / 801);
  for (const HP& d : k.deficit_candidates) CHECK(k.deficit <= d);
  CHECK(k.product_excess > HP("1e-16"));
  CHECK(k.product_excess < HP("2e-16"));
}

TEST_CASE("double and high-precision evaluations agree") {
  const ConstantSet<double> d = evaluate_constants<double>();
  const ConstantSet<HP> k = evaluate_constants<HP>();
  CHECK(d.bessel_zero == doctest::Approx(static_cast<double>(k.bessel_zero)).epsilon(1e-15));
  CHECK(d.product_gain.value == doctest::Approx(static_cast<double>(k.product_gain.value)).epsilon(1e-13));
  CHECK(d.distance_gain.value == doctest::Approx(static_cast<double>(k.distance_gain.value)).epsilon(1e-13));
}

TEST_CASE("gain maxima agree with an independent grid scan") {
  // coarse own scan, then the library scan at the 1e-6 step
  for (const auto& [a, b] : {std::pair{7, 9}, std::pair{2, 3}}) {
    const GainMaximum<double> golden = maximize_gain<double>(a, b);
    const GainMaximum<double> mine = own_scan(a, b, 1e-5);
    const GainMaximum<double> lib = scan_gain(a, b);
    CHECK(std::abs(mine.value - golden.value) <= 1e-10 * golden.value);
    CHECK(std::abs(lib.value - golden.value) <= 1e-10 * golden.value);
    CHECK(std::abs(mine.argmax - golden.argmax) < 1e-4);
  }
}

TEST_CASE("Bessel J0 zero agrees with boost") {
  CHECK(bessel_j0_zero<double>() == doctest::Approx(boost::math::cyl_bessel_j_zero(0.0, 1)).epsilon(1e-15));
  for (double x : {0.5, 1.0, 2.4, 5.0}) {
    CHECK(bessel_j0(x) == doctest::Approx(boost::math::cyl_bessel_j(0, x)).epsilon(1e-14));
  }
}

TEST_CASE("K0 by quadrature agrees with boost and with frozen values") {
  for (double x : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 40.0}) {
    CHECK(bessel_k0(x) == doctest::Approx(boost::math::cyl_bessel_k(0, x)).epsilon(1e-12));
  }
  CHECK(bessel_k0(1.0) == doctest::Approx(0.421024438240708333335627379213).epsilon(1e-13));
  CHECK(bessel_k0(2.0) == doctest::Approx(0.113893872749533435652719574932).epsilon(1e-13));
  CHECK_THROWS_AS(bessel_k0(0.0), DomainError);
  CHECK_THROWS_AS(bessel_k0(-1.0), DomainError);
}

TEST_CASE("heat time integral against its Bessel closed form and majorant") {
  // int_0^inf exp(-a t - b/t) dt = 2 sqrt(b/a) K1(2 sqrt(ab))
  for (double lambda : {1.0, 5.78, 40.0}) {
    for (double range : {0.05, 0.3, 1.0, 3.0}) {
      const double a = lambda / 4.0, b = range * range / 8.0;
      const double closed = 2.0 * std::sqrt(b / a) * boost::math::cyl_bessel_k(1, 2.0 * std::sqrt(a * b));
      const double v = heat_time_integral(lambda, range);
      CHECK(v == doctest::Approx(closed).epsilon(1e-10));
      CHECK(std::pow(2.0, 1.5) * v <= heat_time_majorant(lambda, range));
    }
  }
}

TEST_CASE("product ceilings are planar only") {
  const ProductCeilings c = product_ceilings();
  CHECK(c.improved == doctest::Approx(2.1063318556275315));
  CHECK(c.classic == doctest::Approx(4.0 + 6.0 * std::log(2.0)));
  CHECK_THROWS_AS(product_ceilings(3), UnsupportedDimension);
}

TEST_CASE("constant table: decimals, snapshot and configurable lower bound") {
  const ConstantTable& t = constant_table();
  CHECK(t.decimal.at("bessel_zero") == "2.40482555769577276862163187933e+00");
  CHECK(t.decimal.at("product_floor").rfind("1.00000000000000014326313848829", 0) == 0);
  CHECK(t.decimal.at("bloch_landau_lower") == "5.70500000000000000000000000000e-01");
  for (const auto& [name, value] : t.decimal) {
    const std::string mantissa = value.substr(0, value.find('e'));
    CHECK_MESSAGE(mantissa.size() == 31, name);  // 30 digits plus the point
  }
  CHECK(t.product_floor == std::nextafter(1.0, 2.0));  // excess rounds to one ulp
  CHECK(t.max_torsion_coefficient == doctest::Approx(7.0 * t.zeta3 / (16.0 * 0.5705 * 0.5705)));
  CHECK(t.growth_coefficient == doctest::Approx(32.527215473998427));
  CHECK(t.snapshot_id.size() == 16);
  CHECK(&constant_table() == &t);

  const ConstantTable& other = constant_table(0.6);
  CHECK(other.snapshot_id != t.snapshot_id);
  CHECK(other.max_torsion_coefficient < t.max_torsion_coefficient);
  CHECK_THROWS_AS(constant_table(-1.0), BadSpec);
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
