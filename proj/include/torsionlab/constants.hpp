#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <string>

namespace torsionlab {

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

/// Maximum of g(c) = (1 - 2^{9/2} e^{-c})^a / c^b over c >= (9/2) log 2.
template <class Real>
struct GainMaximum {
  Real value;
  Real argmax;
};

/// Every explicit constant used by the audits, evaluated in `Real`.
/// Quantities that sit within 1e-12 of 1 are carried as their distance from 1.
template <class Real>
struct ConstantSet {
  Real bessel_zero;                  // first positive zero of J0
  GainMaximum<Real> product_gain;    // exponents (7, 9)
  GainMaximum<Real> distance_gain;   // exponents (2, 3)
  Real growth_radius;                // radius R with w_{B_R}(0) = 2, i.e. sqrt(8)
  Real growth_scale;                 // scale at which the boundary-growth bound equals 1/2
  std::array<Real, 3> deficit_candidates;
  Real deficit;                      // min of the candidates
  Real packaged_deficit;             // 81 / (12801 2^31 (1 + (pi + pi^2)/16)^4)
  Real product_excess;               // lower bound of ||w||_inf lambda is 1 + product_excess
  Real mean_to_max_deficit;          // ||w||_1 / (|D| ||w||_inf) <= 1 - mean_to_max_deficit
  Real product_ceiling_classic;      // 4 + 6 log 2
  Real product_ceiling;              // 1/4 + (1/4) sqrt(5 (1 + log(2)/4)) sqrt(2) + 1
  Real zeta3;
  Real zeta3_tail_width;             // width of the integral bracket on the truncated tail
  Real unit_disk_area;
};

/// J0(x) = (1/pi) int_0^pi cos(x sin t) dt by the composite trapezoid rule.
template <class Real>
Real bessel_j0(const Real& x, int intervals = 128);

/// Bisection for the first zero of J0 on [2, 3].
template <class Real>
Real bessel_j0_zero();

/// Golden-section maximisation of the gain on [(9/2) log 2, 30].
template <class Real>
GainMaximum<Real> maximize_gain(int a, int b);

template <class Real>
Real gain(const Real& c, int a, int b);

/// Brute-force scan of the gain at the given step (double precision).
GainMaximum<double> scan_gain(int a, int b, double step = 1e-6);

template <class Real>
ConstantSet<Real> evaluate_constants();

extern template ConstantSet<double> evaluate_constants<double>();
extern template ConstantSet<HighPrecision> evaluate_constants<HighPrecision>();

/// Product bounds for the planar case only; other dimensions throw UnsupportedDimension.
struct ProductCeilings {
  double classic = 0.0;
  double improved = 0.0;
};
ProductCeilings product_ceilings(int dimension = 2);

/// K0(x) = int_0^inf exp(-x cosh t) dt by adaptive quadrature. DomainError for x <= 0.
double bessel_k0(double x);

/// int_0^inf exp(-t lambda/4 - range^2/(8t)) dt, the heat-kernel time integral.
double heat_time_integral(double lambda, double range);

/// Closed-form majorant (2^{9/2}/lambda) exp(-sqrt(lambda) range / 4) of
/// 2^{3/2} * heat_time_integral(lambda, range).
double heat_time_majorant(double lambda, double range);

/// Published lower and upper bounds for the schlicht Bloch-Landau constant.
inline constexpr double kBlochLandauLower = 0.5705;
inline constexpr double kBlochLandauUpper = 0.6564;

/// Double view of the high-precision constants plus 30-digit decimal strings,
/// with the configurable Bloch-Landau lower bound.
struct ConstantTable {
  double bessel_zero = 0.0;
  double product_gain = 0.0;
  double product_gain_argmax = 0.0;
  double distance_gain = 0.0;
  double distance_gain_argmax = 0.0;
  double growth_radius = 0.0;
  double growth_scale = 0.0;
  std::array<double, 3> deficit_candidates{};
  double deficit = 0.0;
  double packaged_deficit = 0.0;
  double product_excess = 0.0;
  double product_floor = 0.0;          // 1 + product_excess, one ulp above 1 in double
  double energy_ceiling = 0.0;         // 1 - deficit
  double mean_to_max_ceiling = 0.0;    // 1 - mean_to_max_deficit
  double mean_to_max_deficit = 0.0;
  double product_ceiling_classic = 0.0;
  double product_ceiling = 0.0;
  double zeta3 = 0.0;
  double zeta3_tail_width = 0.0;
  double bloch_landau_lower = kBlochLandauLower;
  double bloch_landau_upper = kBlochLandauUpper;
  double unit_disk_area = 0.0;
  double max_torsion_coefficient = 0.0;  // 7 zeta(3) / (16 c0^2)
  double growth_coefficient = 0.0;       // 2 (1 + (pi+pi^2)/(2R^2)) (4/3) pi^{-3/4} (4 pi R^2)^{3/4}

  /// Name -> decimal string with 30 significant digits.
  std::map<std::string, std::string> decimal;
  std::string snapshot_id;
};

/// Memoised table for the given Bloch-Landau lower bound. Throws
/// OracleMismatch or ConsistencyFailure if the internal cross-checks fail.
const ConstantTable& constant_table(double bloch_landau_lower = kBlochLandauLower);

/// Formats a high-precision value with the given number of significant digits.
std::string to_decimal(const HighPrecision& x, int digits = 30);

/// 64-bit FNV-1a over the bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace torsionlab
