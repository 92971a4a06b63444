#include "torsionlab/constants.hpp"

#include "torsionlab/errors.hpp"
#include "torsionlab/quadrature.hpp"

#include <boost/math/constants/constants.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <sstream>

namespace torsionlab {
namespace {

template <class Real>
Real pi() {
  return boost::math::constants::pi<Real>();
}

template <class Real>
Real lower_end() {
  using std::log;
  return Real(9) / 2 * log(Real(2));
}

template <class Real>
Real golden_width() {
  using std::sqrt;
  const Real floor = 10 * sqrt(std::numeric_limits<Real>::epsilon());
  return floor < Real(1e-12) ? floor : Real(1e-12);
}

// sum_{n <= N} n^-3 plus the Euler-Maclaurin tail, and the width of the
// integral bracket 1/(2(N+1)^2) <= tail <= 1/(2N^2).
template <class Real>
std::pair<Real, Real> zeta3_series(long terms) {
  Real partial = 0;
  for (long n = terms; n >= 1; --n) {
    const Real r = Real(1) / Real(n);
    partial += r * r * r;
  }
  const Real N = Real(terms);
  const Real N2 = N * N;
  const Real tail = 1 / (2 * N2) - 1 / (2 * N2 * N) + 1 / (4 * N2 * N2) - 1 / (12 * N2 * N2 * N2) +
                    1 / (12 * N2 * N2 * N2 * N2) - Real(3) / (20 * N2 * N2 * N2 * N2 * N2);
  const Real width = 1 / (2 * N2) - 1 / (2 * (N + 1) * (N + 1));
  return {partial + tail, width};
}

template <class Real>
Real growth_coefficient(const Real& radius) {
  using std::pow;
  const Real p = pi<Real>();
  const Real r2 = radius * radius;
  return (1 + (p + p * p) / (2 * r2)) * Real(4) / 3 * pow(p, Real(-3) / 4) *
         pow(4 * p * r2, Real(3) / 4);
}

}  // namespace

template <class Real>
Real bessel_j0(const Real& x, int intervals) {
  using std::cos;
  using std::sin;
  const Real p = pi<Real>();
  const Real step = p / intervals;
  Real sum = (1 + cos(x * sin(p))) / 2;
  for (int k = 1; k < intervals; ++k) sum += cos(x * sin(step * k));
  return sum * step / p;
}

template <class Real>
Real bessel_j0_zero() {
  Real lo = 2, hi = 3;
  const Real width = 4 * std::numeric_limits<Real>::epsilon();
  for (int k = 0; k < 400 && hi - lo > width; ++k) {
    const Real mid = (lo + hi) / 2;
    if (bessel_j0(mid) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2;
}

template <class Real>
Real gain(const Real& c, int a, int b) {
  using std::exp;
  using std::pow;
  using std::sqrt;
  const Real base = 1 - 16 * sqrt(Real(2)) * exp(-c);
  if (base <= 0) return Real(0);
  return pow(base, a) / pow(c, b);
}

template <class Real>
GainMaximum<Real> maximize_gain(int a, int b) {
  using std::sqrt;
  const Real ratio = (sqrt(Real(5)) - 1) / 2;
  Real lo = lower_end<Real>(), hi = 30;
  Real x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  Real f1 = gain(x1, a, b), f2 = gain(x2, a, b);
  const Real width = golden_width<Real>();
  while (hi - lo > width) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = gain(x2, a, b);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = gain(x1, a, b);
    }
  }
  const Real c = (lo + hi) / 2;
  return {gain(c, a, b), c};
}

GainMaximum<double> scan_gain(int a, int b, double step) {
  const double start = lower_end<double>();
  const long count = static_cast<long>((30.0 - start) / step);
  GainMaximum<double> best{0.0, start};
  for (long k = 0; k <= count; ++k) {
    const double c = start + step * k;
    const double base = 1.0 - 16.0 * std::sqrt(2.0) * std::exp(-c);
    double g = 1.0;
    for (int e = 0; e < a; ++e) g *= base;
    for (int e = 0; e < b; ++e) g /= c;
    if (g > best.value) best = {g, c};
  }
  return best;
}

template <class Real>
ConstantSet<Real> evaluate_constants() {
  using std::log;
  using std::sqrt;
  ConstantSet<Real> k;
  const Real p = pi<Real>();
  k.bessel_zero = bessel_j0_zero<Real>();
  k.product_gain = maximize_gain<Real>(7, 9);
  k.distance_gain = maximize_gain<Real>(2, 3);

  k.growth_radius = sqrt(Real(8));
  // coefficient at c = 2 times sqrt(scale) equals 1/2
  const Real root = Real(1) / 2 / (2 * growth_coefficient(k.growth_radius));
  k.growth_scale = root * root;

  const Real q = Real(1) / 2 / (400 * k.growth_radius * k.growth_radius) / 4 / 25;
  k.deficit_candidates = {Real(1) / 801, k.growth_scale * k.growth_scale / 12801, q / (1 + q)};
  k.deficit = k.deficit_candidates[0];
  for (const Real& d : k.deficit_candidates) {
    if (d < k.deficit) k.deficit = d;
  }
  const Real A = 1 + (p + p * p) / 16;
  k.packaged_deficit = Real(81) / (Real(12801) * Real(2147483648.0) * A * A * A * A);

  k.product_excess = Real(243) * (67 - 44 * sqrt(Real(2))) /
                     (Real(17179869184.0) * 35 * k.bessel_zero) * k.product_gain.value;
  k.mean_to_max_deficit = (k.product_excess + k.deficit) / (1 + k.product_excess);

  k.product_ceiling_classic = 4 + 6 * log(Real(2));
  k.product_ceiling = Real(1) / 4 + sqrt(5 * (1 + log(Real(2)) / 4)) * sqrt(Real(2)) / 4 + 1;

  std::tie(k.zeta3, k.zeta3_tail_width) = zeta3_series<Real>(20000);
  k.unit_disk_area = p;
  return k;
}

template double bessel_j0<double>(const double&, int);
template double bessel_j0_zero<double>();
template double gain<double>(const double&, int, int);
template GainMaximum<double> maximize_gain<double>(int, int);
template ConstantSet<double> evaluate_constants<double>();
template HighPrecision bessel_j0<HighPrecision>(const HighPrecision&, int);
template HighPrecision bessel_j0_zero<HighPrecision>();
template HighPrecision gain<HighPrecision>(const HighPrecision&, int, int);
template GainMaximum<HighPrecision> maximize_gain<HighPrecision>(int, int);
template ConstantSet<HighPrecision> evaluate_constants<HighPrecision>();

ProductCeilings product_ceilings(int dimension) {
  if (dimension != 2) throw UnsupportedDimension("product ceilings are implemented for the plane only");
  const ConstantSet<double> k = evaluate_constants<double>();
  return {k.product_ceiling_classic, k.product_ceiling};
}

double bessel_k0(double x) {
  if (!(x > 0.0)) throw DomainError("K0 requires a positive argument");
  // exp(-x) factored out; the dropped tail is below exp(-50) relative
  const double t_max = std::acosh(1.0 + 50.0 / x);
  const auto f = [x](double t) { return std::exp(-x * (std::cosh(t) - 1.0)); };
  return std::exp(-x) * integrate(f, 0.0, t_max, 1e-13).value;
}

double heat_time_integral(double lambda, double range) {
  if (!(lambda > 0.0) || !(range > 0.0)) throw DomainError("heat time integral needs positive arguments");
  // t = e^s; both exponents are at least 700 outside [s_lo, s_hi]
  const double s_lo = std::log(range * range / 5600.0);
  const double s_hi = std::log(2800.0 / lambda);
  const auto f = [=](double s) {
    const double t = std::exp(s);
    return t * std::exp(-t * lambda / 4.0 - range * range / (8.0 * t));
  };
  return integrate(f, std::min(s_lo, s_hi - 1.0), s_hi, 1e-12).value;
}

double heat_time_majorant(double lambda, double range) {
  return std::pow(2.0, 4.5) / lambda * std::exp(-std::sqrt(lambda) * range / 4.0);
}

std::string to_decimal(const HighPrecision& x, int digits) {
  return x.str(digits - 1, std::ios_base::scientific);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

// 0.5705 as the decimal the user typed, not its binary neighbour
HighPrecision shortest_decimal(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return HighPrecision(std::string(buf, res.ptr));
}

ConstantTable build_table(double bloch_landau_lower) {
  if (!(bloch_landau_lower > 0.0)) throw BadSpec("Bloch-Landau lower bound must be positive");
  using HP = HighPrecision;
  const ConstantSet<HP> k = evaluate_constants<HP>();

  for (const auto& [exact, a, b] :
       {std::tuple{k.product_gain, 7, 9}, std::tuple{k.distance_gain, 2, 3}}) {
    const GainMaximum<double> scanned = scan_gain(a, b);
    const double v = static_cast<double>(exact.value);
    if (std::abs(scanned.value - v) > 1e-10 * v) {
      throw OracleMismatch("golden-section and grid-scan maxima disagree");
    }
  }
  const HP A = 1 + (pi<HP>() + pi<HP>() * pi<HP>()) / 16;
  using std::pow;
  const HP closed_scale = HP(9) / (pow(HP(2), HP(15.5)) * A * A);
  if (abs(closed_scale - k.growth_scale) > 1e-30 * closed_scale) {
    throw ConsistencyFailure("growth scale does not match its closed form");
  }
  if (abs(k.deficit - k.packaged_deficit) > 1e-6 * k.packaged_deficit) {
    throw ConsistencyFailure("proof deficit differs from the packaged constant");
  }

  ConstantTable t;
  const auto d = [](const HP& x) { return static_cast<double>(x); };
  t.bessel_zero = d(k.bessel_zero);
  t.product_gain = d(k.product_gain.value);
  t.product_gain_argmax = d(k.product_gain.argmax);
  t.distance_gain = d(k.distance_gain.value);
  t.distance_gain_argmax = d(k.distance_gain.argmax);
  t.growth_radius = d(k.growth_radius);
  t.growth_scale = d(k.growth_scale);
  for (int i = 0; i < 3; ++i) t.deficit_candidates[i] = d(k.deficit_candidates[i]);
  t.deficit = d(k.deficit);
  t.packaged_deficit = d(k.packaged_deficit);
  t.product_excess = d(k.product_excess);
  t.product_floor = d(1 + k.product_excess);
  t.energy_ceiling = d(1 - k.deficit);
  t.mean_to_max_deficit = d(k.mean_to_max_deficit);
  t.mean_to_max_ceiling = d(1 - k.mean_to_max_deficit);
  t.product_ceiling_classic = d(k.product_ceiling_classic);
  t.product_ceiling = d(k.product_ceiling);
  t.zeta3 = d(k.zeta3);
  t.zeta3_tail_width = d(k.zeta3_tail_width);
  t.bloch_landau_lower = bloch_landau_lower;
  t.unit_disk_area = d(k.unit_disk_area);
  const HP c0 = shortest_decimal(bloch_landau_lower);
  const HP torsion_coeff = 7 * k.zeta3 / (16 * c0 * c0);
  t.max_torsion_coefficient = d(torsion_coeff);
  const HP growth = growth_coefficient(k.growth_radius);
  t.growth_coefficient = d(growth);

  t.decimal = {
      {"bessel_zero", to_decimal(k.bessel_zero)},
      {"product_gain", to_decimal(k.product_gain.value)},
      {"product_gain_argmax", to_decimal(k.product_gain.argmax)},
      {"distance_gain", to_decimal(k.distance_gain.value)},
      {"distance_gain_argmax", to_decimal(k.distance_gain.argmax)},
      {"growth_radius", to_decimal(k.growth_radius)},
      {"growth_scale", to_decimal(k.growth_scale)},
      {"deficit_volume", to_decimal(k.deficit_candidates[0])},
      {"deficit_growth", to_decimal(k.deficit_candidates[1])},
      {"deficit_covering", to_decimal(k.deficit_candidates[2])},
      {"deficit", to_decimal(k.deficit)},
      {"packaged_deficit", to_decimal(k.packaged_deficit)},
      {"product_excess", to_decimal(k.product_excess)},
      {"product_floor", to_decimal(1 + k.product_excess, 30)},
      {"energy_ceiling", to_decimal(1 - k.deficit, 30)},
      {"mean_to_max_deficit", to_decimal(k.mean_to_max_deficit)},
      {"mean_to_max_ceiling", to_decimal(1 - k.mean_to_max_deficit, 30)},
      {"product_ceiling_classic", to_decimal(k.product_ceiling_classic)},
      {"product_ceiling", to_decimal(k.product_ceiling)},
      {"zeta3", to_decimal(k.zeta3)},
      {"bloch_landau_lower", to_decimal(c0)},
      {"bloch_landau_upper", to_decimal(shortest_decimal(kBlochLandauUpper))},
      {"unit_disk_area", to_decimal(k.unit_disk_area)},
      {"max_torsion_coefficient", to_decimal(torsion_coeff)},
      {"growth_coefficient", to_decimal(growth)},
  };
  std::string joined;
  for (const auto& [name, value] : t.decimal) joined += name + "=" + value + ";";
  t.snapshot_id = fnv1a_hex(joined);
  return t;
}

}  // namespace

const ConstantTable& constant_table(double bloch_landau_lower) {
  static std::mutex guard;
  static std::map<double, ConstantTable> cache;
  std::lock_guard lock(guard);
  auto it = cache.find(bloch_landau_lower);
  if (it == cache.end()) it = cache.emplace(bloch_landau_lower, build_table(bloch_landau_lower)).first;
  return it->second;
}

}  // namespace torsionlab
