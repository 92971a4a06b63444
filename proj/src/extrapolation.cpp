#include "torsionlab/extrapolation.hpp"

#include "torsionlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace torsionlab {
namespace {

void require_halving(std::span<const LevelValue> levels) {
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const double ratio = levels[k - 1].h / levels[k].h;
    if (!(std::abs(ratio - 2.0) < 1e-9)) throw Error("grid levels must halve h from coarse to fine");
  }
}

}  // namespace

ExtrapolationResult richardson(std::span<const LevelValue> levels, std::optional<double> assumed_order) {
  if (levels.size() < 2) throw Error("Richardson extrapolation needs at least two levels");
  if (!assumed_order && levels.size() < 3) {
    throw Error("Richardson extrapolation needs three levels when the order is not assumed");
  }
  require_halving(levels);
  const std::size_t n = levels.size();
  const double fine = levels[n - 1].value;
  const double mid = levels[n - 2].value;

  double p;
  if (assumed_order) {
    p = *assumed_order;
    if (!(p > 0.0)) throw Error("assumed order must be positive");
    if (fine == mid) throw DegenerateSequence("successive values coincide");
  } else {
    const double d1 = mid - levels[n - 3].value;
    const double d2 = fine - mid;
    if (d1 == 0.0 || d2 == 0.0) throw DegenerateSequence("successive differences vanish");
    if ((d1 > 0.0) != (d2 > 0.0)) throw DegenerateSequence("successive differences change sign");
    p = std::log2(d1 / d2);
  }
  const double denom = std::exp2(p) - 1.0;
  if (!(denom > 0.0)) throw DegenerateSequence("observed order is not positive");
  ExtrapolationResult r;
  r.observed_order = p;
  r.value = fine + (fine - mid) / denom;
  r.error_estimate = std::abs(fine - mid) / denom;
  return r;
}

ExtrapolationResult extrapolate_or_finest(std::span<const LevelValue> levels, double min_order,
                                          double max_order) {
  if (levels.empty()) throw Error("no levels to extrapolate");
  const std::size_t n = levels.size();
  ExtrapolationResult fallback{levels[n - 1].value, 0.0, 0.0};
  for (std::size_t k = n >= 3 ? n - 2 : 1; k < n; ++k) {
    fallback.error_estimate =
        std::max(fallback.error_estimate, std::abs(levels[k].value - levels[k - 1].value));
  }
  if (n < 3) return fallback;
  try {
    ExtrapolationResult r = richardson(levels);
    if (r.observed_order < min_order || r.observed_order > max_order) return fallback;
    return r;
  } catch (const DegenerateSequence&) {
    return fallback;
  }
}

}  // namespace torsionlab
