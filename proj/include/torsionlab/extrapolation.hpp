#pragma once

#include <optional>
#include <span>

namespace torsionlab {

struct LevelValue {
  double h = 0.0;
  double value = 0.0;
};

struct ExtrapolationResult {
  double value = 0.0;
  double observed_order = 0.0;
  double error_estimate = 0.0;
};

/// Richardson extrapolation over grid levels with h halving (coarse to fine).
/// Without an assumed order the last three levels give the observed order
/// p = log2((v_h - v_h/2) / (v_h/2 - v_h/4)). Throws DegenerateSequence when
/// successive differences vanish or change sign.
ExtrapolationResult richardson(std::span<const LevelValue> levels,
                               std::optional<double> assumed_order = std::nullopt);

/// Never throws on well-formed input: degenerate or implausible sequences
/// (observed order outside [min_order, max_order]) fall back to the finest
/// value with the largest recent difference as the error bar.
ExtrapolationResult extrapolate_or_finest(std::span<const LevelValue> levels, double min_order = 0.5,
                                          double max_order = 4.0);

}  // namespace torsionlab
