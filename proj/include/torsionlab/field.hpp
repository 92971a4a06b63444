#pragma once

#include "torsionlab/geometry.hpp"

#include <Eigen/Core>

#include <filesystem>

namespace torsionlab {

/// Grid-aligned real function, zero by convention outside the mask.
struct ScalarField {
  GridSpec grid;
  Eigen::ArrayXXd values;  // nx x ny

  static ScalarField zeros(const GridSpec& g) { return {g, Eigen::ArrayXXd::Zero(g.nx, g.ny)}; }
  double at(const Cell& c) const { return values(c.i, c.j); }
};

/// CSV with header "i,j,x,y,value", one row per inside cell, j-major order.
void write_csv(const ScalarField& field, const DomainMask& mask, const std::filesystem::path& path);

/// Raw little-endian dump. Header (24 bytes): nx as uint64, ny as uint64, h as
/// float64. Body: nx*ny float64 values, i fastest, j from 0 (bottom) upward.
void write_raw(const ScalarField& field, const std::filesystem::path& path);
ScalarField read_raw(const std::filesystem::path& path);

}  // namespace torsionlab
