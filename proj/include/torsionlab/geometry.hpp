#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace torsionlab {

/// Cell-centred uniform grid. Cell (i, j) has centre (x0 + (i+1/2)h, y0 + (j+1/2)h).
struct GridSpec {
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 1.0;
  int nx = 1;
  int ny = 1;

  Eigen::Vector2d center(int i, int j) const {
    return {x0 + (i + 0.5) * h, y0 + (j + 0.5) * h};
  }
  Eigen::Index cell_count() const { return Eigen::Index(nx) * ny; }
  bool operator==(const GridSpec&) const = default;
};

/// Grid index. Ordering is (j, i) so that "lowest index" tie-breaks scan rows first.
struct Cell {
  int i = 0;
  int j = 0;

  bool operator==(const Cell&) const = default;
  friend std::strong_ordering operator<=>(const Cell& a, const Cell& b) {
    if (auto c = a.j <=> b.j; c != 0) return c;
    return a.i <=> b.i;
  }
};

using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// ---- Domain families -------------------------------------------------------

/// Open disk of radius R centred at the origin.
struct Disk {
  double R = 1.0;
};
/// Open rectangle (0,a) x (0,b).
struct Rectangle {
  double a = 1.0;
  double b = 1.0;
};
/// (0,a) x (0,b) with the closed top-right square of side `notch` removed.
struct LShape {
  double a = 1.0;
  double b = 1.0;
  double notch = 0.5;
};
/// r_in < |x| < r_out.
struct Annulus {
  double r_in = 0.5;
  double r_out = 1.0;
};
/// Unit square minus N x N closed disks of radius rho centred at ((2k-1)/2N, (2l-1)/2N).
struct PuncturedSquare {
  int N = 3;
  double rho = 0.05;
};
/// n disks of radius R on the x-axis, centres 2R + tube_len apart, joined by
/// horizontal tubes of width tube_w running centre to centre.
struct Dumbbell {
  int n = 2;
  double R = 1.0;
  double tube_w = 0.1;
  double tube_len = 1.0;
};
/// Simple polygon, even-odd rule.
struct Polygon {
  std::vector<Eigen::Vector2d> vertices;
};
/// P5 PGM image; 255 = inside, 0 = outside, one pixel per cell.
struct Bitmap {
  std::string path;
};

using DomainSpec =
    std::variant<Disk, Rectangle, LShape, Annulus, PuncturedSquare, Dumbbell, Polygon, Bitmap>;

/// Throws BadSpec if the parameters violate the family's invariants.
void validate(const DomainSpec& spec);

/// Short family tag ("disk", "rectangle", ...).
std::string family_name(const DomainSpec& spec);

/// Point membership in the open set. Not defined for Bitmap.
bool contains(const DomainSpec& spec, const Eigen::Vector2d& p);

/// Axis-aligned bounding box {xmin, ymin, xmax, ymax}. Not defined for Bitmap.
Eigen::Vector4d bounding_box(const DomainSpec& spec);

/// Same family with every length multiplied by s. Rejects PuncturedSquare and Bitmap.
DomainSpec scaled(const DomainSpec& spec, double s);

// ---- Rasters ---------------------------------------------------------------

struct DomainMask {
  GridSpec grid;
  MaskArray inside;  // nx x ny
  std::string name;
  std::optional<bool> declared_simply_connected;

  bool at(const Cell& c) const { return inside(c.i, c.j); }
  Eigen::Index inside_count() const { return inside.count(); }
};

struct DistanceField {
  GridSpec grid;
  Eigen::ArrayXXd d;  // zero on outside cells

  double at(const Cell& c) const { return d(c.i, c.j); }
};

struct TopologyReport {
  int component_count = 0;
  int hole_count = 0;
  bool simply_connected = false;

  bool operator==(const TopologyReport&) const = default;
};

struct Inradius {
  double value = 0.0;
  Cell argmax;
};

/// Cell-centre rasterisation with one padding cell of exterior on every side.
/// The grid lattice is anchored at integer multiples of h.
DomainMask rasterize(const DomainSpec& spec, double h);

/// Intersect a mask with an arbitrary predicate on cell centres (same grid).
DomainMask restrict_mask(const DomainMask& mask, const std::function<bool(const Eigen::Vector2d&)>& keep,
                         std::string name);

double measure(const DomainMask& mask);

/// Exact Euclidean distance from each inside cell centre to the nearest outside
/// cell centre, minus h/2, clamped below at h/4.
DistanceField distance_field(const DomainMask& mask);

Inradius inradius(const DistanceField& field);

/// 4-connected inside components and 8-connected bounded complement components.
TopologyReport topology_check(const DomainMask& mask);

// ---- PGM interchange -------------------------------------------------------

/// Reads a binary P5 PGM (maxval 255). Pixels must be 0 or 255. Rows are stored
/// top-down in the file and mapped to increasing j bottom-up. A padding ring is
/// added only if inside pixels touch the image border.
DomainMask read_pgm(const std::filesystem::path& path, double h, std::string name = "bitmap");

/// Writes the full grid (padding included) as P5, the inverse of read_pgm.
void write_pgm(const DomainMask& mask, const std::filesystem::path& path);

}  // namespace torsionlab
