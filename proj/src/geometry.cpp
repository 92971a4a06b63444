#include "torsionlab/geometry.hpp"

#include "torsionlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace torsionlab {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw BadSpec(std::string(what) + " must be a positive finite length");
  }
}

bool in_disk(const Eigen::Vector2d& p, const Eigen::Vector2d& c, double r) {
  return (p - c).squaredNorm() < r * r;
}

Eigen::Vector2d hole_center(int N, int k, int l) {
  return {(2.0 * k - 1.0) / (2.0 * N), (2.0 * l - 1.0) / (2.0 * N)};
}

bool polygon_contains(const std::vector<Eigen::Vector2d>& v, const Eigen::Vector2d& p) {
  bool in = false;
  for (std::size_t a = 0, b = v.size() - 1; a < v.size(); b = a++) {
    const auto& pa = v[a];
    const auto& pb = v[b];
    if ((pa.y() > p.y()) != (pb.y() > p.y())) {
      const double x = pa.x() + (p.y() - pa.y()) * (pb.x() - pa.x()) / (pb.y() - pa.y());
      if (p.x() < x) in = !in;
    }
  }
  return in;
}

// 1-D squared distance transform (lower envelope of parabolas).
void squared_dt_1d(const double* f, double* out, int n, std::vector<int>& v, std::vector<double>& z) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s <= z[k] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  if (k < 0) {
    std::fill(out, out + n, inf);
    return;
  }
  int idx = 0;
  for (int q = 0; q < n; ++q) {
    while (z[idx + 1] < q) ++idx;
    const double dq = q - v[idx];
    out[q] = dq * dq + f[v[idx]];
  }
}

}  // namespace

void validate(const DomainSpec& spec) {
  std::visit(
      overloaded{
          [](const Disk& s) { require_positive(s.R, "disk radius"); },
          [](const Rectangle& s) {
            require_positive(s.a, "rectangle side a");
            require_positive(s.b, "rectangle side b");
          },
          [](const LShape& s) {
            require_positive(s.a, "l_shape side a");
            require_positive(s.b, "l_shape side b");
            require_positive(s.notch, "l_shape notch");
            if (!(s.notch < std::min(s.a, s.b))) throw BadSpec("l_shape notch must be below min(a, b)");
          },
          [](const Annulus& s) {
            require_positive(s.r_in, "annulus r_in");
            require_positive(s.r_out, "annulus r_out");
            if (!(s.r_in < s.r_out)) throw BadSpec("annulus requires r_in < r_out");
          },
          [](const PuncturedSquare& s) {
            if (s.N < 1) throw BadSpec("punctured_square needs N >= 1");
            require_positive(s.rho, "punctured_square rho");
            if (!(s.rho < 1.0 / (2.0 * s.N))) throw BadSpec("punctured_square requires rho < 1/(2N)");
          },
          [](const Dumbbell& s) {
            if (s.n < 1) throw BadSpec("dumbbell needs n >= 1");
            require_positive(s.R, "dumbbell R");
            require_positive(s.tube_w, "dumbbell tube_w");
            require_positive(s.tube_len, "dumbbell tube_len");
            if (!(s.tube_w < 2.0 * s.R)) throw BadSpec("dumbbell requires tube_w < 2R");
          },
          [](const Polygon& s) {
            if (s.vertices.size() < 3) throw BadSpec("polygon needs at least 3 vertices");
            for (const auto& v : s.vertices) {
              if (!v.allFinite()) throw BadSpec("polygon vertex not finite");
            }
          },
          [](const Bitmap& s) {
            if (s.path.empty()) throw BadSpec("bitmap path is empty");
          },
      },
      spec);
}

std::string family_name(const DomainSpec& spec) {
  return std::visit(overloaded{
                        [](const Disk&) { return std::string("disk"); },
                        [](const Rectangle&) { return std::string("rectangle"); },
                        [](const LShape&) { return std::string("l_shape"); },
                        [](const Annulus&) { return std::string("annulus"); },
                        [](const PuncturedSquare&) { return std::string("punctured_square"); },
                        [](const Dumbbell&) { return std::string("dumbbell"); },
                        [](const Polygon&) { return std::string("polygon"); },
                        [](const Bitmap&) { return std::string("bitmap"); },
                    },
                    spec);
}

bool contains(const DomainSpec& spec, const Eigen::Vector2d& p) {
  return std::visit(
      overloaded{
          [&](const Disk& s) { return p.squaredNorm() < s.R * s.R; },
          [&](const Rectangle& s) { return p.x() > 0 && p.x() < s.a && p.y() > 0 && p.y() < s.b; },
          [&](const LShape& s) {
            const bool box = p.x() > 0 && p.x() < s.a && p.y() > 0 && p.y() < s.b;
            const bool notch = p.x() >= s.a - s.notch && p.y() >= s.b - s.notch;
            return box && !notch;
          },
          [&](const Annulus& s) {
            const double r2 = p.squaredNorm();
            return r2 > s.r_in * s.r_in && r2 < s.r_out * s.r_out;
          },
          [&](const PuncturedSquare& s) {
            if (!(p.x() > 0 && p.x() < 1 && p.y() > 0 && p.y() < 1)) return false;
            // only the nearest lattice hole can contain p since rho < 1/(2N)
            const int k = std::clamp(int(std::floor(p.x() * s.N)) + 1, 1, s.N);
            const int l = std::clamp(int(std::floor(p.y() * s.N)) + 1, 1, s.N);
            return (p - hole_center(s.N, k, l)).squaredNorm() > s.rho * s.rho;
          },
          [&](const Dumbbell& s) {
            const double pitch = 2.0 * s.R + s.tube_len;
            for (int k = 0; k < s.n; ++k) {
              if (in_disk(p, {k * pitch, 0.0}, s.R)) return true;
            }
            return s.n > 1 && p.x() > 0 && p.x() < (s.n - 1) * pitch &&
                   std::abs(p.y()) < 0.5 * s.tube_w;
          },
          [&](const Polygon& s) { return polygon_contains(s.vertices, p); },
          [&](const Bitmap&) -> bool { throw BadSpec("bitmap domains have no point predicate"); },
      },
      spec);
}

Eigen::Vector4d bounding_box(const DomainSpec& spec) {
  return std::visit(
      overloaded{
          [](const Disk& s) { return Eigen::Vector4d(-s.R, -s.R, s.R, s.R); },
          [](const Rectangle& s) { return Eigen::Vector4d(0, 0, s.a, s.b); },
          [](const LShape& s) { return Eigen::Vector4d(0, 0, s.a, s.b); },
          [](const Annulus& s) { return Eigen::Vector4d(-s.r_out, -s.r_out, s.r_out, s.r_out); },
          [](const PuncturedSquare&) { return Eigen::Vector4d(0, 0, 1, 1); },
          [](const Dumbbell& s) {
            const double pitch = 2.0 * s.R + s.tube_len;
            return Eigen::Vector4d(-s.R, -s.R, (s.n - 1) * pitch + s.R, s.R);
          },
          [](const Polygon& s) {
            Eigen::Vector4d b(std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
                              std::numeric_limits<double>::lowest(),
                              std::numeric_limits<double>::lowest());
            for (const auto& v : s.vertices) {
              b[0] = std::min(b[0], v.x());
              b[1] = std::min(b[1], v.y());
              b[2] = std::max(b[2], v.x());
              b[3] = std::max(b[3], v.y());
            }
            return b;
          },
          [](const Bitmap&) -> Eigen::Vector4d { throw BadSpec("bitmap domains have no bounding box"); },
      },
      spec);
}

DomainSpec scaled(const DomainSpec& spec, double s) {
  require_positive(s, "scale factor");
  return std::visit(
      overloaded{
          [s](const Disk& d) -> DomainSpec { return Disk{d.R * s}; },
          [s](const Rectangle& d) -> DomainSpec { return Rectangle{d.a * s, d.b * s}; },
          [s](const LShape& d) -> DomainSpec { return LShape{d.a * s, d.b * s, d.notch * s}; },
          [s](const Annulus& d) -> DomainSpec { return Annulus{d.r_in * s, d.r_out * s}; },
          [](const PuncturedSquare&) -> DomainSpec {
            throw BadSpec("punctured_square is defined on the unit square and cannot be rescaled");
          },
          [s](const Dumbbell& d) -> DomainSpec {
            return Dumbbell{d.n, d.R * s, d.tube_w * s, d.tube_len * s};
          },
          [s](const Polygon& d) -> DomainSpec {
            Polygon out = d;
            for (auto& v : out.vertices) v *= s;
            return out;
          },
          [](const Bitmap&) -> DomainSpec { throw BadSpec("bitmap domains cannot be rescaled"); },
      },
      spec);
}

DomainMask rasterize(const DomainSpec& spec, double h) {
  validate(spec);
  if (!(h > 0.0) || !std::isfinite(h)) throw BadSpec("grid spacing h must be positive");
  if (const auto* bm = std::get_if<Bitmap>(&spec)) return read_pgm(bm->path, h);

  const Eigen::Vector4d box = bounding_box(spec);
  // snap outward to the lattice of multiples of h, plus one padding cell
  const auto lo = [h](double v) { return static_cast<long>(std::floor(v / h + 1e-9)) - 1; };
  const auto hi = [h](double v) { return static_cast<long>(std::ceil(v / h - 1e-9)) + 1; };
  const long i0 = lo(box[0]), j0 = lo(box[1]), i1 = hi(box[2]), j1 = hi(box[3]);
  const long nx = i1 - i0, ny = j1 - j0;
  if (nx * ny > 400'000'000L) throw BadSpec("raster too large for requested h");

  DomainMask mask;
  mask.grid = GridSpec{double(i0) * h, double(j0) * h, h, int(nx), int(ny)};
  mask.name = family_name(spec);
  mask.inside = MaskArray::Constant(nx, ny, false);
  for (int j = 1; j + 1 < ny; ++j) {
    for (int i = 1; i + 1 < nx; ++i) {
      mask.inside(i, j) = contains(spec, mask.grid.center(i, j));
    }
  }
  if (std::holds_alternative<PuncturedSquare>(spec) || std::holds_alternative<Annulus>(spec)) {
    mask.declared_simply_connected = false;
  } else if (!std::holds_alternative<Polygon>(spec)) {
    mask.declared_simply_connected = true;
  }
  if (mask.inside_count() == 0) {
    std::ostringstream os;
    os << "no cell centre of " << mask.name << " falls inside at h=" << h;
    throw EmptyRaster(os.str());
  }
  return mask;
}

DomainMask restrict_mask(const DomainMask& mask, const std::function<bool(const Eigen::Vector2d&)>& keep,
                         std::string name) {
  DomainMask out = mask;
  out.name = std::move(name);
  out.declared_simply_connected.reset();
  for (int j = 0; j < mask.grid.ny; ++j) {
    for (int i = 0; i < mask.grid.nx; ++i) {
      if (out.inside(i, j) && !keep(mask.grid.center(i, j))) out.inside(i, j) = false;
    }
  }
  if (out.inside_count() == 0) throw EmptyRaster("restriction of " + mask.name + " is empty");
  return out;
}

double measure(const DomainMask& mask) {
  return mask.grid.h * mask.grid.h * double(mask.inside_count());
}

DistanceField distance_field(const DomainMask& mask) {
  const int nx = mask.grid.nx, ny = mask.grid.ny;
  const double h = mask.grid.h;
  constexpr double inf = std::numeric_limits<double>::infinity();

  // squared distance in cell units to the nearest outside cell centre
  Eigen::ArrayXXd sq(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) sq(i, j) = mask.inside(i, j) ? inf : 0.0;

  std::vector<int> v;
  std::vector<double> z;
  std::vector<double> in(std::max(nx, ny)), out(std::max(nx, ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) in[i] = sq(i, j);
    squared_dt_1d(in.data(), out.data(), nx, v, z);
    for (int i = 0; i < nx; ++i) sq(i, j) = out[i];
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) in[j] = sq(i, j);
    squared_dt_1d(in.data(), out.data(), ny, v, z);
    for (int j = 0; j < ny; ++j) sq(i, j) = out[j];
  }

  DistanceField f{mask.grid, Eigen::ArrayXXd::Zero(nx, ny)};
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (mask.inside(i, j)) f.d(i, j) = std::max(std::sqrt(sq(i, j)) * h - 0.5 * h, 0.25 * h);
    }
  }
  return f;
}

Inradius inradius(const DistanceField& field) {
  Inradius r;
  r.value = -1.0;
  // scan j-major so the first strict maximum is the lowest (j, i)
  for (int j = 0; j < field.grid.ny; ++j) {
    for (int i = 0; i < field.grid.nx; ++i) {
      if (field.d(i, j) > r.value) {
        r.value = field.d(i, j);
        r.argmax = {i, j};
      }
    }
  }
  return r;
}

TopologyReport topology_check(const DomainMask& mask) {
  const int nx = mask.grid.nx, ny = mask.grid.ny;
  Eigen::ArrayXXi label = Eigen::ArrayXXi::Constant(nx, ny, -1);
  std::vector<Cell> stack;

  const auto flood = [&](Cell seed, bool inside_value, bool eight, int id) {
    stack.clear();
    stack.push_back(seed);
    label(seed.i, seed.j) = id;
    while (!stack.empty()) {
      const Cell c = stack.back();
      stack.pop_back();
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if ((di == 0 && dj == 0) || (!eight && di != 0 && dj != 0)) continue;
          const int a = c.i + di, b = c.j + dj;
          if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
          if (label(a, b) >= 0 || mask.inside(a, b) != inside_value) continue;
          label(a, b) = id;
          stack.push_back({a, b});
        }
      }
    }
  };

  TopologyReport rep;
  int next = 0;
  // exterior first: everything 8-connected to the frame
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const bool frame = i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
      if (frame && !mask.inside(i, j) && label(i, j) < 0) flood({i, j}, false, true, next++);
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (label(i, j) >= 0) continue;
      if (mask.inside(i, j)) {
        flood({i, j}, true, false, next++);
        ++rep.component_count;
      } else {
        flood({i, j}, false, true, next++);
        ++rep.hole_count;
      }
    }
  }
  rep.simply_connected = rep.component_count == 1 && rep.hole_count == 0;
  return rep;
}

}  // namespace torsionlab
