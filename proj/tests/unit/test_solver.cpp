#include "torsionlab/errors.hpp"
#include "torsionlab/geometry.hpp"
#include "torsionlab/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace torsionlab;

namespace {

constexpr double kTol = 1e-10;

// Reference discrete eigenvalue of the 5-point Laplacian on an n x m cell block.
double block_lambda(int n, int m, double h) {
  const auto mode = [h](int k) {
    const double s = std::sin(std::numbers::pi / (2.0 * (k + 1)));
    return 4.0 * s * s / (h * h);
  };
  return mode(n) + mode(m);
}

std::vector<Cell> random_inside_cells(const DomainMask& mask, int count, unsigned seed) {
  std::vector<Cell> cells;
  for (int j = 0; j < mask.grid.ny; ++j)
    for (int i = 0; i < mask.grid.nx; ++i)
      if (mask.inside(i, j)) cells.push_back({i, j});
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  std::vector<Cell> out;
  for (int k = 0; k < count; ++k) out.push_back(cells[pick(rng)]);
  return out;
}

}  // namespace

TEST_CASE("torsion residual and positivity") {
  const DomainMask mask = rasterize(LShape{1.0, 1.0, 0.5}, 1.0 / 32);
  const TorsionSolution w = solve_torsion(mask, kTol);
  CHECK(w.residual_rel <= kTol);
  const ScalarField lap = apply_laplacian(mask, w.w);
  double worst = 0.0;
  for (int j = 0; j < mask.grid.ny; ++j)
    for (int i = 0; i < mask.grid.nx; ++i) {
      if (mask.inside(i, j)) {
        worst = std::max(worst, std::abs(lap.values(i, j) - 1.0));
        CHECK(w.w.values(i, j) > 0.0);
      } else {
        CHECK(w.w.values(i, j) == 0.0);
      }
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("maximum principle against a quadratic barrier") {
  // v = (R^2 - |x - c|^2)/4 has discrete Laplacian exactly -1; with v >= 0 on
  // every neighbour of the domain, the discrete maximum principle gives w <= v.
  for (const DomainSpec& spec : std::vector<DomainSpec>{Dumbbell{2, 0.5, 0.3, 0.25}, LShape{1.0, 1.0, 0.5}}) {
    const DomainMask mask = rasterize(spec, 1.0 / 32);
    const TorsionSolution w = solve_torsion(mask, kTol);
    const Eigen::Vector4d box = bounding_box(spec);
    const Eigen::Vector2d c(0.5 * (box[0] + box[2]), 0.5 * (box[1] + box[3]));
    double R2 = 0.0;
    for (int j = 0; j < mask.grid.ny; ++j)
      for (int i = 0; i < mask.grid.nx; ++i) R2 = std::max(R2, (mask.grid.center(i, j) - c).squaredNorm());
    bool below = true;
    for (int j = 0; j < mask.grid.ny; ++j)
      for (int i = 0; i < mask.grid.nx; ++i) {
        const double v = 0.25 * (R2 - (mask.grid.center(i, j) - c).squaredNorm());
        below = below && w.w.values(i, j) <= v * (1.0 + 1e-8) && w.w.values(i, j) >= 0.0;
      }
    CHECK(below);
  }
}

TEST_CASE("eigenvalue of a grid-aligned square matches the discrete closed form") {
  const double h = 1.0 / 32;
  const DomainMask mask = rasterize(Rectangle{1.0, 0.5}, h);
  const SpectralSolution u = solve_principal_eigen(mask);
  const double ref = block_lambda(32, 16, h);
  CHECK(std::abs(u.lambda - ref) / ref < 1e-7);
  CHECK(u.lambda_lower <= ref * (1 + 1e-12));
  CHECK(u.lambda_upper >= ref * (1 - 1e-12));
  CHECK(u.u.values.maxCoeff() == doctest::Approx(1.0));
  CHECK(u.u.values.minCoeff() >= 0.0);
}

TEST_CASE("discrete Green identity at random sources") {
  for (const DomainSpec& spec : std::vector<DomainSpec>{Disk{1.0}, LShape{1.0, 1.0, 0.5}, Annulus{0.5, 1.0}}) {
    const DomainMask mask = rasterize(spec, 1.0 / 32);
    const TorsionSolution w = solve_torsion(mask, kTol);
    const double h2 = mask.grid.h * mask.grid.h;
    for (const Cell& c : random_inside_cells(mask, 10, 11)) {
      const ScalarField g = solve_green_column(mask, c, kTol);
      const double lhs = h2 * g.values.sum();
      CHECK(std::abs(lhs - w.w.at(c)) <= 2.0 * kTol * w.w.at(c));
      CHECK(g.values.minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("Green column rejects outside sources") {
  const DomainMask mask = rasterize(Disk{1.0}, 1.0 / 16);
  CHECK_THROWS_AS(solve_green_column(mask, Cell{0, 0}, kTol), SourceOutside);
}

TEST_CASE("domain monotonicity under cell-wise inclusion") {
  const double h = 1.0 / 32;
  const DomainMask big = rasterize(Rectangle{1.0, 1.0}, h);
  const DomainMask small =
      restrict_mask(big, [](const Eigen::Vector2d& p) { return (p - Eigen::Vector2d(0.5, 0.5)).norm() < 0.45; },
                    "inner");
  const TorsionSolution wb = solve_torsion(big, kTol);
  const TorsionSolution ws = solve_torsion(small, kTol);
  CHECK(((wb.w.values - ws.w.values) >= -1e-12).all());
  CHECK(solve_principal_eigen(small).lambda > solve_principal_eigen(big).lambda);
}

TEST_CASE("scaling covariance under doubling") {
  // w scales as s^2, lambda as s^-2, T as s^4; exact when the lattice scales with the domain
  const DomainSpec spec = LShape{1.0, 1.0, 0.5};
  const DomainMask a = rasterize(spec, 1.0 / 32);
  const DomainMask b = rasterize(scaled(spec, 2.0), 1.0 / 16);
  const TorsionSolution wa = solve_torsion(a, kTol), wb = solve_torsion(b, kTol);
  const double la = solve_principal_eigen(a).lambda, lb = solve_principal_eigen(b).lambda;
  CHECK(std::abs(wb.norm_linf / (4.0 * wa.norm_linf) - 1.0) < 0.005);
  CHECK(std::abs(wb.norm_l1 / (16.0 * wa.norm_l1) - 1.0) < 0.005);
  CHECK(std::abs(4.0 * lb / la - 1.0) < 0.005);
}

TEST_CASE("reruns are bit-identical") {
  const DomainMask mask = rasterize(Dumbbell{3, 0.5, 0.3, 0.25}, 1.0 / 32);
  const TorsionSolution w1 = solve_torsion(mask, kTol), w2 = solve_torsion(mask, kTol);
  CHECK((w1.w.values == w2.w.values).all());
  const SpectralSolution u1 = solve_principal_eigen(mask), u2 = solve_principal_eigen(mask);
  CHECK(u1.lambda == u2.lambda);
  CHECK((u1.u.values == u2.u.values).all());
}

TEST_CASE("solver input validation") {
  const DomainMask mask = rasterize(Disk{1.0}, 1.0 / 16);
  CHECK_THROWS_AS(solve_torsion(mask, 0.0), Error);
  CHECK_THROWS_AS(solve_torsion(mask, 1e-3), Error);
  EigenOptions bad;
  bad.tol_rel = -1.0;
  CHECK_THROWS_AS(solve_principal_eigen(mask, bad), Error);
  DomainMask unpadded = mask;
  unpadded.inside(0, mask.grid.ny / 2) = true;
  CHECK_THROWS_AS(DirichletLaplacian{unpadded}, GridMismatch);
}

TEST_CASE("iteration cap raises NoConvergence") {
  const DomainMask mask = rasterize(Disk{1.0}, 1.0 / 32);
  const DirichletLaplacian op(mask);
  Eigen::ArrayXXd x = Eigen::ArrayXXd::Zero(mask.grid.nx, mask.grid.ny);
  CHECK_THROWS_AS(conjugate_gradient(op, op.support(), x, 1e-12, 3), NoConvergence);
}
