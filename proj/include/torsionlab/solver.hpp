#pragma once

#include "torsionlab/field.hpp"
#include "torsionlab/geometry.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace torsionlab {

/// Matrix-free 5-point Dirichlet Laplacian (4u - sum of neighbours)/h^2 acting on
/// full-grid arrays. Outside cells are held at zero, so outside neighbours
/// contribute nothing. Requires the one-cell exterior padding of DomainMask.
class DirichletLaplacian {
 public:
  explicit DirichletLaplacian(const DomainMask& mask);

  const GridSpec& grid() const { return grid_; }
  const Eigen::ArrayXXd& support() const { return support_; }
  double diagonal() const { return 4.0 * inv_h2_; }
  Eigen::Index unknowns() const { return unknowns_; }

  /// y = (A - shift I) x, zero outside the mask.
  void apply(const Eigen::ArrayXXd& x, Eigen::ArrayXXd& y, double shift = 0.0) const;

 private:
  GridSpec grid_;
  double inv_h2_;
  Eigen::ArrayXXd support_;  // 1 inside, 0 outside
  Eigen::Index unknowns_;
};

struct CgStats {
  long iterations = 0;
  double residual_rel = 0.0;
};

/// Jacobi-preconditioned conjugate gradients on (A - shift I) x = b with x as
/// the warm start. Requires shift < lambda_min(A). Throws NoConvergence.
CgStats conjugate_gradient(const DirichletLaplacian& op, const Eigen::ArrayXXd& b, Eigen::ArrayXXd& x,
                           double tol_rel, long max_iters, double shift = 0.0);

/// Default iteration cap 50 * max(nx, ny).
long default_max_iterations(const GridSpec& g);

struct TorsionSolution {
  ScalarField w;
  double norm_l1 = 0.0;
  double norm_l2 = 0.0;
  double norm_linf = 0.0;
  Cell argmax_cell;
  double residual_rel = 0.0;
  long iterations = 0;
};

struct SpectralSolution {
  double lambda = 0.0;
  ScalarField u;  // max-normalised, nonnegative
  Cell argmax_cell;
  /// ||A u - lambda u|| / (lambda ||u||)
  double residual_rel = 0.0;
  /// Collatz-Wielandt enclosure of the discrete principal eigenvalue.
  double lambda_lower = 0.0;
  double lambda_upper = 0.0;
  long outer_iterations = 0;
  long inner_iterations = 0;
};

struct EigenOptions {
  double tol_rel = 1e-8;
  double cg_tol_rel = 1e-10;
  long max_outer = 5000;
};

ScalarField apply_laplacian(const DomainMask& mask, const ScalarField& f);

/// -Δw = 1 with zero exterior values. tol_rel must lie in (0, 1e-4].
TorsionSolution solve_torsion(const DomainMask& mask, double tol_rel = 1e-10);

/// Discrete Green column y -> G_h(source, y): right-hand side 1/h^2 at source.
ScalarField solve_green_column(const DomainMask& mask, const Cell& source, double tol_rel = 1e-10);

/// Inverse power iteration for the principal Dirichlet pair, started from the
/// constant vector. Each step is a warm-started CG solve of (A - sigma I) y = v
/// where sigma is a certified lower bound of lambda_1 kept a fixed fraction
/// below it.
SpectralSolution solve_principal_eigen(const DomainMask& mask, const EigenOptions& opts = {});

/// h^2 * sum, (h^2 * sum of squares)^1/2, max and lowest-(j,i) argmax over inside cells.
struct FieldNorms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  Cell argmax;
};
FieldNorms field_norms(const DomainMask& mask, const ScalarField& f);

}  // namespace torsionlab
