#include "torsionlab/solver.hpp"

#include "torsionlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace torsionlab {
namespace {

void require_grid(const DomainMask& mask, const ScalarField& f) {
  if (!(mask.grid == f.grid) || f.values.rows() != mask.grid.nx || f.values.cols() != mask.grid.ny) {
    throw GridMismatch("field grid does not match mask grid");
  }
}

void require_tolerance(double tol) {
  if (!(tol > 0.0 && tol <= 1e-4)) throw Error("solver tolerance must lie in (0, 1e-4]");
}

double dot(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b) { return (a * b).sum(); }
double norm(const Eigen::ArrayXXd& a) { return std::sqrt(a.square().sum()); }

}  // namespace

DirichletLaplacian::DirichletLaplacian(const DomainMask& mask)
    : grid_(mask.grid),
      inv_h2_(1.0 / (mask.grid.h * mask.grid.h)),
      support_(mask.inside.cast<double>()),
      unknowns_(mask.inside_count()) {
  const int nx = grid_.nx, ny = grid_.ny;
  if (nx < 3 || ny < 3 || mask.inside.row(0).any() || mask.inside.row(nx - 1).any() ||
      mask.inside.col(0).any() || mask.inside.col(ny - 1).any()) {
    throw GridMismatch("mask must carry a one-cell exterior frame");
  }
}

void DirichletLaplacian::apply(const Eigen::ArrayXXd& x, Eigen::ArrayXXd& y, double shift) const {
  const Eigen::Index nx = grid_.nx, ny = grid_.ny;
  const Eigen::Index mx = nx - 2, my = ny - 2;
  y.setZero(nx, ny);
  y.block(1, 1, mx, my) = (4.0 * inv_h2_ - shift) * x.block(1, 1, mx, my) -
                          inv_h2_ * (x.block(0, 1, mx, my) + x.block(2, 1, mx, my) +
                                     x.block(1, 0, mx, my) + x.block(1, 2, mx, my));
  y *= support_;
}

long default_max_iterations(const GridSpec& g) { return 50L * std::max(g.nx, g.ny); }

CgStats conjugate_gradient(const DirichletLaplacian& op, const Eigen::ArrayXXd& b, Eigen::ArrayXXd& x,
                           double tol_rel, long max_iters, double shift) {
  const double bnorm = norm(b);
  CgStats stats;
  if (x.rows() != b.rows() || x.cols() != b.cols()) x.setZero(b.rows(), b.cols());
  x *= op.support();
  if (bnorm == 0.0) {
    x.setZero();
    return stats;
  }
  const double inv_diag = 1.0 / (op.diagonal() - shift);
  Eigen::ArrayXXd r, z, p, Ap;

  // Recompute the true residual on exit from the recurrence; restart if it drifted.
  for (int restart = 0; restart < 4; ++restart) {
    op.apply(x, Ap, shift);
    r = (b * op.support()) - Ap;
    double rnorm = norm(r);
    if (rnorm <= tol_rel * bnorm) {
      stats.residual_rel = rnorm / bnorm;
      return stats;
    }
    z = r * inv_diag;
    p = z;
    double rz = dot(r, z);
    while (stats.iterations < max_iters) {
      op.apply(p, Ap, shift);
      const double curvature = dot(p, Ap);
      if (!(curvature > 0.0)) {
        throw NoConvergence("conjugate gradient lost positive definiteness", stats.iterations,
                            rnorm / bnorm);
      }
      const double alpha = rz / curvature;
      x += alpha * p;
      r -= alpha * Ap;
      ++stats.iterations;
      rnorm = norm(r);
      if (rnorm <= tol_rel * bnorm) break;
      z = r * inv_diag;
      const double rz_next = dot(r, z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
    if (stats.iterations >= max_iters && rnorm > tol_rel * bnorm) {
      throw NoConvergence("conjugate gradient hit the iteration cap", stats.iterations, rnorm / bnorm);
    }
  }
  op.apply(x, Ap, shift);
  stats.residual_rel = norm(b * op.support() - Ap) / bnorm;
  if (stats.residual_rel > 10.0 * tol_rel) {
    throw NoConvergence("conjugate gradient residual drifted", stats.iterations, stats.residual_rel);
  }
  return stats;
}

FieldNorms field_norms(const DomainMask& mask, const ScalarField& f) {
  require_grid(mask, f);
  const double h2 = mask.grid.h * mask.grid.h;
  FieldNorms n;
  double sum = 0.0, sum2 = 0.0;
  n.linf = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < mask.grid.ny; ++j) {
    for (int i = 0; i < mask.grid.nx; ++i) {
      if (!mask.inside(i, j)) continue;
      const double v = f.values(i, j);
      sum += v;
      sum2 += v * v;
      if (v > n.linf) {
        n.linf = v;
        n.argmax = {i, j};
      }
    }
  }
  n.l1 = h2 * sum;
  n.l2 = std::sqrt(h2 * sum2);
  return n;
}

ScalarField apply_laplacian(const DomainMask& mask, const ScalarField& f) {
  require_grid(mask, f);
  const DirichletLaplacian op(mask);
  ScalarField out = ScalarField::zeros(mask.grid);
  op.apply(f.values * op.support(), out.values);
  return out;
}

TorsionSolution solve_torsion(const DomainMask& mask, double tol_rel) {
  require_tolerance(tol_rel);
  const DirichletLaplacian op(mask);
  ScalarField w = ScalarField::zeros(mask.grid);
  const CgStats stats =
      conjugate_gradient(op, op.support(), w.values, tol_rel, default_max_iterations(mask.grid));
  const FieldNorms n = field_norms(mask, w);
  TorsionSolution sol{std::move(w), n.l1, n.l2, n.linf, n.argmax, stats.residual_rel, stats.iterations};
  return sol;
}

ScalarField solve_green_column(const DomainMask& mask, const Cell& source, double tol_rel) {
  require_tolerance(tol_rel);
  if (source.i < 0 || source.j < 0 || source.i >= mask.grid.nx || source.j >= mask.grid.ny ||
      !mask.at(source)) {
    throw SourceOutside("Green column source is not an inside cell");
  }
  const DirichletLaplacian op(mask);
  Eigen::ArrayXXd b = Eigen::ArrayXXd::Zero(mask.grid.nx, mask.grid.ny);
  b(source.i, source.j) = 1.0 / (mask.grid.h * mask.grid.h);
  ScalarField g = ScalarField::zeros(mask.grid);
  // The column sum errs by h^2 w.r for residual r, at most ||w||_inf sqrt(N) h^2 ||r||.
  // Residuals relative to the point load are scaled down by sqrt(N) so that the sum
  // stays within tol_rel * ||w||_inf, like the torsion solve itself.
  const double column_tol = tol_rel / std::sqrt(static_cast<double>(mask.inside_count()));
  conjugate_gradient(op, b, g.values, column_tol, default_max_iterations(mask.grid));
  return g;
}

SpectralSolution solve_principal_eigen(const DomainMask& mask, const EigenOptions& opts) {
  if (!(opts.tol_rel > 0.0)) throw Error("eigen tolerance must be positive");
  require_tolerance(opts.cg_tol_rel);
  const DirichletLaplacian op(mask);
  const long cg_cap = default_max_iterations(mask.grid);
  const Eigen::ArrayXXd& support = op.support();

  // Certified shift: for the nonnegative inverse B = (A - sigma)^-1 and positive v,
  // min_i (Bv)_i / v_i <= rho(B) <= max_i (Bv)_i / v_i (Collatz-Wielandt).
  // The shift trails the certified lower bound by the bracket width, floored
  // at a fixed fraction so CG conditioning stays bounded.
  constexpr double kMinShiftGap = 1e-4;
  Eigen::ArrayXXd v = support / std::sqrt(double(op.unknowns()));
  Eigen::ArrayXXd y = Eigen::ArrayXXd::Zero(mask.grid.nx, mask.grid.ny);
  Eigen::ArrayXXd Ay;
  double sigma = 0.0;
  double lambda = std::numeric_limits<double>::infinity();
  SpectralSolution sol;

  for (long k = 1; k <= opts.max_outer; ++k) {
    CgStats stats;
    try {
      stats = conjugate_gradient(op, v, y, opts.cg_tol_rel, cg_cap, sigma);
    } catch (const NoConvergence&) {
      if (sigma == 0.0) throw;
      // shift landed too close to the spectrum under round-off; back off and redo the step
      sigma = std::max(0.0, 2.0 * sigma - sol.lambda_lower);
      if (sigma < 0.5 * sol.lambda_lower) sigma = 0.0;
      y = std::isfinite(lambda) ? Eigen::ArrayXXd(v / (lambda - sigma)) : Eigen::ArrayXXd(v * 0.0);
      continue;
    }
    sol.inner_iterations += stats.iterations;

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool positive = true;
    for (Eigen::Index c = 0; c < y.cols() && positive; ++c) {
      for (Eigen::Index r = 0; r < y.rows(); ++r) {
        if (support(r, c) == 0.0) continue;
        if (!(y(r, c) > 0.0) || !(v(r, c) > 0.0)) {
          positive = false;
          break;
        }
        const double ratio = v(r, c) / y(r, c);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }

    const double ynorm = norm(y);
    op.apply(y, Ay);
    const double next = dot(y, Ay) / (ynorm * ynorm);
    const double residual = norm(Ay - next * y) / (next * ynorm);
    const double change = std::abs(next - lambda) / next;
    lambda = next;
    if (positive) {
      sol.lambda_lower = sigma + lo;
      sol.lambda_upper = sigma + hi;
      const double gap = std::max(sol.lambda_upper - sol.lambda_lower, kMinShiftGap * sol.lambda_lower);
      sigma = std::max(sigma, sol.lambda_lower - gap);
    }
    v = y / ynorm;
    sol.outer_iterations = k;
    sol.residual_rel = residual;
    if (change <= opts.tol_rel && residual <= 10.0 * opts.tol_rel) break;
    if (k == opts.max_outer) {
      throw NoConvergence("inverse iteration hit the outer iteration cap", k, residual);
    }
    y = v / (lambda - sigma);
  }

  sol.lambda = lambda;
  sol.u.grid = mask.grid;
  sol.u.values = (v.max(0.0) * support);
  const FieldNorms n = field_norms(mask, sol.u);
  sol.u.values /= n.linf;
  sol.argmax_cell = n.argmax;
  return sol;
}

}  // namespace torsionlab
