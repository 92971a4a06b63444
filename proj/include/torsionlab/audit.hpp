#pragma once

#include "torsionlab/constants.hpp"
#include "torsionlab/geometry.hpp"
#include "torsionlab/solver.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace torsionlab {

/// Relative error estimates of the primary functionals.
struct Uncertainty {
  double area = 0.0;
  double inradius = 0.0;
  double lambda = 0.0;
  double torsion = 0.0;
  double norm_l2 = 0.0;
  double norm_linf = 0.0;
  double dist_w = 0.0;
  double dist_u = 0.0;
};

struct FunctionalSummary {
  std::string domain;
  double h = 0.0;  // finest grid spacing
  double area = 0.0;
  double inradius = 0.0;
  double lambda = 0.0;
  double t_rigidity = 0.0;  // ||w||_1
  double norm_l2_w = 0.0;
  double norm_linf_w = 0.0;
  double product = 0.0;     // ||w||_inf lambda
  double f_value = 0.0;     // T lambda / |D|
  double phi_1inf = 0.0;    // T / (|D| ||w||_inf)
  double phi_12 = 0.0;      // T / (|D|^1/2 ||w||_2)
  Cell argmax_w_cell;
  Cell argmax_u_cell;
  double dist_argmax_w = 0.0;
  double dist_argmax_u = 0.0;
  bool simply_connected = false;
  int component_count = 0;
  int hole_count = 0;
  bool extrapolated = false;
  Uncertainty rel_error;
  /// Observed orders, present only for extrapolated summaries.
  std::map<std::string, double> observed_order;
};

/// Single-grid summary. Error estimates use a staircase heuristic of order h/r.
FunctionalSummary summarize(const DomainMask& mask, const TorsionSolution& torsion,
                            const SpectralSolution& spectral, const DistanceField& dist);

/// Extrapolates the primary functionals over grid levels (coarse to fine, h
/// halving) and recomputes the ratios from the extrapolated values. Argmax
/// cells and topology come from the finest level.
FunctionalSummary combine_levels(std::span<const FunctionalSummary> levels);

enum class CheckStatus { Pass, Fail, NotApplicable };

std::string to_string(CheckStatus s);

struct BoundReport {
  std::string check_id;
  std::string domain;
  double lhs = 0.0;
  double rhs = 0.0;
  /// Oriented so that a positive margin means the inequality holds.
  double margin = 0.0;
  double numerical_error = 0.0;
  /// margin >= -numerical_error
  bool pass = false;
  /// margin > numerical_error: the inequality is resolved beyond the error bar.
  bool resolved = false;
  CheckStatus status = CheckStatus::Fail;
  std::map<std::string, double> params;
  std::string note;
  std::string constants_snapshot_id;
};

struct CheckInfo {
  std::string id;
  std::string description;
};

/// Every check the audit module can emit, in a stable order.
const std::vector<CheckInfo>& check_registry();
bool is_summary_check(const std::string& id);

/// One summary-level check. Throws NotApplicable if the check needs a simply
/// connected domain and the summary is not, BadSpec for an unknown id.
BoundReport audit_summary(const std::string& check_id, const FunctionalSummary& summary,
                          const ConstantTable& constants);

/// All summary checks; the ones that do not apply are reported with status NotApplicable.
std::vector<BoundReport> audit_summary_all(const FunctionalSummary& summary, const ConstantTable& constants);

/// Pointwise torsion bound w(x) <= (32/3) d^{1/2} lambda^{-3/4} c^{3/2} + 2^{9/2} e^{-c} / lambda
/// over inside cells with d >= 2h. lhs is the largest excess, margin = -lhs.
BoundReport audit_pointwise_w(const DomainMask& mask, const TorsionSolution& torsion, const DistanceField& dist,
                              double lambda, double c, const ConstantTable& constants);

/// Kernel bounds for one Green column: pointwise square-root bound, pointwise
/// K0 bound, local integrated bound (radius `range`) and total integrated bound.
/// Pointwise checks skip cells within 4h of the source.
std::vector<BoundReport> audit_green_kernel(const DomainMask& mask, const ScalarField& column, const Cell& source,
                                            const DistanceField& dist, double lambda, double range,
                                            const ConstantTable& constants);

/// Boundary growth of v = scale * w_{U cap B(x0, 2R)} on B(x0, R) cap U, with
/// c = scale * max(1, ||w||_inf). Throws BadBoundaryPoint if no outside cell
/// centre lies within h of x0.
BoundReport audit_boundary_growth(const DomainSpec& spec, const Eigen::Vector2d& x0, double radius, double h,
                                  const ConstantTable& constants, double scale = 1.0, double tol = 1e-10);

/// ||w||_inf lambda >= 1 + lambda h^2 sum_y G(q, y) (1 - lambda w(y))_+ at q = argmax u,
/// with the lower bound of the correction recorded in params.
BoundReport audit_refined_identity(const DomainMask& mask, const TorsionSolution& torsion,
                                   const SpectralSolution& spectral, const ScalarField& green_at_argmax_u,
                                   const ConstantTable& constants);

/// Sorts by (domain, check_id) for order-independent output.
void sort_reports(std::vector<BoundReport>& reports);

}  // namespace torsionlab
