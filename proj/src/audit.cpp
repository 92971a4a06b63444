#include "torsionlab/audit.hpp"

#include "torsionlab/errors.hpp"
#include "torsionlab/extrapolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace torsionlab {
namespace {

constexpr double kErrorFloor = 1e-12;

void finish(BoundReport& r, const ConstantTable& constants) {
  r.numerical_error = std::max(r.numerical_error, kErrorFloor);
  r.pass = r.margin >= -r.numerical_error;
  r.resolved = r.margin > r.numerical_error;
  r.status = r.pass ? CheckStatus::Pass : CheckStatus::Fail;
  r.constants_snapshot_id = constants.snapshot_id;
}

BoundReport make(const std::string& id, const std::string& domain) {
  BoundReport r;
  r.check_id = id;
  r.domain = domain;
  return r;
}

BoundReport not_applicable(const std::string& id, const std::string& domain, const std::string& why,
                           const ConstantTable& constants) {
  BoundReport r = make(id, domain);
  r.status = CheckStatus::NotApplicable;
  r.pass = true;
  r.note = why;
  r.constants_snapshot_id = constants.snapshot_id;
  return r;
}

void require_same_grid(const DomainMask& mask, const GridSpec& g) {
  if (!(mask.grid == g)) throw GridMismatch("inputs live on different grids");
}

void require_simply_connected(const std::string& id, const DomainMask& mask) {
  if (!topology_check(mask).simply_connected) throw NotApplicable(id, "domain is not simply connected");
}

double rel_or(double estimate, double value) {
  return value != 0.0 ? std::abs(estimate / value) : 0.0;
}

const std::vector<std::string> kSimplyConnectedChecks = {"THM1", "THM2", "PROP1_PHI12", "COR1_PHI1INF",
                                                         "E5X"};

}  // namespace

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not_applicable";
  }
  return "fail";
}

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> registry = {
      {"E2_LOWER", "||w||_inf lambda > 1"},
      {"E2_UPPER", "||w||_inf lambda <= improved planar ceiling (about 2.106)"},
      {"THM1", "||w||_inf lambda >= 1 + excess (simply connected)"},
      {"THM2", "T lambda / |D| <= 1 - deficit (simply connected)"},
      {"E9", "T lambda / |D| <= 1 - pi T / |D|^2"},
      {"E5X", "||w||_inf <= 7 zeta(3) r^2 / (16 c0^2) (simply connected)"},
      {"PROP1_PHI12", "T / (|D|^1/2 ||w||_2) <= (1 - deficit)^1/2 (simply connected)"},
      {"COR1_PHI1INF", "T / (|D| ||w||_inf) <= (1 - deficit) / (1 + excess) (simply connected)"},
      {"E12B_ARGMAX_W", "d(argmax w) lambda^1/2 >= (9/1024) distance gain"},
      {"E13_ARGMAX_U", "d(argmax u) lambda^1/2 >= (9/1024) distance gain"},
      {"E50_INRADIUS", "lambda r^2 <= j0^2"},
      {"E12_POINTWISE", "w(x) <= (32/3) d^1/2 lambda^-3/4 c^3/2 + 2^9/2 e^-c / lambda (simply connected)"},
      {"E20_GREEN", "G(x,y) <= (1/pi) (d(x)/|x-y|)^1/2 (simply connected)"},
      {"LEMMA2_GREEN", "G(x,y) <= (2^1/2 / (2 pi)) K0(|x-y| (lambda/8)^1/2)"},
      {"E16_LOCAL_GREEN", "int_{|x-y|<L} G <= (4/3) d(x)^1/2 L^3/2 (simply connected)"},
      {"E17_INTEGRATED_GREEN", "int G(x,y) dy <= 4/(3 pi^3/4) d(x)^1/2 |D|^3/4 (simply connected)"},
      {"BOUNDARY_GROWTH", "v(x) <= c K |x-x0|^1/2 near a boundary point (simply connected)"},
      {"E38_REFINED", "||w||_inf lambda >= 1 + lambda int G(q,y)(1 - lambda w)_+ (simply connected)"},
  };
  return registry;
}

bool is_summary_check(const std::string& id) {
  static const std::vector<std::string> ids = {"E2_LOWER",    "E2_UPPER",     "THM1",          "THM2",
                                               "E9",          "E5X",          "PROP1_PHI12",   "COR1_PHI1INF",
                                               "E12B_ARGMAX_W", "E13_ARGMAX_U", "E50_INRADIUS"};
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

FunctionalSummary summarize(const DomainMask& mask, const TorsionSolution& torsion,
                            const SpectralSolution& spectral, const DistanceField& dist) {
  require_same_grid(mask, torsion.w.grid);
  require_same_grid(mask, spectral.u.grid);
  require_same_grid(mask, dist.grid);
  FunctionalSummary s;
  s.domain = mask.name;
  s.h = mask.grid.h;
  s.area = measure(mask);
  const Inradius r = inradius(dist);
  s.inradius = r.value;
  s.lambda = spectral.lambda;
  s.t_rigidity = torsion.norm_l1;
  s.norm_l2_w = torsion.norm_l2;
  s.norm_linf_w = torsion.norm_linf;
  s.argmax_w_cell = torsion.argmax_cell;
  s.argmax_u_cell = spectral.argmax_cell;
  s.dist_argmax_w = dist.at(s.argmax_w_cell);
  s.dist_argmax_u = dist.at(s.argmax_u_cell);
  const TopologyReport topo = topology_check(mask);
  s.simply_connected = topo.simply_connected;
  s.component_count = topo.component_count;
  s.hole_count = topo.hole_count;

  s.product = s.norm_linf_w * s.lambda;
  s.f_value = s.t_rigidity * s.lambda / s.area;
  s.phi_1inf = s.t_rigidity / (s.area * s.norm_linf_w);
  s.phi_12 = s.t_rigidity / (std::sqrt(s.area) * s.norm_l2_w);

  // staircase boundary displaces the domain by about h/2 everywhere
  const double stair = 2.0 * s.h / s.inradius;
  s.rel_error = {stair, s.h / s.inradius, stair, stair, stair, stair, s.h / s.dist_argmax_w,
                 s.h / s.dist_argmax_u};
  return s;
}

FunctionalSummary combine_levels(std::span<const FunctionalSummary> levels) {
  if (levels.empty()) throw Error("no levels to combine");
  FunctionalSummary s = levels.back();
  if (levels.size() < 3) return s;
  const auto run = [&](auto member, const char* name, double& rel) {
    std::vector<LevelValue> values;
    for (const FunctionalSummary& l : levels) values.push_back({l.h, l.*member});
    const ExtrapolationResult e = extrapolate_or_finest(values);
    s.*member = e.value;
    rel = std::max(rel_or(e.error_estimate, e.value), 1e-9);
    s.observed_order[name] = e.observed_order;
  };
  Uncertainty& u = s.rel_error;
  run(&FunctionalSummary::area, "area", u.area);
  run(&FunctionalSummary::inradius, "inradius", u.inradius);
  run(&FunctionalSummary::lambda, "lambda", u.lambda);
  run(&FunctionalSummary::t_rigidity, "t_rigidity", u.torsion);
  run(&FunctionalSummary::norm_l2_w, "norm_l2_w", u.norm_l2);
  run(&FunctionalSummary::norm_linf_w, "norm_linf_w", u.norm_linf);
  run(&FunctionalSummary::dist_argmax_w, "dist_argmax_w", u.dist_w);
  run(&FunctionalSummary::dist_argmax_u, "dist_argmax_u", u.dist_u);
  s.product = s.norm_linf_w * s.lambda;
  s.f_value = s.t_rigidity * s.lambda / s.area;
  s.phi_1inf = s.t_rigidity / (s.area * s.norm_linf_w);
  s.phi_12 = s.t_rigidity / (std::sqrt(s.area) * s.norm_l2_w);
  s.extrapolated = true;
  return s;
}

BoundReport audit_summary(const std::string& id, const FunctionalSummary& s, const ConstantTable& k) {
  if (!is_summary_check(id)) throw BadSpec("unknown summary check: " + id);
  if (!s.simply_connected &&
      std::find(kSimplyConnectedChecks.begin(), kSimplyConnectedChecks.end(), id) != kSimplyConnectedChecks.end()) {
    throw NotApplicable(id, "domain is not simply connected");
  }
  const Uncertainty& e = s.rel_error;
  BoundReport r = make(id, s.domain);
  const double product_err = s.product * (e.norm_linf + e.lambda);
  const double f_err = s.f_value * (e.torsion + e.lambda + e.area);

  if (id == "E2_LOWER") {
    r.lhs = 1.0;
    r.rhs = s.product;
    r.margin = s.product - 1.0;
    r.numerical_error = product_err;
  } else if (id == "E2_UPPER") {
    r.lhs = s.product;
    r.rhs = k.product_ceiling;
    r.margin = k.product_ceiling - s.product;
    r.numerical_error = product_err;
    r.params["classic_ceiling"] = k.product_ceiling_classic;
  } else if (id == "THM1") {
    r.lhs = k.product_floor;
    r.rhs = s.product;
    r.margin = (s.product - 1.0) - k.product_excess;
    r.numerical_error = product_err;
    r.params["excess"] = k.product_excess;
  } else if (id == "THM2") {
    r.lhs = s.f_value;
    r.rhs = k.energy_ceiling;
    r.margin = (1.0 - s.f_value) - k.deficit;
    r.numerical_error = f_err;
    r.params["deficit"] = k.deficit;
  } else if (id == "E9") {
    const double ratio = k.unit_disk_area * s.t_rigidity / (s.area * s.area);
    r.lhs = s.f_value;
    r.rhs = 1.0 - ratio;
    r.margin = r.rhs - r.lhs;
    r.numerical_error = f_err + ratio * (e.torsion + 2.0 * e.area);
  } else if (id == "E5X") {
    r.lhs = s.norm_linf_w / (s.inradius * s.inradius);
    r.rhs = k.max_torsion_coefficient;
    r.margin = r.rhs - r.lhs;
    r.numerical_error = r.lhs * (e.norm_linf + 2.0 * e.inradius);
    r.params["bloch_landau_lower"] = k.bloch_landau_lower;
  } else if (id == "PROP1_PHI12") {
    const double root = std::sqrt(1.0 - k.deficit);
    r.lhs = s.phi_12;
    r.rhs = root;
    r.margin = (1.0 - s.phi_12) - k.deficit / (1.0 + root);
    r.numerical_error = s.phi_12 * (e.torsion + 0.5 * e.area + e.norm_l2);
    r.params["deficit"] = k.deficit;
  } else if (id == "COR1_PHI1INF") {
    r.lhs = s.phi_1inf;
    r.rhs = k.mean_to_max_ceiling;
    r.margin = (1.0 - s.phi_1inf) - k.mean_to_max_deficit;
    r.numerical_error = s.phi_1inf * (e.torsion + e.area + e.norm_linf);
    r.params["deficit"] = k.mean_to_max_deficit;
  } else if (id == "E12B_ARGMAX_W" || id == "E13_ARGMAX_U") {
    const bool torsion = id == "E12B_ARGMAX_W";
    const double d = torsion ? s.dist_argmax_w : s.dist_argmax_u;
    const double rel_d = torsion ? e.dist_w : e.dist_u;
    r.lhs = 9.0 / 1024.0 * k.distance_gain;
    r.rhs = d * std::sqrt(s.lambda);
    r.margin = r.rhs - r.lhs;
    r.numerical_error = r.rhs * (rel_d + 0.5 * e.lambda);
    r.params["c"] = k.distance_gain_argmax;
  } else {  // E50_INRADIUS
    r.lhs = s.lambda * s.inradius * s.inradius;
    r.rhs = k.bessel_zero * k.bessel_zero;
    r.margin = r.rhs - r.lhs;
    r.numerical_error = r.lhs * (e.lambda + 2.0 * e.inradius);
  }
  r.params["h"] = s.h;
  finish(r, k);
  return r;
}

std::vector<BoundReport> audit_summary_all(const FunctionalSummary& s, const ConstantTable& k) {
  std::vector<BoundReport> out;
  for (const CheckInfo& info : check_registry()) {
    if (!is_summary_check(info.id)) continue;
    try {
      out.push_back(audit_summary(info.id, s, k));
    } catch (const NotApplicable& na) {
      out.push_back(not_applicable(info.id, s.domain, na.what(), k));
    }
  }
  return out;
}

BoundReport audit_pointwise_w(const DomainMask& mask, const TorsionSolution& torsion, const DistanceField& dist,
                              double lambda, double c, const ConstantTable& k) {
  if (!(c > 0.0)) throw BadSpec("free parameter c must be positive");
  if (!(lambda > 0.0)) throw BadSpec("eigenvalue must be positive");
  require_same_grid(mask, torsion.w.grid);
  require_same_grid(mask, dist.grid);
  require_simply_connected("E12_POINTWISE", mask);
  const double h = mask.grid.h;
  const double a = 32.0 / 3.0 * std::pow(lambda, -0.75) * std::pow(c, 1.5);
  const double b = std::pow(2.0, 4.5) * std::exp(-c) / lambda;
  BoundReport r = make("E12_POINTWISE", mask.name);
  r.lhs = -std::numeric_limits<double>::infinity();
  long checked = 0;
  for (int j = 0; j < mask.grid.ny; ++j) {
    for (int i = 0; i < mask.grid.nx; ++i) {
      if (!mask.inside(i, j) || dist.d(i, j) < 2.0 * h) continue;
      const double bound = a * std::sqrt(dist.d(i, j)) + b;
      r.lhs = std::max(r.lhs, torsion.w.values(i, j) - bound);
      ++checked;
    }
  }
  if (checked == 0) throw NotApplicable("E12_POINTWISE", "no cells at distance >= 2h");
  r.rhs = 0.0;
  r.margin = -r.lhs;
  r.numerical_error = 2.0 * h / inradius(dist).value * torsion.norm_linf;
  r.params = {{"c", c}, {"lambda", lambda}, {"exclusion_distance", 2.0 * h}, {"cells", double(checked)},
              {"h", h}};
  finish(r, k);
  return r;
}

std::vector<BoundReport> audit_green_kernel(const DomainMask& mask, const ScalarField& column, const Cell& source,
                                            const DistanceField& dist, double lambda, double range,
                                            const ConstantTable& k) {
  require_same_grid(mask, column.grid);
  require_same_grid(mask, dist.grid);
  if (!mask.at(source)) throw SourceOutside("Green source is not an inside cell");
  if (!(lambda > 0.0) || !(range > 0.0)) throw BadSpec("eigenvalue and range must be positive");
  const double h = mask.grid.h;
  const double h2 = h * h;
  const double exclusion = 4.0 * h;
  const Eigen::Vector2d x = mask.grid.center(source.i, source.j);
  const double dx = dist.at(source);
  const bool simple = topology_check(mask).simply_connected;
  const double scale = 2.0 * h / inradius(dist).value;

  double sqrt_excess = -std::numeric_limits<double>::infinity();
  double k0_excess = -std::numeric_limits<double>::infinity();
  double total = 0.0, local = 0.0, gmax = 0.0;
  for (int j = 0; j < mask.grid.ny; ++j) {
    for (int i = 0; i < mask.grid.nx; ++i) {
      if (!mask.inside(i, j)) continue;
      const double g = column.values(i, j);
      const double rho = (mask.grid.center(i, j) - x).norm();
      total += g;
      if (rho < range) local += g;
      if (rho < exclusion) continue;
      gmax = std::max(gmax, g);
      sqrt_excess = std::max(sqrt_excess, g - std::sqrt(dx / rho) / std::numbers::pi);
      const double kernel = std::sqrt(2.0) / (2.0 * std::numbers::pi) * bessel_k0(rho * std::sqrt(lambda / 8.0));
      k0_excess = std::max(k0_excess, g - kernel);
    }
  }
  total *= h2;
  local *= h2;
  const std::map<std::string, double> base = {{"source_i", double(source.i)}, {"source_j", double(source.j)},
                                              {"d_source", dx},              {"lambda", lambda},
                                              {"exclusion_radius", exclusion}, {"h", h}};
  std::vector<BoundReport> out;

  const auto pointwise = [&](const std::string& id, double excess) {
    BoundReport r = make(id, mask.name);
    r.params = base;
    if (!std::isfinite(excess)) {
      out.push_back(not_applicable(id, mask.name, "no cells outside the exclusion radius", k));
      return;
    }
    r.lhs = excess;
    r.rhs = 0.0;
    r.margin = -excess;
    r.numerical_error = scale * gmax;
    finish(r, k);
    out.push_back(r);
  };
  if (simple) {
    pointwise("E20_GREEN", sqrt_excess);
  } else {
    out.push_back(not_applicable("E20_GREEN", mask.name, "domain is not simply connected", k));
  }
  pointwise("LEMMA2_GREEN", k0_excess);

  if (simple) {
    BoundReport loc = make("E16_LOCAL_GREEN", mask.name);
    loc.lhs = local;
    loc.rhs = 4.0 / 3.0 * std::sqrt(dx) * std::pow(range, 1.5);
    loc.margin = loc.rhs - loc.lhs;
    loc.numerical_error = scale * local;
    loc.params = base;
    loc.params["range"] = range;
    loc.params["range_exponent"] = 1.5;
    finish(loc, k);
    out.push_back(loc);

    BoundReport tot = make("E17_INTEGRATED_GREEN", mask.name);
    tot.lhs = total;
    tot.rhs = 4.0 / (3.0 * std::pow(std::numbers::pi, 0.75)) * std::sqrt(dx) * std::pow(measure(mask), 0.75);
    tot.margin = tot.rhs - tot.lhs;
    tot.numerical_error = scale * total;
    tot.params = base;
    finish(tot, k);
    out.push_back(tot);
  } else {
    out.push_back(not_applicable("E16_LOCAL_GREEN", mask.name, "domain is not simply connected", k));
    out.push_back(not_applicable("E17_INTEGRATED_GREEN", mask.name, "domain is not simply connected", k));
  }
  return out;
}

BoundReport audit_boundary_growth(const DomainSpec& spec, const Eigen::Vector2d& x0, double radius, double h,
                                  const ConstantTable& k, double scale, double tol) {
  if (!(radius > 0.0) || !(scale > 0.0)) throw BadSpec("radius and scale must be positive");
  const DomainMask u = rasterize(spec, h);
  if (!topology_check(u).simply_connected) throw NotApplicable("BOUNDARY_GROWTH", "domain is not simply connected");

  double nearest = std::numeric_limits<double>::infinity();
  for (int j = 0; j < u.grid.ny; ++j) {
    for (int i = 0; i < u.grid.nx; ++i) {
      if (!u.inside(i, j)) nearest = std::min(nearest, (u.grid.center(i, j) - x0).norm());
    }
  }
  if (nearest > h) throw BadBoundaryPoint("no outside cell centre within h of the boundary point");

  const DomainMask local = restrict_mask(
      u, [&](const Eigen::Vector2d& p) { return (p - x0).norm() < 2.0 * radius; }, u.name + "_local");
  const TorsionSolution w = solve_torsion(local, tol);
  const double c = scale * std::max(1.0, w.norm_linf);
  const double r2 = radius * radius;
  const double pi = std::numbers::pi;
  const double coefficient =
      (1.0 + (pi + pi * pi) / (2.0 * r2)) * 4.0 / 3.0 * std::pow(pi, -0.75) * std::pow(4.0 * pi * r2, 0.75);

  BoundReport r = make("BOUNDARY_GROWTH", u.name);
  r.lhs = -std::numeric_limits<double>::infinity();
  long checked = 0;
  for (int j = 0; j < local.grid.ny; ++j) {
    for (int i = 0; i < local.grid.nx; ++i) {
      if (!local.inside(i, j)) continue;
      const double rho = (local.grid.center(i, j) - x0).norm();
      if (rho >= radius) continue;
      r.lhs = std::max(r.lhs, scale * w.w.values(i, j) - c * coefficient * std::sqrt(rho));
      ++checked;
    }
  }
  r.rhs = 0.0;
  r.margin = -r.lhs;
  r.numerical_error = scale * w.norm_linf * 2.0 * h / inradius(distance_field(local)).value;
  r.params = {{"x0", x0.x()},          {"y0", x0.y()}, {"radius", radius}, {"c", c},
              {"coefficient", coefficient}, {"scale", scale}, {"h", h}, {"cells", double(checked)}};
  finish(r, k);
  return r;
}

BoundReport audit_refined_identity(const DomainMask& mask, const TorsionSolution& torsion,
                                   const SpectralSolution& spectral, const ScalarField& green, const ConstantTable& k) {
  require_same_grid(mask, torsion.w.grid);
  require_same_grid(mask, spectral.u.grid);
  require_same_grid(mask, green.grid);
  require_simply_connected("E38_REFINED", mask);
  const double lambda = spectral.lambda;
  const double h2 = mask.grid.h * mask.grid.h;
  double correction = 0.0;
  for (int j = 0; j < mask.grid.ny; ++j) {
    for (int i = 0; i < mask.grid.nx; ++i) {
      if (!mask.inside(i, j)) continue;
      correction += green.values(i, j) * std::max(0.0, 1.0 - lambda * torsion.w.values(i, j));
    }
  }
  correction *= h2;
  BoundReport r = make("E38_REFINED", mask.name);
  r.lhs = torsion.norm_linf * lambda;
  r.rhs = 1.0 + lambda * correction;
  r.margin = r.lhs - r.rhs;
  // the discrete chain is exact up to solver residuals
  r.numerical_error = 10.0 * r.lhs * std::max({torsion.residual_rel, spectral.residual_rel, 1e-8});
  r.params = {{"correction_scaled", lambda * correction},
              {"floor", k.product_excess},
              {"floor_margin", lambda * correction - k.product_excess},
              {"q_i", double(spectral.argmax_cell.i)},
              {"q_j", double(spectral.argmax_cell.j)},
              {"h", mask.grid.h}};
  r.note = lambda * correction >= k.product_excess ? "correction exceeds the floor (floor is below resolution)"
                                                   : "correction below the floor";
  finish(r, k);
  return r;
}

void sort_reports(std::vector<BoundReport>& reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const BoundReport& a, const BoundReport& b) {
    return std::tie(a.domain, a.check_id) < std::tie(b.domain, b.check_id);
  });
}

}  // namespace torsionlab
