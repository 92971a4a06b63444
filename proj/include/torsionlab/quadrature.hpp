#pragma once

#include "torsionlab/errors.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace torsionlab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod abscissae on [-1, 1], positive half.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gauss_kronrod_15(F& f, double a, double b, double& value, double& error) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(mid);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int k = 0; k < 7; ++k) {
    const double dx = half * kKronrodNodes[k];
    const double pair = f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[k] * pair;
    if (k % 2 == 1) gauss += kGaussWeights[k / 2] * pair;
  }
  value = kronrod * half;
  error = std::abs((kronrod - gauss) * half);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (G7/K15) on a finite interval, bisecting the
/// interval with the largest error estimate until the total estimate drops
/// below max(abs_tol, rel_tol * |value|).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
                           int max_intervals = 2000) {
  struct Piece {
    double a, b, value, error;
  };
  std::vector<Piece> pieces;
  Piece first{a, b, 0.0, 0.0};
  detail::gauss_kronrod_15(f, a, b, first.value, first.error);
  pieces.push_back(first);
  double value = first.value, error = first.error;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (static_cast<int>(pieces.size()) >= max_intervals) {
      throw NoConvergence("adaptive quadrature hit the interval cap", static_cast<long>(pieces.size()),
                          error);
    }
    std::size_t worst = 0;
    for (std::size_t k = 1; k < pieces.size(); ++k) {
      if (pieces[k].error > pieces[worst].error) worst = k;
    }
    const Piece p = pieces[worst];
    const double mid = 0.5 * (p.a + p.b);
    Piece left{p.a, mid, 0.0, 0.0}, right{mid, p.b, 0.0, 0.0};
    detail::gauss_kronrod_15(f, left.a, left.b, left.value, left.error);
    detail::gauss_kronrod_15(f, right.a, right.b, right.value, right.error);
    pieces[worst] = left;
    pieces.push_back(right);
    value = 0.0;
    error = 0.0;
    for (const Piece& q : pieces) {
      value += q.value;
      error += q.error;
    }
  }
  return {value, error, static_cast<int>(pieces.size())};
}

}  // namespace torsionlab
