#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "sentrend/matrix.hpp"

namespace sentrend {

// Separable convex penalty phi(x) = abs_weight * |x| + quad_weight * x^2 / 2.
struct SeparablePenalty {
  double abs_weight = 0.0;
  double quad_weight = 0.0;

  double value(double x) const {
    return abs_weight * (x < 0 ? -x : x) + 0.5 * quad_weight * x * x;
  }
};

// minimize   x'Qx/2 - b'x + sum_i phi(x_i)
// subject to sum_i x_i = 0,  lower <= x_i <= upper
//
// Q must be symmetric positive semidefinite and lower <= 0 <= upper so that
// x = 0 is feasible. Bounds may be infinite when quad_weight > 0.
struct PairwiseQp {
  Matrix q;
  Vector b;
  SeparablePenalty penalty;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  double objective(const Vector& x) const;
  // Gradient of the smooth part, Qx - b.
  Vector smooth_gradient(const Vector& x) const;
};

struct PairwiseQpOptions {
  double tol = 1e-8;
  // 0 means 10,000 sweeps of n pair updates each.
  std::size_t max_updates = 0;
  bool record_trace = false;
};

struct PairwiseQpResult {
  Vector x;
  double objective = 0.0;
  double max_violation = 0.0;
  std::size_t updates = 0;
  // objective after every accepted update (only if record_trace), advanced
  // by the exact change of each two-coordinate update so that evaluation
  // rounding of the full sum does not show up as spurious increases
  std::vector<double> trace;
};

// Largest first-order KKT violation over all feasible pair directions
// (x_i up, x_j down). Zero exactly at an optimum.
double max_kkt_violation(const PairwiseQp& problem, const Vector& x);

// SMO-style solver: repeatedly picks the maximally violating pair and
// minimizes the objective exactly along x_i += d, x_j -= d. Each step is a
// 1-D convex piecewise quadratic with kinks where x_i or x_j crosses 0.
//
// Throws ContractViolation on non-finite input and ConvergenceError (with
// the last iterate) if the update cap is hit before tol.
PairwiseQpResult solve_pairwise_qp(const PairwiseQp& problem,
                                   const PairwiseQpOptions& options = {});

}  // namespace sentrend
