#include "sentrend/pairwise_qp.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "sentrend/error.hpp"

namespace sentrend {

double PairwiseQp::objective(const Vector& x) const {
  const Vector qx = q.multiply(x);
  double f = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    f += 0.5 * x[i] * qx[i] - b[i] * x[i] + penalty.value(x[i]);
  return f;
}

Vector PairwiseQp::smooth_gradient(const Vector& x) const {
  Vector g = q.multiply(x);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= b[i];
  return g;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Directional derivatives of the full objective for raising / lowering x_i.
struct Slopes {
  double up;    // d f / d x_i from the right
  double down;  // d f / d(-x_i) from the left
};

Slopes coordinate_slopes(const PairwiseQp& p, double grad, double x) {
  const double smooth = grad + p.penalty.quad_weight * x;
  const double a = p.penalty.abs_weight;
  return {smooth + (x >= 0.0 ? a : -a), -smooth + (x <= 0.0 ? a : -a)};
}

struct PairChoice {
  std::size_t i = 0;
  std::size_t j = 0;
  double violation = 0.0;
};

PairChoice most_violating_pair(const PairwiseQp& p, const Vector& x, const Vector& grad) {
  const std::size_t n = x.size();
  std::vector<Slopes> slopes(n);
  for (std::size_t k = 0; k < n; ++k) slopes[k] = coordinate_slopes(p, grad[k], x[k]);

  PairChoice best;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] < p.upper)) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !(x[j] > p.lower)) continue;
      const double v = -(slopes[i].up + slopes[j].down);
      if (v > best.violation) best = {i, j, v};
    }
  }
  return best;
}

// Exact minimizer of
//   h(d) = a d^2/2 + g d + phi(xi + d) + phi(xj - d) - phi(xi) - phi(xj)
// over d in [lo, hi]. h is convex and piecewise quadratic with kinks where
// xi + d or xj - d crosses zero, so the minimizer is the first point where
// the right derivative turns non-negative. Working with derivatives rather
// than values keeps steps whose gain is below rounding of h.
double pair_step(const SeparablePenalty& phi, double a, double g, double xi, double xj,
                 double lo, double hi) {
  std::vector<double> knots{lo, hi};
  if (phi.abs_weight > 0.0) {
    knots.push_back(-xi);
    knots.push_back(xj);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::remove_if(knots.begin(), knots.end(),
                             [&](double d) { return d < lo || d > hi; }),
              knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  if (knots.size() == 1) return knots.front();

  const double curvature = a + 2.0 * phi.quad_weight;
  for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
    const double left = knots[s];
    const double right = knots[s + 1];
    double probe;
    if (std::isfinite(left) && std::isfinite(right)) probe = 0.5 * (left + right);
    else if (std::isfinite(left)) probe = left + 1.0;
    else if (std::isfinite(right)) probe = right - 1.0;
    else probe = 0.0;
    const double si = (xi + probe) >= 0.0 ? 1.0 : -1.0;
    const double sj = (xj - probe) >= 0.0 ? 1.0 : -1.0;
    // h'(d) on this piece = curvature * d + slope0
    const double slope0 = g + phi.quad_weight * (xi - xj) + phi.abs_weight * (si - sj);
    const double at_left = std::isfinite(left) ? curvature * left + slope0
                           : curvature > 0.0   ? -kInf
                                               : slope0;
    if (at_left >= 0.0) {
      if (!std::isfinite(left)) throw ContractViolation("pairwise QP: objective is unbounded below");
      return left;
    }
    if (curvature > 0.0) {
      const double d = -slope0 / curvature;
      if (d < right) return d;
    }
  }
  if (!std::isfinite(knots.back())) throw ContractViolation("pairwise QP: objective is unbounded below");
  return knots.back();
}

// phi(x + d) - phi(x) without forming phi at either point
double penalty_change(const SeparablePenalty& phi, double x, double d) {
  return phi.abs_weight * (std::abs(x + d) - std::abs(x)) + 0.5 * phi.quad_weight * d * (2.0 * x + d);
}

}  // namespace

double max_kkt_violation(const PairwiseQp& problem, const Vector& x) {
  return most_violating_pair(problem, x, problem.smooth_gradient(x)).violation;
}

PairwiseQpResult solve_pairwise_qp(const PairwiseQp& p, const PairwiseQpOptions& options) {
  const std::size_t n = p.b.size();
  if (p.q.rows() != n || p.q.cols() != n)
    throw ContractViolation("pairwise QP: Q must be n x n");
  for (double v : p.q.data())
    if (!std::isfinite(v)) throw ContractViolation("pairwise QP: Q has non-finite entries");
  for (double v : p.b)
    if (!std::isfinite(v)) throw ContractViolation("pairwise QP: b has non-finite entries");
  if (!(p.lower <= 0.0 && 0.0 <= p.upper))
    throw ContractViolation("pairwise QP: bounds must contain 0");
  if (!(options.tol > 0.0)) throw ContractViolation("pairwise QP: tol must be positive");

  const std::size_t cap = options.max_updates ? options.max_updates : 10000 * std::max<std::size_t>(n, 1);

  PairwiseQpResult result;
  result.x.assign(n, 0.0);
  Vector& x = result.x;
  if (options.record_trace) result.trace.push_back(p.objective(x));

  while (true) {
    const Vector grad = p.smooth_gradient(x);
    const PairChoice pick = most_violating_pair(p, x, grad);
    result.max_violation = pick.violation;
    if (pick.violation <= options.tol) break;
    if (result.updates >= cap) {
      throw ConvergenceError(
          fmt::format("pairwise QP: {} updates without reaching tol {:g} (violation {:g})",
                      result.updates, options.tol, pick.violation),
          x, pick.violation);
    }

    const std::size_t i = pick.i;
    const std::size_t j = pick.j;
    const double a = std::max(0.0, p.q(i, i) + p.q(j, j) - 2.0 * p.q(i, j));
    const double g = grad[i] - grad[j];
    const double lo = std::max(p.lower - x[i], x[j] - p.upper);
    const double hi = std::min(p.upper - x[i], x[j] - p.lower);
    const double d = pair_step(p.penalty, a, g, x[i], x[j], lo, hi);

    ++result.updates;
    if (d == 0.0) {
      // Violation is above tol but the exact line minimum is at 0: the
      // remaining violation is rounding noise on a flat direction.
      break;
    }
    // a step onto a kink lands exactly on zero; rounding residue there
    // would otherwise read as a violation of size 2 * abs_weight
    const bool i_to_zero = d == -x[i];
    const bool j_to_zero = d == x[j];
    const double xi_new = i_to_zero ? 0.0 : std::clamp(x[i] + d, p.lower, p.upper);
    const double moved = xi_new - x[i];
    const double xj_new = j_to_zero ? 0.0 : std::clamp(x[j] - moved, p.lower, p.upper);
    if (options.record_trace) {
      const double di = xi_new - x[i];
      const double dj = xj_new - x[j];
      const double change = grad[i] * di + grad[j] * dj +
                            0.5 * (p.q(i, i) * di * di + 2.0 * p.q(i, j) * di * dj + p.q(j, j) * dj * dj) +
                            penalty_change(p.penalty, x[i], di) + penalty_change(p.penalty, x[j], dj);
      result.trace.push_back(result.trace.back() + change);
    }
    x[i] = xi_new;
    x[j] = xj_new;
  }

  result.objective = p.objective(x);
  return result;
}

}  // namespace sentrend
