#pragma once

#include <span>
#include <string>
#include <string_view>

namespace sentrend {

enum class LossKind { LeastSquares, Huber, Quantile, EpsInsensitive };

// Residual loss rho(e) applied to e = observed - predicted.
//
//   least squares    e^2
//   huber            e^2/2 for |e| <= k, k|e| - k^2/2 otherwise
//   quantile         e (q - 1[e < 0]),  0 <= q <= 1
//   eps-insensitive  max(0, |e| - eps)
struct LossSpec {
  LossKind kind = LossKind::LeastSquares;
  double huber_k = 1.345;
  double quantile_q = 0.5;
  double eps = 0.01;

  static LossSpec least_squares() { return {}; }
  static LossSpec huber(double k) { return {LossKind::Huber, k, 0.5, 0.0}; }
  static LossSpec quantile(double q) { return {LossKind::Quantile, 1.345, q, 0.0}; }
  static LossSpec eps_insensitive(double eps) {
    return {LossKind::EpsInsensitive, 1.345, 0.5, eps};
  }

  // Throws ContractViolation if a parameter is out of range.
  void validate() const;
};

double loss_value(const LossSpec& spec, double e);

// An element of the subdifferential of rho at e. At a kink, 0 if 0 is a
// subgradient there (quantile at e = 0, eps-insensitive at 0 or +-eps).
double loss_subgradient(const LossSpec& spec, double e);

// Left and right derivatives of rho at e; equal wherever rho is
// differentiable.
struct OneSidedSlopes {
  double left;
  double right;
};
OneSidedSlopes loss_slopes(const LossSpec& spec, double e);

// The residuals e with s in the subdifferential of rho at e, as a closed
// interval (ends may be infinite). Slopes within `slack` of a kink slope
// count as that slope.
struct ResidualRange {
  double lo;
  double hi;
};
ResidualRange residuals_with_slope(const LossSpec& spec, double s, double slack = 1e-9);

// argmin over b of sum_t rho(s_t - b), computed exactly by walking the
// piecewise-quadratic derivative. When the minimizer set is an interval the
// midpoint is returned; when it is unbounded on one side the finite end is
// returned. Requires s nonempty.
double minimize_offset(const LossSpec& spec, std::span<const double> s);

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view text);  // "ls", "huber", "quantile", "eps"

}  // namespace sentrend
