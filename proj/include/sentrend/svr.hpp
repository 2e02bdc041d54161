#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sentrend/kernel.hpp"
#include "sentrend/matrix.hpp"

namespace sentrend {

// Autoregressive design built from one series Z_1..Z_T with lag p:
// targets[i] = Z_{p+1+i}, regressors[i] = (Z_{p+i}, ..., Z_{1+i}), most
// recent value first.
struct LaggedDataset {
  Vector targets;
  std::vector<Vector> regressors;
  std::size_t lag = 1;
  std::size_t series_length = 0;

  std::size_t size() const noexcept { return targets.size(); }
};

// Throws InsufficientData if series.size() < lag + 2, ContractViolation if
// lag == 0.
LaggedDataset build_lagged(std::span<const double> series, std::size_t lag);

struct SvrDiagnostics {
  double dual_objective = 0.0;
  double primal_objective = 0.0;
  double max_kkt_violation = 0.0;
  std::size_t iterations = 0;
  // dual objective after each pair update, when requested
  std::vector<double> dual_trace;
};

// Solution of the eps-insensitive support vector regression dual.
struct SvrFit {
  Vector alpha;       // multipliers of the upper tube constraints
  Vector alpha_star;  // multipliers of the lower tube constraints
  double intercept = 0.0;
  std::vector<std::size_t> support_set;  // t with 0 < |alpha_t - alpha*_t| < c
  KernelSpec kernel;
  double c = 10.0;
  double eps = 0.01;
  SvrDiagnostics diagnostics;

  // alpha - alpha*, the kernel expansion coefficients
  Vector net() const;
};

struct SvrOptions {
  double c = 10.0;
  double eps = 0.01;
  double tol = 1e-8;
  bool record_trace = false;
};

// Maximizes
//   J_D = -1/2 sum_tk (a_t - a*_t)(a_k - a*_k) K(x_t, x_k)
//         - eps sum_t (a_t + a*_t) + sum_t Z_t (a_t - a*_t)
// subject to sum_t (a_t - a*_t) = 0 and 0 <= a, a* <= c, then recovers the
// intercept from the KKT conditions.
SvrFit solve_dual(const LaggedDataset& data, const KernelSpec& kernel, const SvrOptions& options);

// Intercept from the support vectors:
//   W0 = mean over S of (Z_t - f(x_t) - sign(beta_t) eps)
// where f is the kernel expansion without intercept. With S empty, the
// target mean clamped into the interval of intercepts consistent with the
// bound and zero multipliers.
double recover_intercept(std::span<const double> net, const LaggedDataset& data,
                         const KernelSpec& kernel, double c, double eps);

// sum_k (alpha_k - alpha*_k) K(x_k, query) + W0
double predict(const SvrFit& fit, const LaggedDataset& data, std::span<const double> query);

// For the linear kernel: W = sum_t (alpha_t - alpha*_t) x_t.
Vector explicit_weights(const SvrFit& fit, const LaggedDataset& data);

}  // namespace sentrend
