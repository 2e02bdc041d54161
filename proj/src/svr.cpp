#include "sentrend/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sentrend/error.hpp"
#include "sentrend/pairwise_qp.hpp"

namespace sentrend {

LaggedDataset build_lagged(std::span<const double> series, std::size_t lag) {
  if (lag == 0) throw ContractViolation("lag must be at least 1");
  if (series.size() < lag + 2)
    throw InsufficientData("series of length " + std::to_string(series.size()) +
                           " is too short for lag " + std::to_string(lag));
  LaggedDataset out;
  out.lag = lag;
  out.series_length = series.size();
  for (std::size_t i = 0; i + lag < series.size(); ++i) {
    out.targets.push_back(series[lag + i]);
    Vector reg(lag);
    for (std::size_t j = 0; j < lag; ++j) reg[j] = series[lag + i - 1 - j];
    out.regressors.push_back(std::move(reg));
  }
  return out;
}

Vector SvrFit::net() const {
  Vector b(alpha.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = alpha[i] - alpha_star[i];
  return b;
}

namespace {

bool is_free(double beta, double c) {
  const double slack = 1e-12 * std::max(1.0, c);
  return std::abs(beta) > slack && std::abs(beta) < c - slack;
}

Vector expansion_at_samples(const Matrix& gram, std::span<const double> net) {
  return gram.multiply(net);
}

double intercept_from(const Matrix& gram, std::span<const double> net, const LaggedDataset& data,
                      double c, double eps) {
  const Vector f = expansion_at_samples(gram, net);
  const std::size_t n = data.size();

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (!is_free(net[t], c)) continue;
    const double sign = net[t] > 0.0 ? 1.0 : -1.0;
    sum += data.targets[t] - f[t] - sign * eps;
    ++count;
  }
  if (count > 0) return sum / static_cast<double>(count);

  // No free multiplier. Each remaining one bounds the intercept:
  //   beta = 0   -> |Z - f - W0| <= eps
  //   beta = c   -> Z - f - W0 >= eps
  //   beta = -c  -> Z - f - W0 <= -eps
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  const double slack = 1e-12 * std::max(1.0, c);
  for (std::size_t t = 0; t < n; ++t) {
    const double r = data.targets[t] - f[t];
    if (net[t] > slack) {
      hi = std::min(hi, r - eps);
    } else if (net[t] < -slack) {
      lo = std::max(lo, r + eps);
    } else {
      lo = std::max(lo, r - eps);
      hi = std::min(hi, r + eps);
    }
  }
  const double mean =
      std::accumulate(data.targets.begin(), data.targets.end(), 0.0) / static_cast<double>(n);
  if (lo > hi) return 0.5 * (lo + hi);  // only from rounding at tol
  return std::clamp(mean, lo, hi);
}

}  // namespace

double recover_intercept(std::span<const double> net, const LaggedDataset& data,
                         const KernelSpec& kernel, double c, double eps) {
  if (net.size() != data.size()) throw ContractViolation("recover_intercept: size mismatch");
  return intercept_from(gram_matrix(kernel, data.regressors), net, data, c, eps);
}

SvrFit solve_dual(const LaggedDataset& data, const KernelSpec& kernel, const SvrOptions& options) {
  kernel.validate();
  if (!(options.c > 0.0)) throw ContractViolation("c must be positive");
  if (!(options.eps >= 0.0)) throw ContractViolation("epsilon must be non-negative");
  if (data.size() < 2) throw InsufficientData("need at least two lagged samples");
  for (double z : data.targets)
    if (!std::isfinite(z)) throw ContractViolation("targets must be finite");

  PairwiseQp qp;
  qp.q = gram_matrix(kernel, data.regressors);
  qp.b = data.targets;
  qp.penalty.abs_weight = options.eps;
  qp.lower = -options.c;
  qp.upper = options.c;

  PairwiseQpOptions qp_options;
  qp_options.tol = options.tol;
  qp_options.record_trace = options.record_trace;
  const PairwiseQpResult sol = solve_pairwise_qp(qp, qp_options);

  SvrFit fit;
  fit.kernel = kernel;
  fit.c = options.c;
  fit.eps = options.eps;
  const std::size_t n = data.size();
  fit.alpha.resize(n);
  fit.alpha_star.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    fit.alpha[t] = std::max(sol.x[t], 0.0);
    fit.alpha_star[t] = std::max(-sol.x[t], 0.0);
    if (is_free(sol.x[t], options.c)) fit.support_set.push_back(t);
  }
  fit.intercept = intercept_from(qp.q, sol.x, data, options.c, options.eps);

  auto& diag = fit.diagnostics;
  diag.dual_objective = -sol.objective;
  diag.max_kkt_violation = sol.max_violation;
  diag.iterations = sol.updates;
  for (double v : sol.trace) diag.dual_trace.push_back(-v);

  const Vector f = qp.q.multiply(sol.x);
  double primal = 0.5 * dot(sol.x, f);
  for (std::size_t t = 0; t < n; ++t) {
    const double r = data.targets[t] - f[t] - fit.intercept;
    primal += options.c * std::max(0.0, std::abs(r) - options.eps);
  }
  diag.primal_objective = primal;
  return fit;
}

double predict(const SvrFit& fit, const LaggedDataset& data, std::span<const double> query) {
  if (query.size() != data.lag) throw ContractViolation("query dimension must equal the lag");
  double out = fit.intercept;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const double beta = fit.alpha[k] - fit.alpha_star[k];
    if (beta != 0.0) out += beta * kernel_value(fit.kernel, data.regressors[k], query);
  }
  return out;
}

Vector explicit_weights(const SvrFit& fit, const LaggedDataset& data) {
  Vector w(data.lag, 0.0);
  for (std::size_t k = 0; k < data.size(); ++k) {
    const double beta = fit.alpha[k] - fit.alpha_star[k];
    for (std::size_t j = 0; j < data.lag; ++j) w[j] += beta * data.regressors[k][j];
  }
  return w;
}

}  // namespace sentrend
