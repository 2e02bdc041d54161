#include "sentrend/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sentrend/error.hpp"
#include "sentrend/ingest.hpp"
#include "sentrend/pairwise_qp.hpp"

namespace sentrend {

namespace {

// Conjugate of c * rho expressed as a separable penalty plus box on the
// dual variables u_t.
PairwiseQp dual_problem(const Matrix& design, const Vector& targets, const LossSpec& loss,
                        double c) {
  PairwiseQp qp;
  qp.q = design.gram();  // design is symmetric, so this is design * design'
  qp.b = targets;
  switch (loss.kind) {
    case LossKind::LeastSquares:
      qp.penalty.quad_weight = 1.0 / (2.0 * c);
      break;
    case LossKind::Huber:
      qp.penalty.quad_weight = 1.0 / c;
      qp.lower = -c * loss.huber_k;
      qp.upper = c * loss.huber_k;
      break;
    case LossKind::Quantile:
      qp.lower = c * (loss.quantile_q - 1.0);
      qp.upper = c * loss.quantile_q;
      break;
    case LossKind::EpsInsensitive:
      qp.penalty.abs_weight = loss.eps;
      qp.lower = -c;
      qp.upper = c;
      break;
  }
  return qp;
}

double positive_zero(double v) { return v == 0.0 ? 0.0 : v; }

// Intercept consistent with the dual: u_t / c must be a subgradient of rho
// at residual t. Residuals pinned to a single value are averaged, as for the
// SVR intercept; otherwise the 1-D minimizer over the intercept is clamped
// into the range every residual allows.
double recover_offset(const Matrix& design, const Vector& weights, const Vector& dual,
                      const Vector& targets, const LossSpec& loss, double c) {
  const Vector fit = design.multiply(weights);
  const std::size_t n = targets.size();
  Vector partial(n);
  for (std::size_t t = 0; t < n; ++t) partial[t] = targets[t] - fit[t];

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double pinned = 0.0;
  std::size_t pinned_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const ResidualRange r = residuals_with_slope(loss, dual[t] / c);
    if (r.lo == r.hi) {
      pinned += partial[t] - r.lo;
      ++pinned_count;
      continue;
    }
    lo = std::max(lo, partial[t] - r.hi);
    hi = std::min(hi, partial[t] - r.lo);
  }
  if (pinned_count > 0) return pinned / static_cast<double>(pinned_count);
  const double best = minimize_offset(loss, partial);
  if (lo > hi) return 0.5 * (lo + hi);  // only from rounding at tol
  return std::clamp(best, lo, hi);
}

}  // namespace

Vector SmoothModel::coefficient_vector() const {
  Vector out = weights;
  out.push_back(intercept);
  return out;
}

double SmoothModel::predict(std::span<const double> query) const {
  double out = intercept;
  for (std::size_t j = 0; j < centers.size(); ++j)
    out += weights[j] * kernel_value(kernel, centers[j], query);
  return out;
}

Vector SmoothModel::fitted() const {
  Vector out;
  out.reserve(centers.size());
  for (const auto& x : centers) out.push_back(predict(x));
  return out;
}

double smooth_objective(const LaggedDataset& data, const KernelSpec& kernel, const LossSpec& loss,
                        double c, std::span<const double> weights, double intercept) {
  const Matrix design = gram_matrix(kernel, data.regressors);
  const Vector fit = design.multiply(weights);
  double f = 0.5 * dot(weights, weights);
  for (std::size_t t = 0; t < data.size(); ++t)
    f += c * loss_value(loss, data.targets[t] - fit[t] - intercept);
  return f;
}

SmoothModel fit_smooth(const LaggedDataset& data, const KernelSpec& kernel, const LossSpec& loss,
                       const SmoothOptions& options) {
  kernel.validate();
  loss.validate();
  if (!(options.c > 0.0) || !std::isfinite(options.c))
    throw ContractViolation("c must be positive and finite");
  if (data.size() < 2) throw InsufficientData("smooth model needs at least two lagged samples");

  const Matrix design = gram_matrix(kernel, data.regressors);
  for (double v : design.data())
    if (!std::isfinite(v)) throw ContractViolation("kernel matrix has non-finite entries");

  const PairwiseQp qp = dual_problem(design, data.targets, loss, options.c);
  PairwiseQpOptions qp_options;
  qp_options.tol = options.tol;
  qp_options.record_trace = options.record_trace;
  const PairwiseQpResult sol = solve_pairwise_qp(qp, qp_options);

  SmoothModel model;
  model.kernel = kernel;
  model.loss = loss;
  model.c = options.c;
  model.centers = data.regressors;
  model.weights = design.multiply(sol.x);
  for (double& w : model.weights) w = positive_zero(w);

  model.intercept = positive_zero(recover_offset(design, model.weights, sol.x, data.targets, loss, options.c));

  auto& diag = model.diagnostics;
  diag.dual_objective = -sol.objective;
  diag.max_kkt_violation = sol.max_violation;
  diag.iterations = sol.updates;
  diag.objective_trace = sol.trace;
  diag.dual = sol.x;
  diag.primal_objective =
      smooth_objective(data, kernel, loss, options.c, model.weights, model.intercept);
  return model;
}

std::vector<double> default_bandwidth_grid(const LaggedDataset& data, std::size_t count) {
  if (count == 0) throw ContractViolation("bandwidth grid needs at least one point");
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t m = 0;
  for (const auto& x : data.regressors)
    for (double v : x) {
      sum += v;
      sum_sq += v * v;
      ++m;
    }
  double scale = 1.0;
  if (m > 0) {
    const double mean = sum / static_cast<double>(m);
    const double var = std::max(0.0, sum_sq / static_cast<double>(m) - mean * mean);
    if (var > 0.0) scale = std::sqrt(var);
  }
  std::vector<double> grid(count);
  const double lo = std::log(0.01);
  const double hi = std::log(10.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    grid[i] = scale * std::exp(lo + f * (hi - lo));
  }
  return grid;
}

BandwidthSelection select_bandwidth(const LaggedDataset& data, const LossSpec& loss,
                                    std::span<const double> grid, const SmoothOptions& options) {
  if (grid.empty()) throw ContractViolation("bandwidth grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw ContractViolation("bandwidths must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw ContractViolation("bandwidth grid must be strictly increasing");
  }
  const std::size_t n = data.size();
  if (n < 3) throw InsufficientData("leave-one-out selection needs at least three samples");

  BandwidthSelection out;
  out.grid.assign(grid.begin(), grid.end());
  for (double h : grid) {
    const KernelSpec kernel = KernelSpec::gaussian(h);
    double total = 0.0;
    for (std::size_t held = 0; held < n; ++held) {
      LaggedDataset train;
      train.lag = data.lag;
      train.series_length = data.series_length;
      for (std::size_t t = 0; t < n; ++t) {
        if (t == held) continue;
        train.targets.push_back(data.targets[t]);
        train.regressors.push_back(data.regressors[t]);
      }
      try {
        const SmoothModel m = fit_smooth(train, kernel, loss, options);
        total += loss_value(loss, data.targets[held] - m.predict(data.regressors[held]));
      } catch (const ConvergenceError&) {
        total = std::numeric_limits<double>::infinity();
        break;
      }
    }
    out.scores.push_back(total / static_cast<double>(n));
  }

  std::size_t best = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(out.scores[i])) continue;
    if (best == grid.size() || out.scores[i] < out.scores[best]) best = i;
  }
  if (best == grid.size()) throw SelectionError("no bandwidth produced a finite score");
  out.bandwidth = grid[best];
  return out;
}

CountryFit fit_country(const CountrySeries& series, const CountryFitConfig& config) {
  if (series.features.empty())
    throw ContractViolation("country " + series.country + " has not been normalized");
  const LaggedDataset data = build_lagged(series.features, config.lag);
  SmoothOptions options;
  options.c = config.c;
  options.tol = config.tol;

  CountryFit out;
  if (config.kernel == KernelKind::Linear) {
    out.model = fit_smooth(data, KernelSpec::linear(), config.loss, options);
    return out;
  }
  double h;
  if (config.bandwidth) {
    h = *config.bandwidth;
  } else {
    const std::vector<double> grid =
        config.grid.empty() ? default_bandwidth_grid(data) : config.grid;
    const BandwidthSelection sel = select_bandwidth(data, config.loss, grid, options);
    h = sel.bandwidth;
    out.bandwidth_grid = sel.grid;
    out.bandwidth_scores = sel.scores;
  }
  out.model = fit_smooth(data, KernelSpec::gaussian(h), config.loss, options);
  return out;
}

}  // namespace sentrend
