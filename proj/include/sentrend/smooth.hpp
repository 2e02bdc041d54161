#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sentrend/kernel.hpp"
#include "sentrend/loss.hpp"
#include "sentrend/matrix.hpp"
#include "sentrend/svr.hpp"

namespace sentrend {

struct CountrySeries;

struct SmoothDiagnostics {
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double max_kkt_violation = 0.0;
  std::size_t iterations = 0;
  // Objective minimized by the optimizer (negated dual) after every update.
  std::vector<double> objective_trace;
  // Dual variables; u_t / c is a subgradient of rho at the residual t.
  Vector dual;
};

// Kernel expansion Z_t ~ sum_j W_j K_h(x_j, x_t) + W0 over the lagged
// regressors x_j, fitted by
//   min_{W, W0}  W'W/2 + c sum_t rho(Z_t - sum_j W_j K_h(x_j, x_t) - W0).
struct SmoothModel {
  Vector weights;
  double intercept = 0.0;
  KernelSpec kernel;
  LossSpec loss;
  double c = 10.0;
  std::vector<Vector> centers;
  SmoothDiagnostics diagnostics;

  // weights followed by the intercept; this is what gets clustered
  Vector coefficient_vector() const;
  double predict(std::span<const double> query) const;
  Vector fitted() const;
};

struct SmoothOptions {
  double c = 10.0;
  double tol = 1e-10;
  bool record_trace = false;
};

SmoothModel fit_smooth(const LaggedDataset& data, const KernelSpec& kernel, const LossSpec& loss,
                       const SmoothOptions& options = {});

// The regularized objective at an arbitrary coefficient vector.
double smooth_objective(const LaggedDataset& data, const KernelSpec& kernel, const LossSpec& loss,
                        double c, std::span<const double> weights, double intercept);

struct BandwidthSelection {
  double bandwidth = 1.0;
  std::vector<double> grid;
  std::vector<double> scores;  // mean leave-one-out loss per grid point
};

// Exact leave-one-out: for every grid h, refit without sample i and score
// the held-out prediction with the model loss. Lowest mean score wins; ties
// go to the smaller h. Grid must be nonempty and strictly increasing.
BandwidthSelection select_bandwidth(const LaggedDataset& data, const LossSpec& loss,
                                    std::span<const double> grid,
                                    const SmoothOptions& options = {});

// `count` log-spaced bandwidths over [0.01, 10] times the standard deviation
// of the regressor values (1 if that is zero).
std::vector<double> default_bandwidth_grid(const LaggedDataset& data, std::size_t count = 20);

struct CountryFitConfig {
  std::size_t lag = 1;
  KernelKind kernel = KernelKind::Gaussian;  // linear ignores the bandwidth
  LossSpec loss;
  double c = 10.0;
  double tol = 1e-10;
  std::optional<double> bandwidth;  // empty -> select by leave-one-out
  std::vector<double> grid;         // empty -> default_bandwidth_grid
};

struct CountryFit {
  SmoothModel model;
  std::vector<double> bandwidth_grid;
  std::vector<double> bandwidth_scores;  // empty when the bandwidth was fixed
};

// Treats the normalized feature vector (positive weeks, then negative weeks)
// as the sequence Z_1..Z_T and fits the smooth model to it.
CountryFit fit_country(const CountrySeries& series, const CountryFitConfig& config);

}  // namespace sentrend
