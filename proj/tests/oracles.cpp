#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

namespace {

// Project v onto {x in [0,c]^2n : sum(x[:n]) - sum(x[n:]) = 0}.
std::vector<double> project(const std::vector<double>& v, std::size_t n, double c) {
  auto at = [&](double lambda, std::vector<double>* out) {
    double s = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i) {
      const double a = i < n ? 1.0 : -1.0;
      const double x = std::clamp(v[i] - lambda * a, 0.0, c);
      if (out) (*out)[i] = x;
      s += a * x;
    }
    return s;
  };
  // s(lambda) is nonincreasing
  double lo = -1.0, hi = 1.0;
  while (at(lo, nullptr) < 0.0) lo *= 2.0;
  while (at(hi, nullptr) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (at(mid, nullptr) > 0.0) lo = mid;
    else hi = mid;
  }
  std::vector<double> out(2 * n);
  at(0.5 * (lo + hi), &out);
  return out;
}

}  // namespace

double svr_dual_value(const sentrend::Matrix& gram, const std::vector<double>& y, double eps,
                      const std::vector<double>& alpha, const std::vector<double>& alpha_star) {
  const std::size_t n = y.size();
  double quad = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double bi = alpha[i] - alpha_star[i];
    for (std::size_t j = 0; j < n; ++j) quad += bi * (alpha[j] - alpha_star[j]) * gram(i, j);
    lin += -eps * (alpha[i] + alpha_star[i]) + y[i] * bi;
  }
  return -0.5 * quad + lin;
}

QpSolution svr_dual_projected_gradient(const sentrend::Matrix& gram,
                                       const std::vector<double>& y, double c, double eps,
                                       double tol) {
  const std::size_t n = y.size();
  // minimize F(x) = -J_D, x = (alpha, alpha*)
  auto grad = [&](const std::vector<double>& x) {
    std::vector<double> g(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      double kb = 0.0;
      for (std::size_t j = 0; j < n; ++j) kb += gram(i, j) * (x[j] - x[n + j]);
      g[i] = kb + eps - y[i];
      g[n + i] = -kb + eps + y[i];
    }
    return g;
  };
  auto value = [&](const std::vector<double>& x) {
    return -svr_dual_value(gram, y, eps, {x.begin(), x.begin() + n}, {x.begin() + n, x.end()});
  };

  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += gram(i, i);
  const double lipschitz = 2.0 * std::max(trace, 1e-12);
  const double step = 1.0 / lipschitz;

  std::vector<double> x(2 * n, 0.0), x_prev = x, z = x;
  double t = 1.0;
  double f_prev = value(x);
  QpSolution sol;
  const std::size_t cap = 20'000'000;
  for (std::size_t k = 0; k < cap; ++k) {
    const auto g = grad(z);
    std::vector<double> v(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) v[i] = z[i] - step * g[i];
    x_prev = x;
    x = project(v, n, c);

    // gradient mapping at the plain iterate, for the stopping rule
    if (k % 10 == 0) {
      const auto gx = grad(x);
      std::vector<double> w(2 * n);
      for (std::size_t i = 0; i < 2 * n; ++i) w[i] = x[i] - step * gx[i];
      const auto px = project(w, n, c);
      double norm = 0.0;
      for (std::size_t i = 0; i < 2 * n; ++i) norm = std::max(norm, std::abs(px[i] - x[i]));
      if (norm * lipschitz <= tol) {
        sol.iterations = k;
        break;
      }
    }

    const double f = value(x);
    if (f > f_prev) {  // adaptive restart
      t = 1.0;
      z = x;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      for (std::size_t i = 0; i < 2 * n; ++i) z[i] = x[i] + ((t - 1.0) / t_next) * (x[i] - x_prev[i]);
      t = t_next;
    }
    f_prev = f;
    sol.iterations = k;
  }
  sol.alpha.assign(x.begin(), x.begin() + n);
  sol.alpha_star.assign(x.begin() + n, x.end());
  sol.dual_objective = svr_dual_value(gram, y, eps, sol.alpha, sol.alpha_star);
  return sol;
}

std::vector<double> ridge_kernel_least_squares(const sentrend::Matrix& design,
                                               const std::vector<double>& y, double c) {
  const std::size_t n = y.size();
  const std::size_t m = design.cols();
  Eigen::MatrixXd g(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) g(i, j) = design(i, j);
  Eigen::VectorXd yy(n);
  for (std::size_t i = 0; i < n; ++i) yy(i) = y[i];
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  // gradient of |W|^2/2 + c|y - G W - W0 1|^2 set to zero
  Eigen::MatrixXd a(m + 1, m + 1);
  a.topLeftCorner(m, m) = Eigen::MatrixXd::Identity(m, m) + 2.0 * c * g.transpose() * g;
  a.topRightCorner(m, 1) = 2.0 * c * g.transpose() * ones;
  a.bottomLeftCorner(1, m) = 2.0 * c * ones.transpose() * g;
  a(m, m) = 2.0 * c * static_cast<double>(n);
  Eigen::VectorXd rhs(m + 1);
  rhs.head(m) = 2.0 * c * g.transpose() * yy;
  rhs(m) = 2.0 * c * yy.sum();
  const Eigen::VectorXd sol = a.fullPivLu().solve(rhs);
  return {sol.data(), sol.data() + sol.size()};
}

double min_eigenvalue(const sentrend::Matrix& m) {
  Eigen::MatrixXd a(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  return es.eigenvalues().minCoeff();
}

std::vector<BruteMerge> brute_force_agglomerate(const sentrend::Matrix& dist, int linkage) {
  std::vector<std::set<std::size_t>> clusters;
  for (std::size_t i = 0; i < dist.rows(); ++i) clusters.push_back({i});
  std::vector<BruteMerge> merges;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_key{0, 0};
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double agg = linkage == 1 ? std::numeric_limits<double>::infinity() : 0.0;
        for (auto p : clusters[i])
          for (auto q : clusters[j]) {
            const double d = dist(p, q);
            if (linkage == 0) agg += d;
            else if (linkage == 1) agg = std::min(agg, d);
            else agg = std::max(agg, d);
          }
        if (linkage == 0) agg /= static_cast<double>(clusters[i].size() * clusters[j].size());
        const auto mi = *clusters[i].begin();
        const auto mj = *clusters[j].begin();
        const std::pair key{std::min(mi, mj), std::max(mi, mj)};
        if (agg < best || (agg == best && key < best_key)) {
          best = agg;
          best_key = key;
          bi = i;
          bj = j;
        }
      }
    merges.push_back({clusters[bi], clusters[bj], best});
    clusters[bi].insert(clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return merges;
}

}  // namespace oracle
