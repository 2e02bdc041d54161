#include "sentrend/kernel.hpp"

#include <cmath>
#include <string>

#include "sentrend/error.hpp"

namespace sentrend {

void KernelSpec::validate() const {
  if (kind == KernelKind::Gaussian && !(bandwidth > 0.0 && std::isfinite(bandwidth)))
    throw ContractViolation("gaussian bandwidth must be positive and finite");
}

double kernel_value(const KernelSpec& spec, std::span<const double> u,
                    std::span<const double> v) {
  if (u.size() != v.size() || u.empty())
    throw ContractViolation("kernel arguments must have equal, nonzero length");
  switch (spec.kind) {
    case KernelKind::Linear:
      return dot(u, v);
    case KernelKind::Gaussian: {
      double sq = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        sq += d * d;
      }
      return std::exp(-sq / (2.0 * spec.bandwidth * spec.bandwidth));
    }
  }
  return 0.0;
}

Matrix gram_matrix(const KernelSpec& spec, const std::vector<Vector>& points) {
  const std::size_t n = points.size();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = kernel_value(spec, points[i], points[j]);
      g(i, j) = k;
      g(j, i) = k;
    }
  }
  return g;
}

Matrix cross_kernel(const KernelSpec& spec, const std::vector<Vector>& rows,
                    const std::vector<Vector>& centers) {
  Matrix g(rows.size(), centers.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < centers.size(); ++j)
      g(i, j) = kernel_value(spec, rows[i], centers[j]);
  return g;
}

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::Linear ? "linear" : "gaussian";
}

KernelKind parse_kernel_kind(std::string_view text) {
  if (text == "linear") return KernelKind::Linear;
  if (text == "gaussian") return KernelKind::Gaussian;
  throw ContractViolation("unknown kernel '" + std::string(text) + "'");
}

}  // namespace sentrend
