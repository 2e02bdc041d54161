#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sentrend/matrix.hpp"

namespace sentrend {

enum class KernelKind { Linear, Gaussian };

// linear:   K(u, v) = u.v
// gaussian: K(u, v) = exp(-|u - v|^2 / (2 h^2))
struct KernelSpec {
  KernelKind kind = KernelKind::Gaussian;
  double bandwidth = 1.0;

  static KernelSpec linear() { return {KernelKind::Linear, 1.0}; }
  static KernelSpec gaussian(double h) { return {KernelKind::Gaussian, h}; }

  void validate() const;
};

double kernel_value(const KernelSpec& spec, std::span<const double> u,
                    std::span<const double> v);

// G(i, j) = K(points[i], points[j]). Symmetric by construction.
Matrix gram_matrix(const KernelSpec& spec, const std::vector<Vector>& points);

// G(i, j) = K(rows[i], centers[j]).
Matrix cross_kernel(const KernelSpec& spec, const std::vector<Vector>& rows,
                    const std::vector<Vector>& centers);

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view text);

}  // namespace sentrend
