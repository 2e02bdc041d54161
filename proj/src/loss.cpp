#include "sentrend/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sentrend/error.hpp"

namespace sentrend {

void LossSpec::validate() const {
  switch (kind) {
    case LossKind::Huber:
      if (!(huber_k > 0.0) || !std::isfinite(huber_k))
        throw ContractViolation("huber k must be a positive finite number");
      break;
    case LossKind::Quantile:
      if (!(quantile_q >= 0.0 && quantile_q <= 1.0))
        throw ContractViolation("quantile q must lie in [0, 1]");
      break;
    case LossKind::EpsInsensitive:
      if (!(eps >= 0.0) || !std::isfinite(eps))
        throw ContractViolation("epsilon must be a non-negative finite number");
      break;
    case LossKind::LeastSquares:
      break;
  }
}

double loss_value(const LossSpec& spec, double e) {
  switch (spec.kind) {
    case LossKind::LeastSquares:
      return e * e;
    case LossKind::Huber: {
      const double a = std::abs(e);
      const double k = spec.huber_k;
      return a <= k ? 0.5 * e * e : k * a - 0.5 * k * k;
    }
    case LossKind::Quantile:
      return e * (spec.quantile_q - (e < 0.0 ? 1.0 : 0.0));
    case LossKind::EpsInsensitive:
      return std::max(0.0, std::abs(e) - spec.eps);
  }
  return 0.0;
}

OneSidedSlopes loss_slopes(const LossSpec& spec, double e) {
  switch (spec.kind) {
    case LossKind::LeastSquares:
      return {2.0 * e, 2.0 * e};
    case LossKind::Huber: {
      const double k = spec.huber_k;
      const double s = std::clamp(e, -k, k);
      return {s, s};
    }
    case LossKind::Quantile: {
      const double q = spec.quantile_q;
      if (e > 0.0) return {q, q};
      if (e < 0.0) return {q - 1.0, q - 1.0};
      return {q - 1.0, q};
    }
    case LossKind::EpsInsensitive: {
      const double t = spec.eps;
      if (e > t) return {1.0, 1.0};
      if (e < -t) return {-1.0, -1.0};
      const double left = (e == -t) ? -1.0 : 0.0;
      const double right = (e == t) ? 1.0 : 0.0;
      return {left, right};
    }
  }
  return {0.0, 0.0};
}

double loss_subgradient(const LossSpec& spec, double e) {
  const auto [left, right] = loss_slopes(spec, e);
  if (left == right) return left;
  // kink: 0 when it is in the subdifferential, otherwise the inner slope
  if (left <= 0.0 && 0.0 <= right) return 0.0;
  return std::abs(left) < std::abs(right) ? left : right;
}

ResidualRange residuals_with_slope(const LossSpec& spec, double s, double slack) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (spec.kind) {
    case LossKind::LeastSquares:
      return {0.5 * s, 0.5 * s};
    case LossKind::Huber: {
      const double k = spec.huber_k;
      if (s >= k - slack) return {k, inf};
      if (s <= -k + slack) return {-inf, -k};
      return {s, s};
    }
    case LossKind::Quantile: {
      const double q = spec.quantile_q;
      if (s >= q - slack) return {0.0, inf};
      if (s <= q - 1.0 + slack) return {-inf, 0.0};
      return {0.0, 0.0};
    }
    case LossKind::EpsInsensitive: {
      const double t = spec.eps;
      if (std::abs(s) <= slack) return {-t, t};
      if (s >= 1.0 - slack) return {t, inf};
      if (s <= -1.0 + slack) return {-inf, -t};
      return s > 0.0 ? ResidualRange{t, t} : ResidualRange{-t, -t};
    }
  }
  return {-inf, inf};
}

namespace {

// On an open interval free of breakpoints, d/db sum_t rho(s_t - b) is affine
// in b: slope * b + offset.
struct AffineDerivative {
  double slope = 0.0;
  double offset = 0.0;
  double at(double b) const { return slope * b + offset; }
};

AffineDerivative derivative_near(const LossSpec& spec, std::span<const double> s,
                                 double probe) {
  AffineDerivative d;
  for (double st : s) {
    const double e = st - probe;
    switch (spec.kind) {
      case LossKind::LeastSquares:
        // d/db (s - b)^2 = 2b - 2s
        d.slope += 2.0;
        d.offset -= 2.0 * st;
        break;
      case LossKind::Huber:
        if (std::abs(e) <= spec.huber_k) {
          d.slope += 1.0;
          d.offset -= st;
        } else {
          d.offset -= e > 0.0 ? spec.huber_k : -spec.huber_k;
        }
        break;
      case LossKind::Quantile:
        d.offset -= e > 0.0 ? spec.quantile_q : spec.quantile_q - 1.0;
        break;
      case LossKind::EpsInsensitive:
        if (e > spec.eps) d.offset -= 1.0;
        else if (e < -spec.eps) d.offset += 1.0;
        break;
    }
  }
  return d;
}

}  // namespace

double minimize_offset(const LossSpec& spec, std::span<const double> s) {
  if (s.empty()) throw ContractViolation("minimize_offset needs at least one value");

  std::vector<double> knots;
  for (double st : s) {
    switch (spec.kind) {
      case LossKind::LeastSquares:
        break;
      case LossKind::Huber:
        knots.push_back(st - spec.huber_k);
        knots.push_back(st + spec.huber_k);
        break;
      case LossKind::Quantile:
        knots.push_back(st);
        break;
      case LossKind::EpsInsensitive:
        knots.push_back(st - spec.eps);
        knots.push_back(st + spec.eps);
        break;
    }
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  constexpr double inf = std::numeric_limits<double>::infinity();
  struct Segment {
    double lo, hi;
    AffineDerivative d;
  };
  std::vector<Segment> segments;
  if (knots.empty()) {
    segments.push_back({-inf, inf, derivative_near(spec, s, 0.0)});
  } else {
    segments.push_back({-inf, knots.front(), derivative_near(spec, s, knots.front() - 1.0)});
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const double mid = 0.5 * (knots[i] + knots[i + 1]);
      segments.push_back({knots[i], knots[i + 1], derivative_near(spec, s, mid)});
    }
    segments.push_back({knots.back(), inf, derivative_near(spec, s, knots.back() + 1.0)});
  }

  // Derivative is nondecreasing in b. The argmin set is
  // [inf{b : D+(b) >= 0}, sup{b : D-(b) <= 0}].
  auto end_value = [](const Segment& seg, double b) {
    if (std::isinf(b)) {
      if (seg.d.slope != 0.0) return (b > 0) == (seg.d.slope > 0) ? inf : -inf;
      return seg.d.offset;
    }
    return seg.d.at(b);
  };
  auto root_in = [](const Segment& seg) {
    return std::clamp(-seg.d.offset / seg.d.slope, seg.lo, seg.hi);
  };

  double lower = -inf;
  for (const auto& seg : segments) {
    if (end_value(seg, seg.hi) >= 0.0) {
      lower = end_value(seg, seg.lo) >= 0.0 ? seg.lo : root_in(seg);
      break;
    }
  }
  double upper = inf;
  for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
    if (end_value(*it, it->lo) <= 0.0) {
      upper = end_value(*it, it->hi) <= 0.0 ? it->hi : root_in(*it);
      break;
    }
  }

  if (std::isinf(lower) && std::isinf(upper)) {
    throw ContractViolation("offset objective is unbounded below");
  }
  if (std::isinf(lower)) return upper;
  if (std::isinf(upper)) return lower;
  if (lower == upper) return lower;
  return 0.5 * (lower + upper);
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::LeastSquares: return "ls";
    case LossKind::Huber: return "huber";
    case LossKind::Quantile: return "quantile";
    case LossKind::EpsInsensitive: return "eps";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view text) {
  if (text == "ls" || text == "least_squares") return LossKind::LeastSquares;
  if (text == "huber") return LossKind::Huber;
  if (text == "quantile") return LossKind::Quantile;
  if (text == "eps" || text == "eps_insensitive") return LossKind::EpsInsensitive;
  throw ContractViolation("unknown loss '" + std::string(text) + "'");
}

}  // namespace sentrend
