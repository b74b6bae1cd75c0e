#pragma once

// Finite-N scaling exponents: least-squares slope of log(value) against
// log(N).

#include "mqs/core.hpp"

#include <utility>
#include <vector>

namespace mqs {

struct ExponentFit {
  double exponent = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  std::vector<std::pair<int, double>> points;
  bool floor_applied = false;
};

inline ExponentFit fit_exponent(const std::vector<std::pair<int, double>>& points) {
  if (points.size() < 3)
    throw Error(ErrorKind::invalid_input, "exponent fit needs at least three points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [n, v] = points[i];
    if (n < 1) throw Error(ErrorKind::invalid_input, "N must be positive");
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::invalid_input,
                  "value at N = " + std::to_string(n) + " is not positive (" +
                      std::to_string(v) + "); cannot take its logarithm");
    if (i > 0 && n <= points[i - 1].first)
      throw Error(ErrorKind::invalid_input, "N must be strictly increasing");
  }
  const auto m = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [n, v] : points) {
    sx += std::log(static_cast<double>(n));
    sy += std::log(v);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (const auto& [n, v] : points) {
    const double dx = std::log(static_cast<double>(n)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  ExponentFit fit;
  fit.points = points;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ssr = 0;
  for (const auto& [n, v] : points) {
    const double r = std::log(v) - (fit.intercept + fit.exponent * std::log(static_cast<double>(n)));
    ssr += r * r;
  }
  fit.std_error = points.size() > 2 ? std::sqrt(ssr / (m - 2.0) / sxx) : 0.0;
  return fit;
}

struct FlooredFits {
  ExponentFit primary;                 // floored unless every raw value exceeds N
  std::optional<ExponentFit> unfloored;  // present when all raw values are > 0
};

// Fit of max(N, raw). The floor is dropped when raw > N at every point;
// otherwise the floored values are fitted and floor_applied is set.
inline FlooredFits fit_with_floor(const std::vector<std::pair<int, double>>& raw) {
  bool all_above = true, all_positive = true;
  std::vector<std::pair<int, double>> floored;
  for (const auto& [n, v] : raw) {
    all_above = all_above && v > n;
    all_positive = all_positive && v > 0.0;
    floored.emplace_back(n, std::max(static_cast<double>(n), v));
  }
  FlooredFits out;
  if (all_above) {
    out.primary = fit_exponent(raw);
  } else {
    out.primary = fit_exponent(floored);
    out.primary.floor_applied = true;
  }
  if (all_positive) out.unfloored = fit_exponent(raw);
  return out;
}

}  // namespace mqs
