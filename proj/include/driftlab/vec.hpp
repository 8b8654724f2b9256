#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace driftlab {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vec subtract(std::span<const double> a, std::span<const double> b) {
  Vec out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

inline Vec add(std::span<const double> a, std::span<const double> b) {
  Vec out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
  return out;
}

inline Vec scaled(std::span<const double> a, double c) {
  Vec out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = c * a[k];
  return out;
}

}  // namespace driftlab
