#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace svarmsh {

inline constexpr double neg_inf() {
  return -std::numeric_limits<double>::infinity();
}

// lgamma without the signgam global (safe under threads).
inline double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

inline double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

// log(sum_i exp(v_i)) guarded against overflow; empty input gives -inf.
inline double log_sum_exp(const double* v, std::size_t n) {
  double m = neg_inf();
  for (std::size_t i = 0; i < n; ++i)
    if (v[i] > m) m = v[i];
  if (!std::isfinite(m)) return m; // all -inf (or some +inf/nan propagates)
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::exp(v[i] - m);
  return m + std::log(acc);
}

inline double log_sum_exp(const std::vector<double>& v) {
  return log_sum_exp(v.data(), v.size());
}

// log(mean_i exp(v_i)).
inline double log_mean_exp(const double* v, std::size_t n) {
  return log_sum_exp(v, n) - std::log(static_cast<double>(n));
}

inline double log_mean_exp(const std::vector<double>& v) {
  return log_mean_exp(v.data(), v.size());
}

} // namespace svarmsh
