#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace signum {

/// Dense vector in R^d. Dimensions in this toolkit are tiny (d <= 8 in every
/// shipped scenario), so plain std::vector<double> plus free functions beats
/// pulling in a linear-algebra dependency.
using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

inline double norminf(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) {
    double v = std::fabs(x);
    if (v > m) m = v;
  }
  return m;
}

inline void add_scaled(Vec& acc, std::span<const double> x, double c) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * x[i];
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scaled(std::span<const double> a, double c) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace signum
