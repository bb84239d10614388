#pragma once

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <vector>

#include "dualcurve/types.hpp"

namespace testing {

inline dualcurve::Vector V(std::initializer_list<double> xs) {
  dualcurve::Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline bool close(double a, double b, double rel, double abs = 0.0) {
  return std::abs(a - b) <= abs + rel * std::max(std::abs(a), std::abs(b));
}

inline constexpr double pi = std::numbers::pi;

}  // namespace testing
