#pragma once

// Closed-form values the library is checked against. Each one is computed
// here from first principles, not through dtnlab.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Perimeter of the regular n-gon inscribed in a circle of radius r.
inline double inscribed_perimeter(int n, double r = 1.0) { return 2.0 * n * r * std::sin(pi / n); }

/// First positive zero of J0 by bisection on [2, 3].
inline double bessel_j01() {
  double a = 2.0, b = 3.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    (std::cyl_bessel_j(0.0, a) * std::cyl_bessel_j(0.0, m) <= 0.0 ? b : a) = m;
  }
  return 0.5 * (a + b);
}

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace oracle
