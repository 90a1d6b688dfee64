#include "dtnlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dtnlab::quadrature {

const std::array<TrianglePoint, 6>& triangle_rule() {
  // Dunavant degree-4 rule: two orbits of three points each.
  static const std::array<TrianglePoint, 6> rule = [] {
    constexpr double w1 = 0.223381589678011;
    constexpr double a1 = 0.108103018168070;
    constexpr double b1 = 0.445948490915965;
    constexpr double w2 = 0.109951743655322;
    constexpr double a2 = 0.816847572980459;
    constexpr double b2 = 0.091576213509771;
    return std::array<TrianglePoint, 6>{{
        {{a1, b1, b1}, w1},
        {{b1, a1, b1}, w1},
        {{b1, b1, a1}, w1},
        {{a2, b2, b2}, w2},
        {{b2, a2, b2}, w2},
        {{b2, b2, a2}, w2},
    }};
  }();
  return rule;
}

const std::array<LinePoint, 3>& segment_rule() {
  static const std::array<LinePoint, 3> rule = [] {
    const double d = 0.5 * std::sqrt(3.0 / 5.0);
    return std::array<LinePoint, 3>{{
        {0.5 - d, 5.0 / 18.0},
        {0.5, 8.0 / 18.0},
        {0.5 + d, 5.0 / 18.0},
    }};
  }();
  return rule;
}

GaussLegendre gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the Tricomi initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

}  // namespace dtnlab::quadrature
