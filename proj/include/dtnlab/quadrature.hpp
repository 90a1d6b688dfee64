#pragma once

#include <array>
#include <vector>

namespace dtnlab::quadrature {

/// Point of a rule on the reference triangle, in barycentric coordinates.
struct TrianglePoint {
  std::array<double, 3> bary;
  double weight;  // weights sum to 1; multiply by the triangle area
};

/// Symmetric 6-point rule, exact for polynomials of degree 4.
const std::array<TrianglePoint, 6>& triangle_rule();

struct LinePoint {
  double s;       // position in [0, 1]
  double weight;  // weights sum to 1; multiply by the segment length
};

/// 3-point Gauss-Legendre rule on [0, 1] (exact to degree 5).
const std::array<LinePoint, 3>& segment_rule();

/// Gauss-Legendre nodes and weights on [a, b] with n points.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n, double a = -1.0, double b = 1.0);

}  // namespace dtnlab::quadrature
