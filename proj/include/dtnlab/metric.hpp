#pragma once

#include "dtnlab/common.hpp"
#include "dtnlab/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <variant>

namespace dtnlab {

namespace metrics {

/// g = identity.
struct Euclidean {};
/// g = s * identity, s > 0.
struct Scaled {
  double s = 1.0;
};
/// g = c(x) * identity with c(x) = 1 + amplitude * exp(-|x - center|^2 / width^2).
/// Documented range: amplitude > -1, width > 0.
struct Conformal {
  double amplitude = 0.1;
  double width = 1.0;
  Vec2 center = Vec2::Zero();
};
/// g = diag(a11, a22), both positive.
struct Anisotropic {
  double a11 = 1.0;
  double a22 = 1.2;
};
/// Surface of revolution dr^2 + f(r)^2 dtheta^2 written in Cartesian
/// coordinates, f(r) = a + b (r - r0)^2. Singular at the origin, so it is
/// only valid on meshes that avoid r = 0 (the annulus).
struct Revolution {
  double a = 1.0;
  double b = 1.0;
  double r0 = 0.75;
  double profile(double r) const { return a + b * (r - r0) * (r - r0); }
  double profile_derivative(double r) const { return 2.0 * b * (r - r0); }
};

}  // namespace metrics

using MetricVariant = std::variant<metrics::Euclidean, metrics::Scaled, metrics::Conformal,
                                   metrics::Anisotropic, metrics::Revolution>;

/// Analytic Riemannian metric on the plane, selected from a fixed catalog.
class MetricField {
 public:
  MetricField() : variant_(metrics::Euclidean{}), spec_{"euclidean", {}} {}
  explicit MetricField(MetricVariant v);

  /// Catalog keys: euclidean, scaled(s), conformal(amplitude, width, cx, cy),
  /// anisotropic(a11, a22), revolution(a, b, r0).
  static MetricField from_spec(const CatalogSpec& spec);

  Mat2 eval(const Vec2& x) const;
  /// Partial derivatives d/dx and d/dy of the matrix entries.
  std::array<Mat2, 2> deriv(const Vec2& x) const;

  const CatalogSpec& spec() const { return spec_; }
  const MetricVariant& variant() const { return variant_; }
  bool is_conformally_flat() const;

 private:
  MetricVariant variant_;
  CatalogSpec spec_;
};

/// Build the metric and check SPD at every vertex and every quadrature
/// point of `mesh`; throws ContractError naming the first offending point.
MetricField evaluate_metric(const CatalogSpec& spec, const TriangleMesh& mesh);
void check_metric_on_mesh(const MetricField& metric, const TriangleMesh& mesh);

/// sqrt(det g) * g^{-1}, the coefficient of the weak Laplace-Beltrami form.
Mat2 laplace_coefficient(const Mat2& g);

}  // namespace dtnlab
