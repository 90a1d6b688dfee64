#pragma once

#include "dtnlab/common.hpp"
#include "dtnlab/mesh.hpp"

#include <functional>

namespace dtnlab {

/// Real potential sampled at mesh vertices; interpolated linearly inside
/// each triangle wherever it enters a quadrature.
class PotentialField {
 public:
  PotentialField() = default;
  explicit PotentialField(VecX values);

  static PotentialField zero(int vertex_count) { return PotentialField(VecX::Zero(vertex_count)); }
  static PotentialField constant(int vertex_count, double value) {
    return PotentialField(VecX::Constant(vertex_count, value));
  }
  static PotentialField sample(const TriangleMesh& mesh, const std::function<double(const Vec2&)>& fn);

  const VecX& values() const { return values_; }
  double sup_norm() const { return sup_norm_; }
  int size() const { return static_cast<int>(values_.size()); }
  bool is_zero() const { return sup_norm_ == 0.0; }

  PotentialField operator+(const PotentialField& other) const { return PotentialField(values_ + other.values_); }
  PotentialField operator-(const PotentialField& other) const { return PotentialField(values_ - other.values_); }
  PotentialField operator*(double s) const { return PotentialField(s * values_); }

 private:
  VecX values_;
  double sup_norm_ = 0.0;
};

/// Values on boundary DOFs in `TriangleMesh::boundary_vertices` order.
using BoundaryTrace = VecX;

/// Potential catalog: zero, constant(value), sinsin(amplitude) =
/// a sin(pi x) sin(pi y), sin2pix(amplitude), quadratic(amplitude) = a x^2,
/// gaussian(amplitude, width, cx, cy), linear(amplitude) = a x,
/// trig(amplitude, seed) a seeded random trigonometric polynomial scaled so
/// its sup over the mesh equals amplitude.
PotentialField make_potential(const CatalogSpec& spec, const TriangleMesh& mesh);

/// Trace catalog on boundary vertices: one, zero, fourier(k, phase) =
/// cos(k theta + phase) with theta the polar angle about the mesh centroid,
/// x, y, xy (coordinate monomials), x2y2 (x^2 - y^2).
BoundaryTrace make_trace(const CatalogSpec& spec, const TriangleMesh& mesh);

/// Seeded smooth random potential with sup norm `amplitude` on the mesh.
PotentialField random_trig_potential(const TriangleMesh& mesh, double amplitude, std::uint64_t seed);

}  // namespace dtnlab
