#pragma once

#include "dtnlab/common.hpp"
#include "dtnlab/mesh.hpp"
#include "dtnlab/metric.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dtnlab {

using PlaneField = std::function<double(const Vec2&)>;

/// Analytic fields on the transversal factor: one, zero, x, y, paraboloid
/// (1 - |x|^2), bump(cx, cy, width).
PlaneField make_plane_field(const CatalogSpec& spec);

struct RaySample {
  Vec2 x;
  Vec2 v;  // velocity, g-unit
  double s = 0.0;
};

struct GeodesicRay {
  Vec2 entry;
  Vec2 direction;
  std::vector<RaySample> samples;
  bool exited = false;
  double length = 0.0;
  double speed_drift = 0.0;  // max |g(v, v) - 1|
};

struct GeodesicOptions {
  double tolerance = 1e-11;  // per-step error control
  double max_step = 0.05;
  double crossing_tolerance = 1e-10;
};

/// Unit-speed geodesic from a boundary point, integrated in Hamiltonian
/// form with an embedded Dormand-Prince 5(4) pair.
GeodesicRay trace_geodesic(const MetricField& metric, const ShapeSpec& shape, const Vec2& entry, const Vec2& direction,
                           double l_max, const GeodesicOptions& options = {});

/// Integral of V0 along the ray, Gauss-Legendre on each step with the
/// cubic Hermite interpolant of the path.
double ray_transform(const PlaneField& v0, const GeodesicRay& ray);

struct BoundaryNode {
  Vec2 x;
  Vec2 inward_normal;  // Euclidean unit normal
  Vec2 tangent;        // Euclidean unit tangent
  double weight = 0.0; // Euclidean length element
};

/// Midpoint nodes on every boundary component, distributed by length.
std::vector<BoundaryNode> boundary_nodes(const ShapeSpec& shape, int count);

struct InfluxQuadrature {
  std::vector<Vec2> points;
  std::vector<Vec2> directions;  // g-unit inward velocities
  std::vector<double> weights;   // cos(theta) d theta d ell_g
  std::vector<int> boundary_index;
  std::vector<double> angles;
  int boundary_count = 0;
  int angle_count = 0;

  double total_weight() const;
};
InfluxQuadrature influx_quadrature(const MetricField& metric, const ShapeSpec& shape, int boundary_count, int angle_count);

struct SantaloResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;       // |lhs - rhs| / max(|rhs|, scale)
  double scale = 0.0;     // 2 pi sup|V0| area_g
  double max_speed_drift = 0.0;
};

/// Integral over the influx bundle of the ray transform against 2 pi times
/// the volume integral of V0. Throws if a quadrature ray does not exit.
SantaloResult santalo_average(const MetricField& metric, const ShapeSpec& shape, const PlaneField& v0,
                              const InfluxQuadrature& influx, double l_max, bool parallel = true);

/// Volume integral of V0 against dV_g by tensor Gauss rules.
double volume_integral(const MetricField& metric, const ShapeSpec& shape, const PlaneField& v0, int order = 64);

struct NontrappingReport {
  int rays = 0;
  int exited = 0;
  double exit_fraction = 0.0;
  double trapped_fraction = 0.0;
  double max_exit_length = 0.0;
  double l_max = 0.0;
  bool nontrapping = false;
  std::string verdict;
};
NontrappingReport nontrapping_audit(const MetricField& metric, const ShapeSpec& shape, int boundary_count,
                                    int angle_count, double l_max);

/// Ray dump: entry, angle, length, exit flag.
std::string ray_csv(const InfluxQuadrature& influx, const MetricField& metric, const ShapeSpec& shape, double l_max,
                    int stride = 1);

}  // namespace dtnlab
