#include "dtnlab/xray.hpp"

#include "dtnlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace dtnlab {

PlaneField make_plane_field(const CatalogSpec& spec) {
  if (spec.key == "one") {
    spec.require_only({});
    return [](const Vec2&) { return 1.0; };
  }
  if (spec.key == "zero") {
    spec.require_only({});
    return [](const Vec2&) { return 0.0; };
  }
  if (spec.key == "x") {
    spec.require_only({});
    return [](const Vec2& p) { return p.x(); };
  }
  if (spec.key == "y") {
    spec.require_only({});
    return [](const Vec2& p) { return p.y(); };
  }
  if (spec.key == "paraboloid") {
    spec.require_only({});
    return [](const Vec2& p) { return 1.0 - p.squaredNorm(); };
  }
  if (spec.key == "bump") {
    spec.require_only({"cx", "cy", "width"});
    const Vec2 c(spec.get("cx", 0.2), spec.get("cy", -0.1));
    const double w = spec.get("width", 0.4);
    if (!(w > 0.0)) throw ContractError("bump width must be positive");
    return [c, w](const Vec2& p) { return std::exp(-(p - c).squaredNorm() / (w * w)); };
  }
  throw ContractError("unknown plane field key '" + spec.key + "'");
}

namespace {

using State = Eigen::Vector4d;

State hamiltonian_rhs(const MetricField& metric, const State& y) {
  const Vec2 x = y.head<2>();
  const Vec2 p = y.tail<2>();
  const Mat2 g = metric.eval(x);
  const Vec2 v = g.inverse() * p;
  const auto dg = metric.deriv(x);
  State out;
  out.head<2>() = v;
  out[2] = 0.5 * v.dot(dg[0] * v);
  out[3] = 0.5 * v.dot(dg[1] * v);
  return out;
}

struct StepResult {
  State y;
  double error;
};

// Dormand-Prince 5(4), fifth-order solution with the embedded error estimate.
StepResult dp45_step(const MetricField& metric, const State& y, double h) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  const State k1 = hamiltonian_rhs(metric, y);
  const State k2 = hamiltonian_rhs(metric, y + h * a21 * k1);
  const State k3 = hamiltonian_rhs(metric, y + h * (a31 * k1 + a32 * k2));
  const State k4 = hamiltonian_rhs(metric, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const State k5 = hamiltonian_rhs(metric, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const State k6 = hamiltonian_rhs(metric, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  StepResult r;
  r.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const State k7 = hamiltonian_rhs(metric, r.y);
  r.error = (h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).cwiseAbs().maxCoeff();
  return r;
}

RaySample sample_of(const MetricField& metric, const State& y, double s) {
  const Vec2 x = y.head<2>();
  return {x, metric.eval(x).inverse() * Vec2(y.tail<2>()), s};
}

}  // namespace

GeodesicRay trace_geodesic(const MetricField& metric, const ShapeSpec& shape, const Vec2& entry, const Vec2& direction,
                           double l_max, const GeodesicOptions& options) {
  const Mat2 g0 = metric.eval(entry);
  const double speed2 = direction.dot(g0 * direction);
  if (!(speed2 > 0.0)) throw ContractError("direction must be nonzero");
  const Vec2 dir = direction / std::sqrt(speed2);
  // Inward test: a short Euclidean step along the direction must enter.
  const double probe = 1e-7 * std::max(1.0, shape.diameter());
  if (!(shape.level_set(entry + probe * dir.normalized()) < 0.0))
    throw ContractError("direction is tangent or outward at the entry point");

  GeodesicRay ray;
  ray.entry = entry;
  ray.direction = dir;
  State y;
  y.head<2>() = entry;
  y.tail<2>() = g0 * dir;
  double s = 0.0;
  double h = 0.2 * options.max_step;
  ray.samples.push_back({entry, dir, 0.0});
  auto drift = [&](const RaySample& r) { return std::abs(r.v.dot(metric.eval(r.x) * r.v) - 1.0); };

  while (s < l_max) {
    h = std::min({h, options.max_step, l_max - s});
    const StepResult step = dp45_step(metric, y, h);
    if (step.error > options.tolerance) {
      h *= std::max(0.2, 0.9 * std::pow(options.tolerance / step.error, 0.2));
      if (h < 1e-14) throw ConvergenceError("geodesic step size underflow");
      continue;
    }
    if (shape.level_set(step.y.head<2>()) >= 0.0) {
      double lo = 0.0, hi = h;
      State end = step.y;
      while (hi - lo > options.crossing_tolerance) {
        const double mid = 0.5 * (lo + hi);
        const State ym = dp45_step(metric, y, mid).y;
        if (shape.level_set(ym.head<2>()) >= 0.0) {
          hi = mid;
          end = ym;
        } else {
          lo = mid;
        }
      }
      s += hi;
      ray.samples.push_back(sample_of(metric, end, s));
      ray.exited = true;
      break;
    }
    y = step.y;
    s += h;
    ray.samples.push_back(sample_of(metric, y, s));
    const double grow = step.error > 0.0 ? 0.9 * std::pow(options.tolerance / step.error, 0.2) : 5.0;
    h *= std::clamp(grow, 0.2, 5.0);
  }
  ray.length = s;
  for (const auto& r : ray.samples) ray.speed_drift = std::max(ray.speed_drift, drift(r));
  return ray;
}

double ray_transform(const PlaneField& v0, const GeodesicRay& ray) {
  if (!ray.exited) throw ContractError("transform undefined on non-exiting ray");
  static const quadrature::GaussLegendre gl = quadrature::gauss_legendre(5, 0.0, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < ray.samples.size(); ++i) {
    const RaySample& a = ray.samples[i];
    const RaySample& b = ray.samples[i + 1];
    const double dt = b.s - a.s;
    double seg = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double t = gl.nodes[q];
      const double t2 = t * t, t3 = t2 * t;
      const Vec2 x = (2 * t3 - 3 * t2 + 1) * a.x + (t3 - 2 * t2 + t) * dt * a.v + (-2 * t3 + 3 * t2) * b.x +
                     (t3 - t2) * dt * b.v;
      seg += gl.weights[q] * v0(x);
    }
    total += seg * dt;
  }
  return total;
}

std::vector<BoundaryNode> boundary_nodes(const ShapeSpec& shape, int count) {
  if (count < 4) throw ContractError("at least four boundary nodes are required");
  std::vector<BoundaryNode> nodes;
  auto circle = [&](double r, int n, bool outer) {
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * std::numbers::pi * (i + 0.5) / n;
      const Vec2 u(std::cos(th), std::sin(th));
      nodes.push_back({r * u, outer ? Vec2(-u) : u, Vec2(-u.y(), u.x()), 2.0 * std::numbers::pi * r / n});
    }
  };
  switch (shape.shape) {
    case Shape::disk: circle(shape.radius, count, true); break;
    case Shape::annulus: {
      const int n_out = static_cast<int>(std::lround(count * shape.outer / (shape.outer + shape.inner)));
      circle(shape.outer, n_out, true);
      circle(shape.inner, count - n_out, false);
      break;
    }
    case Shape::square: {
      const double a = shape.side;
      const Vec2 corners[4] = {{0, 0}, {a, 0}, {a, a}, {0, a}};
      for (int side = 0; side < 4; ++side) {
        const int n = count / 4 + (side < count % 4 ? 1 : 0);
        const Vec2 p = corners[side], q = corners[(side + 1) % 4];
        const Vec2 t = (q - p).normalized();
        for (int i = 0; i < n; ++i) nodes.push_back({p + (i + 0.5) / n * (q - p), Vec2(-t.y(), t.x()), t, a / n});
      }
      break;
    }
  }
  return nodes;
}

double InfluxQuadrature::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

InfluxQuadrature influx_quadrature(const MetricField& metric, const ShapeSpec& shape, int boundary_count, int angle_count) {
  if (angle_count < 1) throw ContractError("angle count must be positive");
  const auto nodes = boundary_nodes(shape, boundary_count);
  const auto gl = quadrature::gauss_legendre(angle_count, -0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
  InfluxQuadrature q;
  q.boundary_count = static_cast<int>(nodes.size());
  q.angle_count = angle_count;
  for (int b = 0; b < q.boundary_count; ++b) {
    const BoundaryNode& n = nodes[b];
    const Mat2 g = metric.eval(n.x);
    const Mat2 gi = g.inverse();
    const Vec2 nu = gi * n.inward_normal / std::sqrt(n.inward_normal.dot(gi * n.inward_normal));
    const double stretch = std::sqrt(n.tangent.dot(g * n.tangent));
    const Vec2 tau = n.tangent / stretch;
    for (int j = 0; j < angle_count; ++j) {
      const double th = gl.nodes[j];
      q.points.push_back(n.x);
      q.directions.push_back(std::cos(th) * nu + std::sin(th) * tau);
      q.weights.push_back(std::cos(th) * gl.weights[j] * stretch * n.weight);
      q.boundary_index.push_back(b);
      q.angles.push_back(th);
    }
  }
  return q;
}

double volume_integral(const MetricField& metric, const ShapeSpec& shape, const PlaneField& v0, int order) {
  double total = 0.0;
  auto density = [&](const Vec2& x) { return v0(x) * std::sqrt(metric.eval(x).determinant()); };
  if (shape.shape == Shape::square) {
    const auto gl = quadrature::gauss_legendre(order, 0.0, shape.side);
    for (int i = 0; i < order; ++i)
      for (int j = 0; j < order; ++j) total += gl.weights[i] * gl.weights[j] * density(Vec2(gl.nodes[i], gl.nodes[j]));
    return total;
  }
  const double r0 = shape.shape == Shape::disk ? 0.0 : shape.inner;
  const double r1 = shape.shape == Shape::disk ? shape.radius : shape.outer;
  const auto gl = quadrature::gauss_legendre(order, r0, r1);
  const int na = 2 * order;
  for (int i = 0; i < order; ++i) {
    double ring = 0.0;
    for (int j = 0; j < na; ++j) {
      const double th = 2.0 * std::numbers::pi * j / na;
      ring += density(gl.nodes[i] * Vec2(std::cos(th), std::sin(th)));
    }
    total += gl.weights[i] * gl.nodes[i] * ring * 2.0 * std::numbers::pi / na;
  }
  return total;
}

SantaloResult santalo_average(const MetricField& metric, const ShapeSpec& shape, const PlaneField& v0,
                              const InfluxQuadrature& influx, double l_max, bool parallel) {
  const int n = static_cast<int>(influx.weights.size());
  std::vector<double> contrib(n, 0.0), drift(n, 0.0);
  std::vector<char> trapped(n, 0);
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
  for (int i = 0; i < n; ++i) {
    const GeodesicRay ray = trace_geodesic(metric, shape, influx.points[i], influx.directions[i], l_max);
    drift[i] = ray.speed_drift;
    if (!ray.exited) {
      trapped[i] = 1;
      continue;
    }
    contrib[i] = influx.weights[i] * ray_transform(v0, ray);
  }
  SantaloResult r;
  for (int i = 0; i < n; ++i) {
    if (trapped[i]) {
      char msg[200];
      std::snprintf(msg, sizeof msg, "trapped ray %d (boundary node %d, angle %.6f) did not exit within L_max = %g", i,
                    influx.boundary_index[i], influx.angles[i], l_max);
      throw ConvergenceError(msg);
    }
    r.lhs += contrib[i];
    r.max_speed_drift = std::max(r.max_speed_drift, drift[i]);
  }
  r.rhs = 2.0 * std::numbers::pi * volume_integral(metric, shape, v0);
  r.scale = 2.0 * std::numbers::pi * volume_integral(metric, shape, [&](const Vec2& x) { return std::abs(v0(x)); });
  r.gap = r.scale > 0.0 ? std::abs(r.lhs - r.rhs) / r.scale : std::abs(r.lhs - r.rhs);
  return r;
}

NontrappingReport nontrapping_audit(const MetricField& metric, const ShapeSpec& shape, int boundary_count,
                                    int angle_count, double l_max) {
  const InfluxQuadrature q = influx_quadrature(metric, shape, boundary_count, angle_count);
  const int n = static_cast<int>(q.weights.size());
  std::vector<double> length(n);
  std::vector<char> exited(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (int i = 0; i < n; ++i) {
    const GeodesicRay ray = trace_geodesic(metric, shape, q.points[i], q.directions[i], l_max);
    length[i] = ray.length;
    exited[i] = ray.exited ? 1 : 0;
  }
  NontrappingReport rep;
  rep.rays = n;
  rep.l_max = l_max;
  for (int i = 0; i < n; ++i) {
    if (!exited[i]) continue;
    ++rep.exited;
    rep.max_exit_length = std::max(rep.max_exit_length, length[i]);
  }
  rep.exit_fraction = n > 0 ? static_cast<double>(rep.exited) / n : 1.0;
  rep.trapped_fraction = 1.0 - rep.exit_fraction;
  rep.nontrapping = rep.exited == n;
  rep.verdict = rep.nontrapping ? "nontrapping at resolution" : "trapped rays at resolution";
  return rep;
}

std::string ray_csv(const InfluxQuadrature& influx, const MetricField& metric, const ShapeSpec& shape, double l_max,
                    int stride) {
  if (stride < 1) throw ContractError("stride must be positive");
  std::vector<int> picks;
  for (int i = 0; i < static_cast<int>(influx.weights.size()); i += stride) picks.push_back(i);
  const int n = static_cast<int>(picks.size());
  std::vector<GeodesicRay> rays(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (int k = 0; k < n; ++k)
    rays[k] = trace_geodesic(metric, shape, influx.points[picks[k]], influx.directions[picks[k]], l_max);
  std::ostringstream out;
  out << "entry_x,entry_y,angle,length,exited\n";
  char buf[160];
  for (int k = 0; k < n; ++k) {
    const int i = picks[k];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d\n", influx.points[i].x(), influx.points[i].y(),
                  influx.angles[i], rays[k].length, rays[k].exited ? 1 : 0);
    out << buf;
  }
  return out.str();
}

}  // namespace dtnlab
