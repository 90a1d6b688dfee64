#include "dtnlab/fields.hpp"

#include <cmath>
#include <numbers>

namespace dtnlab {

PotentialField::PotentialField(VecX values) : values_(std::move(values)) {
  if (!values_.allFinite()) throw ContractError("potential has non-finite entries");
  sup_norm_ = values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff();
}

PotentialField PotentialField::sample(const TriangleMesh& mesh,
                                      const std::function<double(const Vec2&)>& fn) {
  VecX v(mesh.vertex_count());
  for (int i = 0; i < mesh.vertex_count(); ++i) v[i] = fn(mesh.vertices[i]);
  return PotentialField(std::move(v));
}

PotentialField random_trig_potential(const TriangleMesh& mesh, double amplitude, std::uint64_t seed) {
  // Degree-3 trigonometric polynomial on the mesh bounding box.
  constexpr int kDegree = 3;
  DeterministicRng rng(seed);
  double coef[kDegree + 1][kDegree + 1][4];
  for (auto& row : coef)
    for (auto& cell : row)
      for (double& c : cell) c = rng.uniform(-1.0, 1.0);
  const double pi = std::numbers::pi;
  auto fn = [&](const Vec2& x) {
    double s = 0.0;
    for (int i = 0; i <= kDegree; ++i) {
      for (int j = 0; j <= kDegree; ++j) {
        const double decay = 1.0 / (1.0 + i * i + j * j);
        const double ax = pi * i * x.x(), ay = pi * j * x.y();
        s += decay * (coef[i][j][0] * std::cos(ax) * std::cos(ay) + coef[i][j][1] * std::cos(ax) * std::sin(ay) +
                      coef[i][j][2] * std::sin(ax) * std::cos(ay) + coef[i][j][3] * std::sin(ax) * std::sin(ay));
      }
    }
    return s;
  };
  PotentialField raw = PotentialField::sample(mesh, fn);
  if (raw.sup_norm() == 0.0) return raw;
  return raw * (amplitude / raw.sup_norm());
}

PotentialField make_potential(const CatalogSpec& spec, const TriangleMesh& mesh) {
  const double pi = std::numbers::pi;
  const double a = spec.get("amplitude", 1.0);
  if (spec.key == "zero") {
    spec.require_only({});
    return PotentialField::zero(mesh.vertex_count());
  }
  if (spec.key == "constant") {
    spec.require_only({"value"});
    return PotentialField::constant(mesh.vertex_count(), spec.get("value", 0.0));
  }
  if (spec.key == "sinsin") {
    spec.require_only({"amplitude"});
    return PotentialField::sample(mesh, [&](const Vec2& x) { return a * std::sin(pi * x.x()) * std::sin(pi * x.y()); });
  }
  if (spec.key == "sin2pix") {
    spec.require_only({"amplitude"});
    return PotentialField::sample(mesh, [&](const Vec2& x) { return a * std::sin(2.0 * pi * x.x()); });
  }
  if (spec.key == "quadratic") {
    spec.require_only({"amplitude"});
    return PotentialField::sample(mesh, [&](const Vec2& x) { return a * x.x() * x.x(); });
  }
  if (spec.key == "linear") {
    spec.require_only({"amplitude"});
    return PotentialField::sample(mesh, [&](const Vec2& x) { return a * x.x(); });
  }
  if (spec.key == "gaussian") {
    spec.require_only({"amplitude", "width", "cx", "cy"});
    const double w = spec.get("width", 0.5);
    const Vec2 c(spec.get("cx", 0.0), spec.get("cy", 0.0));
    if (!(w > 0)) throw ContractError("gaussian potential needs width > 0");
    return PotentialField::sample(mesh, [&](const Vec2& x) { return a * std::exp(-(x - c).squaredNorm() / (w * w)); });
  }
  if (spec.key == "trig") {
    spec.require_only({"amplitude", "seed"});
    return random_trig_potential(mesh, a, static_cast<std::uint64_t>(spec.get("seed", 1.0)));
  }
  throw ContractError("unknown potential key '" + spec.key + "'");
}

BoundaryTrace make_trace(const CatalogSpec& spec, const TriangleMesh& mesh) {
  const int nb = mesh.boundary_count();
  BoundaryTrace f(nb);
  Vec2 centroid = Vec2::Zero();
  for (const auto& v : mesh.vertices) centroid += v;
  centroid /= mesh.vertex_count();
  for (int b = 0; b < nb; ++b) {
    const Vec2& x = mesh.vertices[mesh.boundary_vertices[b]];
    const Vec2 d = x - centroid;
    double value = 0.0;
    if (spec.key == "one") {
      value = 1.0;
    } else if (spec.key == "zero") {
      value = 0.0;
    } else if (spec.key == "fourier") {
      value = std::cos(spec.get("k", 1.0) * std::atan2(d.y(), d.x()) + spec.get("phase", 0.0));
    } else if (spec.key == "x") {
      value = x.x();
    } else if (spec.key == "y") {
      value = x.y();
    } else if (spec.key == "xy") {
      value = x.x() * x.y();
    } else if (spec.key == "x2y2") {
      value = x.x() * x.x() - x.y() * x.y();
    } else {
      throw ContractError("unknown trace key '" + spec.key + "'");
    }
    f[b] = value;
  }
  return f;
}

}  // namespace dtnlab
