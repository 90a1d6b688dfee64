#include "dtnlab/metric.hpp"

#include "dtnlab/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace dtnlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

CatalogSpec spec_of(const MetricVariant& v) {
  return std::visit(
      Overloaded{
          [](const metrics::Euclidean&) { return CatalogSpec{"euclidean", {}}; },
          [](const metrics::Scaled& m) { return CatalogSpec{"scaled", {{"s", m.s}}}; },
          [](const metrics::Conformal& m) {
            return CatalogSpec{"conformal",
                               {{"amplitude", m.amplitude},
                                {"width", m.width},
                                {"cx", m.center.x()},
                                {"cy", m.center.y()}}};
          },
          [](const metrics::Anisotropic& m) {
            return CatalogSpec{"anisotropic", {{"a11", m.a11}, {"a22", m.a22}}};
          },
          [](const metrics::Revolution& m) {
            return CatalogSpec{"revolution", {{"a", m.a}, {"b", m.b}, {"r0", m.r0}}};
          },
      },
      v);
}

// P = r^2 * (unit angular direction outer product), and its partials.
Mat2 angular_projector(const Vec2& x) {
  Mat2 p;
  p << x.y() * x.y(), -x.x() * x.y(), -x.x() * x.y(), x.x() * x.x();
  return p;
}

}  // namespace

MetricField::MetricField(MetricVariant v) : variant_(std::move(v)), spec_(spec_of(variant_)) {}

MetricField MetricField::from_spec(const CatalogSpec& spec) {
  if (spec.key == "euclidean") {
    spec.require_only({});
    return MetricField(metrics::Euclidean{});
  }
  if (spec.key == "scaled") {
    spec.require_only({"s"});
    metrics::Scaled m{spec.get("s", 1.0)};
    if (!(m.s > 0)) throw ContractError("scaled metric needs s > 0");
    return MetricField(m);
  }
  if (spec.key == "conformal") {
    spec.require_only({"amplitude", "width", "cx", "cy"});
    metrics::Conformal m;
    m.amplitude = spec.get("amplitude", 0.1);
    m.width = spec.get("width", 1.0);
    m.center = Vec2(spec.get("cx", 0.0), spec.get("cy", 0.0));
    if (!(m.amplitude > -1.0)) throw ContractError("conformal metric needs amplitude > -1");
    if (!(m.width > 0.0)) throw ContractError("conformal metric needs width > 0");
    return MetricField(m);
  }
  if (spec.key == "anisotropic") {
    spec.require_only({"a11", "a22"});
    metrics::Anisotropic m{spec.get("a11", 1.0), spec.get("a22", 1.2)};
    if (!(m.a11 > 0 && m.a22 > 0)) throw ContractError("anisotropic metric needs positive entries");
    return MetricField(m);
  }
  if (spec.key == "revolution") {
    spec.require_only({"a", "b", "r0"});
    metrics::Revolution m{spec.get("a", 1.0), spec.get("b", 1.0), spec.get("r0", 0.75)};
    return MetricField(m);
  }
  throw ContractError("unknown metric key '" + spec.key + "'");
}

bool MetricField::is_conformally_flat() const {
  return !std::holds_alternative<metrics::Anisotropic>(variant_) &&
         !std::holds_alternative<metrics::Revolution>(variant_);
}

Mat2 MetricField::eval(const Vec2& x) const {
  return std::visit(
      Overloaded{
          [](const metrics::Euclidean&) -> Mat2 { return Mat2::Identity(); },
          [](const metrics::Scaled& m) -> Mat2 { return m.s * Mat2::Identity(); },
          [&x](const metrics::Conformal& m) -> Mat2 {
            const double c =
                1.0 + m.amplitude * std::exp(-(x - m.center).squaredNorm() / (m.width * m.width));
            return c * Mat2::Identity();
          },
          [](const metrics::Anisotropic& m) -> Mat2 {
            Mat2 g;
            g << m.a11, 0.0, 0.0, m.a22;
            return g;
          },
          [&x](const metrics::Revolution& m) -> Mat2 {
            const double r2 = x.squaredNorm();
            const double f = m.profile(std::sqrt(r2));
            const double psi = (f * f - r2) / (r2 * r2);
            return Mat2::Identity() + psi * angular_projector(x);
          },
      },
      variant_);
}

std::array<Mat2, 2> MetricField::deriv(const Vec2& x) const {
  return std::visit(
      Overloaded{
          [](const metrics::Euclidean&) { return std::array<Mat2, 2>{Mat2::Zero(), Mat2::Zero()}; },
          [](const metrics::Scaled&) { return std::array<Mat2, 2>{Mat2::Zero(), Mat2::Zero()}; },
          [&x](const metrics::Conformal& m) {
            const Vec2 d = x - m.center;
            const double w2 = m.width * m.width;
            const double bump = m.amplitude * std::exp(-d.squaredNorm() / w2);
            const Vec2 grad = (-2.0 / w2) * bump * d;
            return std::array<Mat2, 2>{grad.x() * Mat2::Identity(), grad.y() * Mat2::Identity()};
          },
          [](const metrics::Anisotropic&) {
            return std::array<Mat2, 2>{Mat2::Zero(), Mat2::Zero()};
          },
          [&x](const metrics::Revolution& m) {
            const double r2 = x.squaredNorm();
            const double r = std::sqrt(r2);
            const double f = m.profile(r);
            const double fp = m.profile_derivative(r);
            const double r4 = r2 * r2;
            const double psi = (f * f - r2) / r4;
            const double dpsi = (2.0 * f * fp - 2.0 * r) / r4 - 4.0 * (f * f - r2) / (r4 * r);
            const Mat2 p = angular_projector(x);
            Mat2 dpx, dpy;
            dpx << 0.0, -x.y(), -x.y(), 2.0 * x.x();
            dpy << 2.0 * x.y(), -x.x(), -x.x(), 0.0;
            return std::array<Mat2, 2>{dpsi * (x.x() / r) * p + psi * dpx,
                                       dpsi * (x.y() / r) * p + psi * dpy};
          },
      },
      variant_);
}

Mat2 laplace_coefficient(const Mat2& g) {
  const double det = g.determinant();
  Mat2 inv;
  inv << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
  return inv / std::sqrt(det);
}

void check_metric_on_mesh(const MetricField& metric, const TriangleMesh& mesh) {
  auto check = [&](const Vec2& x, const char* what) {
    const Mat2 g = metric.eval(x);
    const bool finite = g.allFinite();
    const double tr = g.trace();
    const double det = g.determinant();
    const double asym = std::abs(g(0, 1) - g(1, 0));
    if (!finite || asym > 1e-14 * std::abs(tr) || !(tr > 0.0) || !(det > 0.0)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "metric '" << metric.spec().to_string() << "' is not SPD at " << what << " ("
          << x.x() << ", " << x.y() << ")";
      throw ContractError(msg.str());
    }
  };
  for (const auto& v : mesh.vertices) check(v, "vertex");
  const auto& rule = quadrature::triangle_rule();
  for (const auto& tri : mesh.triangles) {
    for (const auto& qp : rule) {
      const Vec2 x = qp.bary[0] * mesh.vertices[tri[0]] + qp.bary[1] * mesh.vertices[tri[1]] +
                     qp.bary[2] * mesh.vertices[tri[2]];
      check(x, "quadrature point");
    }
  }
}

MetricField evaluate_metric(const CatalogSpec& spec, const TriangleMesh& mesh) {
  MetricField metric = MetricField::from_spec(spec);
  check_metric_on_mesh(metric, mesh);
  return metric;
}

}  // namespace dtnlab
