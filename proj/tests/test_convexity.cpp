#include "dtnlab/convexity.hpp"

#include <doctest.h>

using namespace dtnlab;

namespace {

const Discretization& disk() {
  static const Discretization d(generate_mesh(ShapeSpec{}, 0.15), MetricField());
  return d;
}

PotentialField pot(const char* spec) { return make_potential(CatalogSpec::parse(spec), disk().mesh()); }
BoundaryTrace trace(const char* spec) { return make_trace(CatalogSpec::parse(spec), disk().mesh()); }

}  // namespace

TEST_CASE("H curve trivial cases") {
  const std::vector<double> grid = {0.0, 0.3, 0.7, 1.0};
  const PotentialField v = pot("gaussian:amplitude=0.05");
  const auto same = h_curve(disk(), v, v, trace("fourier:k=1"), grid);
  const auto [lo, hi] = std::minmax_element(same.begin(), same.end());
  CHECK(*hi - *lo <= 1e-11 * std::abs(same[0]));
  for (double h : h_curve(disk(), v, pot("zero"), trace("zero"), grid)) CHECK(h == 0.0);
}

TEST_CASE("midpoint concavity") {
  const auto h = h_curve(disk(), pot("zero"), pot("quadratic:amplitude=0.05"), trace("fourier:k=1"), {0.0, 0.5, 1.0});
  CHECK(h[1] >= 0.5 * h[0] + 0.5 * h[2] - 1e-10);
}

TEST_CASE("linearization fields") {
  const PotentialField v1 = pot("gaussian:amplitude=0.04");
  const BoundaryTrace f = trace("fourier:k=2");
  SUBCASE("q = 0") {
    const LinearizationFields lf = linearization_fields(disk(), v1, pot("zero"), f, 0.5);
    CHECK(lf.v.cwiseAbs().maxCoeff() == 0.0);
    CHECK(lf.r.cwiseAbs().maxCoeff() == 0.0);
    CHECK(lf.r_dot.cwiseAbs().maxCoeff() == 0.0);
    CHECK(lf.r_ddot.cwiseAbs().maxCoeff() == 0.0);
    CHECK(hessian_formula(disk(), v1, pot("zero"), lf) == 0.0);
  }
  SUBCASE("t dependence and the r derivative") {
    const PotentialField q = pot("linear:amplitude=0.06");
    const LinearizationFields a = linearization_fields(disk(), v1, q, f, 0.0);
    const LinearizationFields b = linearization_fields(disk(), v1, q, f, 1.0);
    CHECK((a.u0 - b.u0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.v - b.v).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.r - b.r).cwiseAbs().maxCoeff() > 0.0);
    CHECK(b.reconstruction <= 1e-9);
    CHECK(b.max_residual <= 1e-10);

    const double dt = 1e-3;
    const LinearizationFields m = linearization_fields(disk(), v1, q, f, 0.5);
    const LinearizationFields p = linearization_fields(disk(), v1, q, f, 0.5 + dt);
    const LinearizationFields n = linearization_fields(disk(), v1, q, f, 0.5 - dt);
    const VecX fd = (p.r - n.r) / (2 * dt);
    CHECK(disk().l2_norm(fd - m.r_dot) <= 1e-5 * disk().l2_norm(m.r_dot));
  }
}

TEST_CASE("Hessian sign and finite differences") {
  const PotentialField q = pot("gaussian:amplitude=0.08,cx=0.3");
  const BoundaryTrace f = trace("fourier:k=1");
  const LinearizationFields lf = linearization_fields(disk(), pot("zero"), q, f, 0.0);
  const double h2 = hessian_formula(disk(), pot("zero"), q, lf);
  CHECK(h2 == doctest::Approx(-2.0 * disk().energy(lf.v)).epsilon(1e-10));
  CHECK(h2 < 0.0);

  const PotentialField v1 = pot("trig:amplitude=0.05,seed=5");
  const PotentialField v2 = pot("trig:amplitude=0.05,seed=9");
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const LinearizationFields l = linearization_fields(disk(), v1, v2 - v1, f, t);
    const double a = hessian_formula(disk(), v1, v2 - v1, l);
    const double b = hessian_fd(disk(), v1, v2, f, t);
    CHECK(std::abs(a - b) <= 1e-3 * std::abs(a));
  }
}

TEST_CASE("operator combination gap") {
  const PotentialField v1 = pot("gaussian:amplitude=0.05");
  const PotentialField v2 = pot("linear:amplitude=0.08");
  for (double t : {0.0, 1.0}) {
    const GapResult g = operator_combination_gap(disk(), v1, v2, t);
    CHECK(std::abs(g.min_eigenvalue) <= 1e-12 * g.lambda_norm);
  }
  const GapResult same = operator_combination_gap(disk(), v1, v1, 0.5);
  CHECK(std::abs(same.min_eigenvalue) <= 1e-12 * same.lambda_norm);
  const GapResult mid = operator_combination_gap(disk(), v1, v2, 0.5);
  CHECK(mid.min_eigenvalue > 0.0);
}

TEST_CASE("deformation scan") {
  const RigidityScan zero = deformation_rigidity_scan(disk(), pot("zero"), {0.01, 0.1});
  for (const auto& row : zero.rows) CHECK(row.difference <= 1e-12);
  const RigidityScan s = deformation_rigidity_scan(disk(), pot("gaussian:amplitude=0.05"), {0.01, 0.1, 0.5});
  CHECK(std::abs(s.slope - s.fd_slope) <= 0.05 * s.fd_slope);
  CHECK(s.rows[0].difference == doctest::Approx(0.01 * s.slope).epsilon(0.05));
  bool moved = false;
  for (const auto& row : s.rows) moved = moved || row.difference > 1e-6;
  CHECK(moved);
}

TEST_CASE("catalog and curve export") {
  const double delta = 0.05;
  const auto cat = convexity_catalog(disk().mesh(), delta);
  CHECK(cat.size() == 10);
  for (const auto& tr : cat) {
    CHECK(tr.v1.sup_norm() <= delta * (1 + 1e-12));
    CHECK(tr.v2.sup_norm() <= delta * (1 + 1e-12));
  }
  const auto rows = convexity_curve(disk(), cat[0].v1, cat[0].v2, cat[0].f);
  CHECK(rows.size() == 11);
  const std::string csv = convexity_csv(rows);
  CHECK(csv.rfind("t,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
  CHECK_THROWS_AS(interpolate_potential(cat[0].v1, PotentialField::zero(3), 0.5), ContractError);
}
