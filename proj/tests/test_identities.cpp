#include "oracles.hpp"

#include "dtnlab/identities.hpp"

#include <doctest.h>

using namespace dtnlab;

namespace {

ShapeSpec unit_square() {
  ShapeSpec s;
  s.shape = Shape::square;
  return s;
}

}  // namespace

TEST_CASE("conformal lab, constant factor is exact in both dimensions") {
  const ConformalCase cc = conformal_catalog().front();
  for (int n : {2, 3}) {
    GridField grid;
    grid.n = n;
    grid.points = n == 2 ? 41 : 21;
    const ConformalResidual r = conformal_potential_residual(cc, grid);
    CHECK(r.residual <= 1e-12);
    CHECK(r.v_sup == 0.0);
  }
}

TEST_CASE("conformal lab, dimension two has no potential") {
  for (const ConformalCase& cc : conformal_catalog()) {
    const ConvergenceStudy st = conformal_convergence(cc, 2, 21);
    CHECK(st.v_sup_max == 0.0);
  }
}

TEST_CASE("conformal lab, fourth-order decay in dimension three") {
  const ConformalCase cc = conformal_catalog()[1];
  const ConvergenceStudy st = conformal_convergence(cc, 3, 21);
  REQUIRE(st.orders.size() == 2);
  for (double o : st.orders) CHECK(o >= 3.5);
  CHECK(st.v_sup_max > 0.0);
}

TEST_CASE("conformal lab contracts") {
  ConformalCase bad = conformal_catalog()[1];
  bad.c = [](const std::array<double, 3>& x) { return x[0]; };
  GridField grid;
  grid.points = 21;
  CHECK_THROWS_AS(conformal_potential_residual(bad, grid), ContractError);
  grid.n = 4;
  CHECK_THROWS_AS(conformal_potential_residual(conformal_catalog()[0], grid), ContractError);
}

TEST_CASE("integration by parts chain") {
  const Discretization d(generate_mesh(ShapeSpec{}, 0.03), MetricField());
  const IbpChain flat = ibp_chain_check(d, AnalyticField::constant(2.0));
  CHECK(flat.lhs_a == 0.0);
  CHECK(flat.lhs_b == 0.0);
  CHECK(flat.lhs_c == 0.0);

  const IbpChain radial = ibp_chain_check(d, AnalyticField::neumann_radial());
  CHECK(std::abs(radial.lhs_b - radial.lhs_c) <= 1e-6);
  CHECK(radial.lhs_c >= -1e-12);
  // 2 pi times the radial integral of w'^2 / w^2 r.
  const double exact = 2 * oracle::pi * oracle::simpson([](double r) {
    const double w = 2 - r * r + 0.5 * r * r * r * r, dw = -2 * r + 2 * r * r * r;
    return dw * dw / (w * w) * r;
  }, 0.0, 1.0);
  CHECK(radial.lhs_c == doctest::Approx(exact).epsilon(5e-3));
  AnalyticField neg = AnalyticField::constant(-1.0);
  CHECK_THROWS_AS(ibp_chain_check(d, neg), ContractError);
}

TEST_CASE("rigidity split") {
  const Discretization d(generate_mesh(unit_square(), 1.0 / 16), MetricField());
  const int nv = d.mesh().vertex_count();
  const double l1 = poincare_constant(d);
  const double delta = smallness_delta(l1);

  SUBCASE("zero potential") {
    const RigiditySplit s = rigidity_split(d, PotentialField::zero(nv), delta);
    CHECK(s.u_dot.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.remainder.cwiseAbs().maxCoeff() == 0.0);
    CHECK((s.u.array() - 1.0).abs().maxCoeff() <= 1e-14);
    const RigidityReport r = rigidity_identity_check(d, s, PotentialField::zero(nv), l1, delta, 1.0);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
  }
  SUBCASE("small sinusoidal potential") {
    const PotentialField v = make_potential(CatalogSpec::parse("sinsin:amplitude=0.01"), d.mesh());
    const RigiditySplit s = rigidity_split(d, v, delta);
    CHECK(s.reconstruction_gap <= 1e-10);
    CHECK(s.residual_u_dot <= 1e-10);
    CHECK(s.residual_remainder <= 1e-10);
    const VecX sum = VecX::Ones(nv) + s.u_dot + s.remainder;
    CHECK((sum - s.u).cwiseAbs().maxCoeff() <= 1e-10);
    const RigidityReport r = rigidity_identity_check(d, s, v, l1, delta, 5.0);
    CHECK(std::abs(r.gap - r.reconstructed) <= 1e-9 * std::max(std::abs(r.mean), std::abs(r.lhs)));
    // Leading order: 1^T Lambda_V 1 = int V + O(delta^2).
    CHECK(std::abs(r.boundary_term - r.mean) <= 1e-2 * std::abs(r.mean));
    CHECK(r.poincare_lhs);
  }
  SUBCASE("oversized potential is rejected") {
    CHECK_THROWS_AS(rigidity_split(d, PotentialField::constant(nv, 2 * delta), delta), ContractError);
  }
}

TEST_CASE("split constant is finite and seeded") {
  const Discretization d(generate_mesh(unit_square(), 1.0 / 8), MetricField());
  const double delta = smallness_delta(poincare_constant(d));
  const double a = measure_split_constant(d, delta, 4, 11);
  CHECK(std::isfinite(a));
  CHECK(a > 0.0);
  CHECK(measure_split_constant(d, delta, 4, 11) == a);
}

TEST_CASE("mean of the potential") {
  const Discretization sq(generate_mesh(unit_square(), 1.0 / 16), MetricField());
  CHECK(mean_zero(sq, PotentialField::zero(sq.mesh().vertex_count())) == 0.0);
  CHECK(std::abs(mean_zero(sq, make_potential(CatalogSpec::parse("sin2pix"), sq.mesh()))) <= 1e-6);
  const Discretization disk(generate_mesh(ShapeSpec{}, 0.05), MetricField());
  CHECK(std::abs(mean_zero(disk, PotentialField::constant(disk.mesh().vertex_count(), 1.0)) - oracle::pi) <=
        0.005 * oracle::pi);
}
