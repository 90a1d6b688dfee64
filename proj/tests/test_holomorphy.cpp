#include "oracles.hpp"

#include "dtnlab/holomorphy.hpp"
#include "dtnlab/reference.hpp"

#include <doctest.h>

using namespace dtnlab;

namespace {

const Discretization& disk() {
  static const Discretization d(generate_mesh(ShapeSpec{}, 0.05), MetricField());
  return d;
}

const SpectralTraceData& data() {
  static const SpectralTraceData s = SpectralTraceData::build(disk(), 200, 2 * oracle::pi);
  return s;
}

BoundaryTrace fourier1() { return make_trace(CatalogSpec::parse("fourier:k=1"), disk().mesh()); }

}  // namespace

TEST_CASE("Green coefficient identity") {
  const CoefficientCheck cc = coefficient_identity(disk(), data(), fourier1());
  CHECK(cc.count == 200);
  CHECK(cc.max_rel_gap <= 1e-8);
}

TEST_CASE("zeta eigen sum trivial cases") {
  const BoundaryTrace f = fourier1();
  CHECK(zeta_partial(data(), f, 1.0, 0).cwiseAbs().maxCoeff() == 0.0);
  // Remove the span of the first 20 flux pairings from f.
  const MatX r = data().eigen.flux_pairing.leftCols(20);
  const VecX g = f - r * (r.transpose() * r).ldlt().solve(r.transpose() * f);
  CHECK(data().coefficients(g).head(20).cwiseAbs().maxCoeff() <= 1e-12 * f.norm());
  CHECK(zeta_partial(data(), g, Complex(1, 1), 20).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(zeta_partial(data(), f, 1.0, 201), ContractError);
}

TEST_CASE("resolvent difference") {
  const BoundaryTrace f = fourier1();
  const double mu = 2 * oracle::pi;
  CHECK(zeta_direct(disk(), VecX::Zero(f.size()), 1.0, mu).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(zeta_direct(disk(), f, mu, mu), ContractError);

  const VecXc near = zeta_direct(disk(), f, mu + 1e-6, mu);
  const VecXc far = zeta_direct(disk(), f, mu + 1e-3, mu);
  CHECK(disk().b_norm(VecXc(near - far)) <= 1e-3 * disk().b_norm(near));

  const VecXc d0 = resolvent_apply(disk(), 0.0, f) - resolvent_apply(disk(), mu, f);
  const VecXc z0 = zeta_direct(disk(), f, 0.0, mu);
  CHECK(disk().b_norm(VecXc(disk().to_trace(d0) + mu * z0)) <= 1e-12 * disk().b_norm(z0) * mu);
}

TEST_CASE("eigen sum converges to the resolvent difference") {
  const ResolventConvergence rc = resolvent_convergence(disk(), data(), fourier1(), 1.0, {25, 50, 100, 200});
  for (std::size_t i = 1; i < rc.errors.size(); ++i) CHECK(rc.errors[i] <= rc.errors[i - 1]);
  CHECK(rc.errors.back() <= 0.05 * rc.direct_norm);
  const double bound = uniform_bound(disk(), data(), fourier1(), 200, {0.0, 1.0, 10.0, 100.0, Complex(0, 1), Complex(1, 1)});
  CHECK(std::isfinite(bound));
  CHECK(bound > 0.0);
}

TEST_CASE("full spectrum closes the resolvent identity exactly") {
  // Coarse mesh, every Dirichlet mode.
  const Discretization d(generate_mesh(ShapeSpec{}, 0.25), MetricField());
  SpectralTraceData all;
  all.mu = 3.0;
  all.eigen = reference::eigensystem(d, PotentialField::zero(d.mesh().vertex_count()), d.dofs().interior_count());
  const BoundaryTrace f = make_trace(CatalogSpec::parse("fourier:k=2"), d.mesh());
  for (const Complex z : {Complex(0, 0), Complex(1, 0), Complex(0, 1)}) {
    const VecXc sum = zeta_partial(all, f, z, all.count()) + mass_layer_term(d, f).cast<Complex>();
    const VecXc direct = zeta_direct(d, f, z, all.mu);
    CHECK(d.b_norm(VecXc(sum - direct)) <= 1e-10 * d.b_norm(direct));
  }
}

TEST_CASE("zeta gap audit") {
  const BoundaryTrace f = fourier1();
  const std::vector<Complex> zs = {0.0, 1.0, Complex(0, 1)};
  const Discretization twin(disk().mesh(), disk().metric());
  CHECK(zeta_gap_audit(disk(), twin, f, zs, 2 * oracle::pi).max_gap <= 1e-10);

  // Stiffness is conformally invariant, so Lambda(0) agrees; the mass term does not.
  const Discretization conf(disk().mesh(), MetricField::from_spec(CatalogSpec::parse("conformal:amplitude=0.2,width=0.5")));
  const VecXc a = resolvent_apply(disk(), 0.0, f), b = resolvent_apply(conf, 0.0, f);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * a.cwiseAbs().maxCoeff());

  const Discretization aniso(disk().mesh(), MetricField::from_spec(CatalogSpec::parse("anisotropic:a11=1,a22=1.2")));
  const ZetaGapReport rep = zeta_gap_audit(disk(), aniso, f, zs, 2 * oracle::pi, {4 * oracle::pi, 8 * oracle::pi});
  CHECK(rep.max_gap > 1e-6);
  REQUIRE(rep.mu_rows.size() == 2);
  CHECK(rep.mu_rows[1].gap < rep.mu_rows[0].gap);

  const Discretization other(generate_mesh(ShapeSpec{}, 0.2), MetricField());
  CHECK_THROWS_AS(zeta_gap_audit(disk(), other, f, zs, 1.0), ContractError);
}

TEST_CASE("Mobius map") {
  CHECK(mobius(0.0) == Complex(1.0, 0.0));
  const double mu = 2 * oracle::pi;
  CHECK(mobius_inverse(mu).real() == doctest::Approx((mu - 1) / (mu + 1)).epsilon(1e-15));
  CHECK(mobius_inverse(mu).real() == doctest::Approx(0.725395).epsilon(1e-6));
  for (int j = 0; j < 8; ++j) {
    const Complex z = 0.99 * std::polar(1.0, 2 * oracle::pi * j / 8);
    CHECK(mobius(z).real() >= 0.0);
    CHECK(std::abs(mobius_inverse(mobius(z)) - z) <= 1e-14);
  }
  CHECK_THROWS_AS(mobius(1.0), ContractError);
}

TEST_CASE("Blaschke audit for sin") {
  const BlaschkeSequence s = blaschke_audit(ScalarProfile::from_spec(CatalogSpec::parse("sin")), 1000);
  REQUIRE(s.zeros.size() == 1000);
  for (int k = 0; k < 100; ++k) {
    CHECK(std::abs(s.zeros[k] - 2 * oracle::pi * (k + 1)) <= 1e-12);
    CHECK(s.mu[k] == doctest::Approx(2 * oracle::pi * (k + 1)).epsilon(1e-13));
  }
  CHECK(s.monotone);
  CHECK(s.max_identity_gap <= 1e-12);
  CHECK(s.max_residual <= 1e-12);
  // Harmonic-sum oracle for the increment.
  double direct = 0.0;
  for (int k = 101; k <= 1000; ++k) direct += 2.0 / (1.0 + 2 * oracle::pi * k);
  CHECK(s.increment == doctest::Approx(direct).epsilon(1e-12));
  CHECK(std::abs(s.increment - std::log(10.0) / oracle::pi) <= 0.1 * std::log(10.0) / oracle::pi);
  CHECK(s.divergence_established);
  CHECK(blaschke_csv(s).rfind("K,", 0) == 0);
}

TEST_CASE("Blaschke audit with finitely many zeros") {
  const BlaschkeSequence s = blaschke_audit(ScalarProfile::from_spec(CatalogSpec::parse("linear:a=3")), 100);
  CHECK(s.zeros.size() == 1);
  CHECK(s.zeros[0] == doctest::Approx(3.0));
  CHECK(!s.divergence_established);
  CHECK(s.message == "divergence not established on range");
  CHECK_THROWS_AS(blaschke_audit(ScalarProfile::from_spec(CatalogSpec::parse("damped_sin")), 10, 100.0), ContractError);
}
