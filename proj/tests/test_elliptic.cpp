#include "oracles.hpp"

#include "dtnlab/elliptic.hpp"
#include "dtnlab/reference.hpp"

#include <doctest.h>

using namespace dtnlab;

namespace {

Discretization disk(double h, const char* metric = "euclidean") {
  return Discretization(generate_mesh(ShapeSpec{}, h), MetricField::from_spec(CatalogSpec::parse(metric)));
}

Discretization square(double h) {
  ShapeSpec s;
  s.shape = Shape::square;
  return Discretization(generate_mesh(s, h), MetricField());
}

}  // namespace

TEST_CASE("Dirichlet solve reproduces constants and harmonic polynomials") {
  const Discretization d = disk(0.05);
  const int nv = d.mesh().vertex_count();
  const VecX one = solve_dirichlet(d, PotentialField::zero(nv), VecX::Ones(d.dofs().boundary_count()));
  CHECK((one.array() - 1.0).abs().maxCoeff() <= 1e-12);

  const BoundaryTrace f = make_trace(CatalogSpec::parse("x2y2"), d.mesh());
  const VecX u = solve_dirichlet(d, PotentialField::zero(nv), f);
  double err = 0.0;
  for (int i = 0; i < nv; ++i) {
    const Vec2& x = d.mesh().vertices[i];
    err = std::max(err, std::abs(u[i] - (x.x() * x.x() - x.y() * x.y())));
  }
  CHECK(err <= 0.01);
  for (int b = 0; b < d.dofs().boundary_count(); ++b) CHECK(u[d.dofs().boundary[b]] == f[b]);
  CHECK(interior_residual(d, d.stiffness(), u) <= 1e-10);
}

TEST_CASE("singular interior operator is rejected") {
  const Discretization d = disk(0.1);
  const double l1 = poincare_constant(d);
  const PotentialField v = PotentialField::constant(d.mesh().vertex_count(), -l1);
  CHECK_THROWS_WITH_AS(dtn_matrix(d, v), doctest::Contains("A2 violated"), SingularOperatorError);
}

TEST_CASE("DtN of the flat disk") {
  const Discretization d = disk(0.05);
  const DtNMatrix dtn = dtn_matrix(d, PotentialField::zero(d.mesh().vertex_count()));
  CHECK(dtn.relative_asymmetry() <= 1e-10);
  const VecX ones = VecX::Ones(dtn.size());
  CHECK(d.dual_norm(VecX(dtn.pairing * ones)) <= 1e-8 * dtn.operator_norm());
  const VecX eig = dtn.generalized_eigenvalues();
  const double expected[] = {0, 1, 1, 2, 2, 3, 3};
  for (int k = 1; k < 7; ++k) CHECK(std::abs(eig[k] - expected[k]) <= 0.02 * expected[k]);
  const MatX dense = reference::schur_complement(d, d.stiffness());
  CHECK((dense - dtn.pairing).cwiseAbs().maxCoeff() <= 1e-10 * dense.cwiseAbs().maxCoeff());
}

TEST_CASE("energy identity of the Schur complement") {
  const Discretization d = disk(0.1, "conformal:amplitude=0.3,width=0.5");
  const PotentialField v = make_potential(CatalogSpec::parse("gaussian:amplitude=0.2"), d.mesh());
  const DtNMatrix dtn = dtn_matrix(d, v);
  const BoundaryTrace f = make_trace(CatalogSpec::parse("fourier:k=2,phase=0.3"), d.mesh());
  const VecX u = solve_dirichlet(d, v, f);
  const double energy = u.dot(d.schrodinger(v).matrix() * u);
  CHECK(dtn.quadratic(f) == doctest::Approx(energy).epsilon(1e-12));
}

TEST_CASE("monotonicity in a constant potential") {
  const Discretization d = disk(0.1);
  const int nv = d.mesh().vertex_count();
  const DtNMatrix a = dtn_matrix(d, PotentialField::zero(nv));
  const DtNMatrix b = dtn_matrix(d, PotentialField::constant(nv, 0.05));
  const VecX gap = pencil_eigenvalues(b.pairing - a.pairing, d.boundary_mass_dense());
  CHECK(gap.minCoeff() >= -1e-10);
  // Finite-difference slope in the constant for one trace.
  const BoundaryTrace f = make_trace(CatalogSpec::parse("fourier:k=3"), d.mesh());
  const double s = 1e-4;
  const double slope = (dtn_matrix(d, PotentialField::constant(nv, s)).quadratic(f) -
                        dtn_matrix(d, PotentialField::constant(nv, -s)).quadratic(f)) / (2 * s);
  CHECK(slope >= -1e-8);
}

TEST_CASE("Dirichlet eigenvalues") {
  SUBCASE("unit square against 2 pi^2") {
    const Discretization d = square(1.0 / 32);
    const EigenSystem sys = dirichlet_eigensystem(d, PotentialField::zero(d.mesh().vertex_count()), 6);
    CHECK(std::abs(sys.eigenvalues[0] - 2 * oracle::pi * oracle::pi) <= 0.01 * 2 * oracle::pi * oracle::pi);
    CHECK(std::abs(sys.eigenvalues[1] - 5 * oracle::pi * oracle::pi) <= 0.02 * 5 * oracle::pi * oracle::pi);
    const MatX gram = sys.vectors.transpose() * partition(d.mass().matrix(), d.dofs()).ii * sys.vectors;
    CHECK((gram - MatX::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-10);
    for (int k = 0; k < 6; ++k) CHECK(sys.residuals[k] <= 1e-8 * sys.eigenvalues[k]);
  }
  SUBCASE("unit disk against the Bessel zero") {
    const Discretization d = disk(0.05);
    const double j = oracle::bessel_j01();
    CHECK(std::abs(poincare_constant(d) - j * j) <= 0.01 * j * j);
  }
  SUBCASE("constant shift and metric scaling") {
    const Discretization d = disk(0.1);
    const int nv = d.mesh().vertex_count();
    const EigenSystem a = dirichlet_eigensystem(d, PotentialField::zero(nv), 5);
    const EigenSystem b = dirichlet_eigensystem(d, PotentialField::constant(nv, 0.7), 5);
    CHECK(((b.eigenvalues - a.eigenvalues).array() - 0.7).abs().maxCoeff() <= 1e-10);
    const Discretization scaled = disk(0.1, "scaled:s=4");
    CHECK(poincare_constant(scaled) == doctest::Approx(a.eigenvalues[0] / 4).epsilon(0.01));
  }
  SUBCASE("Krylov against the dense solve") {
    const Discretization d = disk(0.1, "anisotropic");
    const PotentialField v = make_potential(CatalogSpec::parse("trig:amplitude=0.5,seed=3"), d.mesh());
    const EigenSystem k = dirichlet_eigensystem(d, v, 8);
    const EigenSystem r = reference::eigensystem(d, v, 8);
    for (int i = 0; i < 8; ++i) CHECK(k.eigenvalues[i] == doctest::Approx(r.eigenvalues[i]).epsilon(1e-9));
  }
  SUBCASE("count above the cutoff is rejected") {
    const Discretization d = disk(0.2);
    CHECK_THROWS_AS(dirichlet_eigensystem(d, PotentialField::zero(d.mesh().vertex_count()), d.dofs().interior_count()),
                    ContractError);
  }
}

TEST_CASE("resolvent DtN") {
  const Discretization d = disk(0.1);
  const int nv = d.mesh().vertex_count();
  const ComplexDtN z0 = resolvent_dtn(d, 0.0);
  const DtNMatrix harm = dtn_matrix(d, PotentialField::zero(nv));
  CHECK((z0.pairing.real() - harm.pairing).cwiseAbs().maxCoeff() <= 1e-12 * harm.pairing.cwiseAbs().maxCoeff());
  const ComplexDtN z3 = resolvent_dtn(d, 3.0);
  const DtNMatrix c3 = dtn_matrix(d, PotentialField::constant(nv, 3.0));
  CHECK((z3.pairing.real() - c3.pairing).cwiseAbs().maxCoeff() <= 1e-12 * c3.pairing.cwiseAbs().maxCoeff());
  CHECK(z3.pairing.imag().cwiseAbs().maxCoeff() == 0.0);
  const ComplexDtN zi = resolvent_dtn(d, Complex(0, 1));
  CHECK((zi.pairing - zi.pairing.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * zi.pairing.cwiseAbs().maxCoeff());
  CHECK(zi.pairing.imag().cwiseAbs().maxCoeff() > 0.0);
  CHECK_THROWS_AS(resolvent_dtn(d, Complex(-1, 0)), ContractError);
}

TEST_CASE("smallness threshold") {
  CHECK(smallness_delta(5.78) == doctest::Approx(0.1));
  CHECK(smallness_delta(0.5) == doctest::Approx(0.05));
}
