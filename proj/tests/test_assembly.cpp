#include "oracles.hpp"

#include "dtnlab/assembly.hpp"
#include "dtnlab/reference.hpp"

#include <doctest.h>

#include <omp.h>

using namespace dtnlab;

namespace {

ShapeSpec square() {
  ShapeSpec s;
  s.shape = Shape::square;
  return s;
}

MetricField metric(const char* key) { return MetricField::from_spec(CatalogSpec::parse(key)); }

}  // namespace

TEST_CASE("single right triangle element matrix") {
  const TriangleMesh m = load_mesh("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  const MatX k = MatX(assemble_stiffness(m, MetricField()).matrix());
  MatX expected(3, 3);
  expected << 1, -.5, -.5, -.5, .5, 0, -.5, 0, .5;
  CHECK((k - expected).cwiseAbs().maxCoeff() <= 1e-15);
  // P1 mass on a triangle of area A: A/12 [[2,1,1],[1,2,1],[1,1,2]].
  const MatX mm = MatX(assemble_mass(m, MetricField()).matrix());
  MatX mexp = MatX::Constant(3, 3, 0.5 / 12.0);
  mexp.diagonal().setConstant(1.0 / 12.0);
  CHECK((mm - mexp).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("stiffness kernel and symmetry") {
  const TriangleMesh m = generate_mesh(square(), 1.0 / 8);
  const SparseOperator k = assemble_stiffness(m, MetricField());
  const VecX ones = VecX::Ones(m.vertex_count());
  CHECK((k.matrix() * ones).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(k.symmetric());
  CHECK(k.asymmetry() <= 1e-14 * k.max_abs());
  const Eigen::SelfAdjointEigenSolver<MatX> es{MatX(k.matrix())};
  CHECK(es.eigenvalues()[0] >= -1e-12);
  CHECK(es.eigenvalues()[1] > 1e-6);
}

TEST_CASE("two-dimensional conformal invariance of the stiffness") {
  const TriangleMesh m = generate_mesh(ShapeSpec{}, 0.1);
  const SparseOperator a = assemble_stiffness(m, MetricField());
  const SparseOperator b = assemble_stiffness(m, metric("conformal:amplitude=0.5,width=0.4"));
  CHECK(MatX(a.matrix() - b.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("Galerkin consistency for a linear field") {
  // For P1 v and u = x, v^T K u is the exact integral of d_x v over the square.
  const TriangleMesh m = generate_mesh(square(), 1.0 / 6);
  const SparseOperator k = assemble_stiffness(m, MetricField());
  VecX u(m.vertex_count()), v(m.vertex_count());
  for (int i = 0; i < m.vertex_count(); ++i) {
    u[i] = m.vertices[i].x();
    v[i] = std::sin(3.0 * i);
  }
  double exact = 0.0;
  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tri = m.triangles[t];
    const Vec2 &p0 = m.vertices[tri[0]], &p1 = m.vertices[tri[1]], &p2 = m.vertices[tri[2]];
    // d_x of the linear interpolant from the 2x2 system.
    Mat2 j;
    j << p1.x() - p0.x(), p2.x() - p0.x(), p1.y() - p0.y(), p2.y() - p0.y();
    const Vec2 grad = j.transpose().inverse() * Vec2(v[tri[1]] - v[tri[0]], v[tri[2]] - v[tri[0]]);
    exact += grad.x() * m.signed_area(t);
  }
  CHECK(v.dot(k.matrix() * u) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("mass totals") {
  const TriangleMesh sq = generate_mesh(square(), 0.125);
  CHECK(VecX::Ones(sq.vertex_count()).dot(assemble_mass(sq, MetricField()).matrix() * VecX::Ones(sq.vertex_count())) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Conformal c = 1 + 0.2 exp(-|x - (0.5,0.5)|^2 / 0.3^2) on the square, the
  // integral of c by separable erf.
  const MetricField c = metric("conformal:amplitude=0.2,width=0.3,cx=0.5,cy=0.5");
  const TriangleMesh fine = generate_mesh(square(), 1.0 / 32);
  const double one_d = 0.3 * std::sqrt(oracle::pi) * std::erf(0.5 / 0.3);
  const double exact = 1.0 + 0.2 * one_d * one_d;
  const VecX ones = VecX::Ones(fine.vertex_count());
  CHECK(ones.dot(assemble_mass(fine, c).matrix() * ones) == doctest::Approx(exact).epsilon(1e-6));

  const PotentialField neg = make_potential(CatalogSpec::parse("sinsin:amplitude=-1"), sq);
  const Eigen::SelfAdjointEigenSolver<MatX> es{MatX(assemble_mass(sq, MetricField(), &neg).matrix())};
  CHECK(es.eigenvalues().maxCoeff() <= 1e-14);
}

TEST_CASE("boundary mass") {
  const TriangleMesh sq = generate_mesh(square(), 0.125);
  const SparseOperator b = assemble_boundary_mass(sq, MetricField());
  const VecX ones = VecX::Ones(b.dimension());
  CHECK(ones.dot(b.matrix() * ones) == doctest::Approx(4.0).epsilon(1e-12));
  // Supported only on neighbours along the loop.
  const int n = b.dimension();
  for (const auto& e : b.entries()) {
    const int d = std::abs(e.row - e.col);
    CHECK((d <= 1 || d == n - 1));
  }
  const Eigen::SelfAdjointEigenSolver<MatX> es{MatX(b.matrix())};
  CHECK(es.eigenvalues()[0] > 0.0);

  const TriangleMesh disk = generate_mesh(ShapeSpec{}, 0.05);
  const double len = boundary_loop_lengths(disk, MetricField())[0];
  CHECK(std::abs(len - 2 * oracle::pi) <= 0.005 * 2 * oracle::pi);

  // Metric circumference of each annulus loop is 2 pi f(r) up to the polygon.
  ShapeSpec an;
  an.shape = Shape::annulus;
  const TriangleMesh ring = generate_mesh(an, 0.05);
  const auto lengths = boundary_loop_lengths(ring, metric("revolution:a=1,b=2,r0=0.7"));
  for (int l = 0; l < 2; ++l) {
    const double r = ring.vertices[ring.boundary_loops[l][0]].norm();
    const double f = 1.0 + 2.0 * (r - 0.7) * (r - 0.7);
    CHECK(lengths[l] == doctest::Approx(2 * oracle::pi * f).epsilon(1e-3));
  }
}

TEST_CASE("OpenMP kernels agree with the serial reference for any thread count") {
  const TriangleMesh m = generate_mesh(ShapeSpec{}, 0.08);
  const MetricField g = metric("conformal:amplitude=0.3,width=0.6");
  const PotentialField v = make_potential(CatalogSpec::parse("gaussian:amplitude=0.4"), m);
  const MatX ref_k = MatX(reference::assemble_stiffness(m, g).matrix());
  const MatX ref_m = MatX(reference::assemble_mass(m, g, &v).matrix());
  const int saved = omp_get_max_threads();
  SparseOperator k1, k4;
  omp_set_num_threads(1);
  k1 = assemble_stiffness(m, g);
  omp_set_num_threads(4);
  k4 = assemble_stiffness(m, g);
  omp_set_num_threads(saved);
  CHECK(MatX(k1.matrix() - k4.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((MatX(k4.matrix()) - ref_k).cwiseAbs().maxCoeff() <= 1e-13 * ref_k.cwiseAbs().maxCoeff());
  CHECK((MatX(assemble_mass(m, g, &v).matrix()) - ref_m).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("matrix market export") {
  const TriangleMesh m = load_mesh("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  const std::string mm = assemble_stiffness(m, MetricField()).to_matrix_market();
  CHECK(mm.rfind("%%MatrixMarket matrix coordinate real symmetric", 0) == 0);
  CHECK(mm.find("3 3 ") != std::string::npos);
}
