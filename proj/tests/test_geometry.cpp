#include "oracles.hpp"

#include "dtnlab/fields.hpp"
#include "dtnlab/mesh.hpp"
#include "dtnlab/metric.hpp"
#include "dtnlab/quadrature.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace dtnlab;

namespace {

// Edge -> number of incident triangles, built directly from the triangle list.
std::map<std::pair<int, int>, int> edge_counts(const TriangleMesh& m) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  return count;
}

void check_invariants(const TriangleMesh& m) {
  for (int t = 0; t < m.triangle_count(); ++t) REQUIRE(m.signed_area(t) > 0.0);
  int boundary_edges = 0;
  for (const auto& [e, c] : edge_counts(m)) {
    REQUIRE((c == 1 || c == 2));
    boundary_edges += c == 1;
  }
  CHECK(boundary_edges == static_cast<int>(m.boundary_edges.size()));
  std::set<int> seen(m.boundary_vertices.begin(), m.boundary_vertices.end());
  CHECK(seen.size() == m.boundary_vertices.size());
  double loops = 0.0;
  for (int l = 0; l < static_cast<int>(m.boundary_loops.size()); ++l) loops += m.loop_signed_area(l);
  CHECK(m.total_area() == doctest::Approx(loops).epsilon(1e-12));
}

}  // namespace

TEST_CASE("catalog spec parsing") {
  const CatalogSpec s = CatalogSpec::parse("conformal:amplitude=0.2,width=0.5");
  CHECK(s.key == "conformal");
  CHECK(s.get("amplitude", 0) == 0.2);
  CHECK(s.get("missing", 7.0) == 7.0);
  CHECK(CatalogSpec::parse(s.to_string()).to_string() == s.to_string());
  CHECK_THROWS_AS(s.require_only({"amplitude"}), ContractError);
  CHECK_THROWS_AS(CatalogSpec::parse("disk:h"), ContractError);
}

TEST_CASE("quadrature rules integrate polynomials exactly") {
  // Reference triangle (0,0),(1,0),(0,1): integral of x^a y^b = a! b! / (a+b+2)!
  const auto fact = [](int n) { double f = 1; for (int i = 2; i <= n; ++i) f *= i; return f; };
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b) {
      double q = 0.0;
      for (const auto& p : quadrature::triangle_rule())
        q += 0.5 * p.weight * std::pow(p.bary[1], a) * std::pow(p.bary[2], b);
      CHECK(q == doctest::Approx(fact(a) * fact(b) / fact(a + b + 2)).epsilon(1e-14));
    }
  const auto gl = quadrature::gauss_legendre(8, 0.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 15);
  CHECK(s == doctest::Approx(std::pow(2.0, 16) / 16.0).epsilon(1e-13));
}

TEST_CASE("generated square covers the unit area exactly") {
  ShapeSpec sq;
  sq.shape = Shape::square;
  const TriangleMesh m = generate_mesh(sq, 0.25);
  check_invariants(m);
  CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.boundary_length() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(m.max_edge_length() <= 1.5 * 0.25);
}

TEST_CASE("generated disk boundary approximates the circle") {
  const TriangleMesh m = generate_mesh(ShapeSpec{}, 0.05);
  check_invariants(m);
  REQUIRE(m.boundary_loops.size() == 1);
  const int n = static_cast<int>(m.boundary_loops[0].size());
  CHECK(m.boundary_length() == doctest::Approx(oracle::inscribed_perimeter(n)).epsilon(1e-12));
  CHECK(std::abs(m.boundary_length() - 2 * oracle::pi) <= 0.005 * 2 * oracle::pi);
  CHECK(m.loop_signed_area(0) > 0.0);
  CHECK(m.max_edge_length() <= 1.5 * 0.05);
}

TEST_CASE("annulus has an outer and a clockwise inner loop") {
  ShapeSpec an;
  an.shape = Shape::annulus;
  const TriangleMesh m = generate_mesh(an, 0.05);
  check_invariants(m);
  REQUIRE(m.boundary_loops.size() == 2);
  CHECK(m.loop_signed_area(0) * m.loop_signed_area(1) < 0.0);
  CHECK_THROWS_AS(generate_mesh(an, 0.45), ContractError);
  CHECK_THROWS_AS(generate_mesh(ShapeSpec{}, 1.5), ContractError);
}

TEST_CASE("OFF ingestion") {
  const TriangleMesh one = load_mesh("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  CHECK(one.triangle_count() == 1);
  CHECK(one.boundary_edges.size() == 3);

  const TriangleMesh sq = load_mesh("OFF\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n");
  REQUIRE(sq.boundary_loops.size() == 1);
  CHECK(sq.boundary_loops[0].size() == 4);

  // Clockwise input is reversed as a whole.
  const TriangleMesh cw = load_mesh("OFF\n3 1 0\n0 0 0\n0 1 0\n1 0 0\n3 0 1 2\n");
  CHECK(cw.signed_area(0) == doctest::Approx(0.5));

  const TriangleMesh round = load_mesh(write_off(sq));
  CHECK(round.triangles == sq.triangles);

  CHECK_THROWS_WITH_AS(load_mesh("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n"),
                       doctest::Contains("non-triangular face"), ContractError);
  // Three faces on edge 0-1.
  CHECK_THROWS_AS(load_mesh("OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n1 1 0\n3 0 1 2\n3 1 0 3\n3 0 1 4\n"),
                  ContractError);
  // Second face wound against the first.
  CHECK_THROWS_AS(load_mesh("OFF\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 3 2\n"), ContractError);
  CHECK_THROWS_AS(load_mesh("OFF\n3 1 0\n0 0 0\n1 0 0\n2 0 0\n3 0 1 2\n"), ContractError);
  CHECK_THROWS_AS(load_mesh("PLY\n"), ContractError);
}

TEST_CASE("metric catalog") {
  const TriangleMesh disk = generate_mesh(ShapeSpec{}, 0.2);
  const MetricField e = evaluate_metric(CatalogSpec::parse("euclidean"), disk);
  CHECK(e.eval(Vec2(0.3, -0.2)).isApprox(Mat2::Identity()));

  const MetricField c = evaluate_metric(CatalogSpec::parse("conformal:amplitude=0.1,width=1"), disk);
  for (const Vec2& x : {Vec2(0, 0), Vec2(0.5, 0.1), Vec2(-0.3, 0.7)}) {
    const double cx = 1.0 + 0.1 * std::exp(-x.squaredNorm());
    CHECK(c.eval(x).determinant() == doctest::Approx(cx * cx).epsilon(1e-14));
  }
  CHECK(c.is_conformally_flat());

  ShapeSpec an;
  an.shape = Shape::annulus;
  const TriangleMesh ring = generate_mesh(an, 0.1);
  const MetricField rev = evaluate_metric(CatalogSpec::parse("revolution:a=1,b=1,r0=0.75"), ring);
  for (double r : {0.5, 0.6, 0.75, 0.9, 1.0}) {
    const Vec2 x(r * std::cos(0.4), r * std::sin(0.4));
    const Eigen::SelfAdjointEigenSolver<Mat2> es(rev.eval(x));
    // Radial direction has length 1; the unit angular direction carries f^2 / r^2.
    const double f = 1.0 + (r - 0.75) * (r - 0.75), ang = f * f / (r * r);
    CHECK(es.eigenvalues()[0] == doctest::Approx(std::min(1.0, ang)).epsilon(1e-12));
    CHECK(es.eigenvalues()[1] == doctest::Approx(std::max(1.0, ang)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(evaluate_metric(CatalogSpec::parse("conformal:amplitude=-2"), disk), ContractError);
  CHECK_THROWS_AS(evaluate_metric(CatalogSpec::parse("revolution"), disk), ContractError);
  CHECK_THROWS_AS(MetricField::from_spec(CatalogSpec::parse("hyperbolic")), ContractError);
}

TEST_CASE("metric derivatives match fourth-order central differences") {
  for (const char* key : {"conformal:amplitude=0.3,width=0.7,cx=0.1", "revolution:a=1,b=1,r0=0.75", "anisotropic"}) {
    const MetricField g = MetricField::from_spec(CatalogSpec::parse(key));
    const Vec2 x(0.41, 0.52);
    const double h = 1e-3;
    const auto d = g.deriv(x);
    for (int k = 0; k < 2; ++k) {
      Vec2 e = Vec2::Zero();
      e[k] = h;
      const Mat2 fd = (-g.eval(x + 2 * e) + 8 * g.eval(x + e) - 8 * g.eval(x - e) + g.eval(x - 2 * e)) / (12 * h);
      CHECK((fd - d[k]).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("potential and trace catalogs") {
  const TriangleMesh m = generate_mesh(ShapeSpec{}, 0.2);
  const PotentialField v = make_potential(CatalogSpec::parse("linear:amplitude=-3"), m);
  CHECK(v.sup_norm() == doctest::Approx(v.values().cwiseAbs().maxCoeff()));
  const PotentialField t1 = make_potential(CatalogSpec::parse("trig:amplitude=0.05,seed=7"), m);
  const PotentialField t2 = make_potential(CatalogSpec::parse("trig:amplitude=0.05,seed=7"), m);
  CHECK(t1.sup_norm() == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(t1.values() == t2.values());
  const BoundaryTrace f = make_trace(CatalogSpec::parse("x2y2"), m);
  CHECK(f.size() == m.boundary_count());
  for (int b = 0; b < m.boundary_count(); ++b) {
    const Vec2& x = m.vertices[m.boundary_vertices[b]];
    CHECK(f[b] == doctest::Approx(x.x() * x.x() - x.y() * x.y()));
  }
  CHECK_THROWS_AS(make_potential(CatalogSpec::parse("constant:amplitude=1"), m), ContractError);
  CHECK_THROWS_AS(make_trace(CatalogSpec::parse("spiral"), m), ContractError);
}

TEST_CASE("deterministic rng") {
  DeterministicRng a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.uniform() == b.uniform());
  // splitmix64 reference output for seed 0.
  DeterministicRng z(0);
  CHECK(z.next_u64() == 0xe220a8397b1dcdafULL);
}
