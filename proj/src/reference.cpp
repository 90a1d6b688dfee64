#include "dtnlab/reference.hpp"

#include "dtnlab/quadrature.hpp"

#include <Eigen/Dense>

namespace dtnlab::reference {

namespace {

struct Element {
  std::array<Vec2, 3> grad;
  std::array<Vec2, 3> p;
  double area;
};

Element element(const TriangleMesh& mesh, int t) {
  Element e;
  const auto& tri = mesh.triangles[t];
  for (int k = 0; k < 3; ++k) e.p[k] = mesh.vertices[tri[k]];
  Mat2 jac;
  jac.col(0) = e.p[1] - e.p[0];
  jac.col(1) = e.p[2] - e.p[0];
  e.area = 0.5 * jac.determinant();
  const Mat2 jit = jac.inverse().transpose();
  e.grad[0] = jit * Vec2(-1.0, -1.0);
  e.grad[1] = jit * Vec2(1.0, 0.0);
  e.grad[2] = jit * Vec2(0.0, 1.0);
  return e;
}

}  // namespace

SparseOperator assemble_stiffness(const TriangleMesh& mesh, const MetricField& metric) {
  std::vector<Eigen::Triplet<double>> trip;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const Element e = element(mesh, t);
    for (const auto& qp : quadrature::triangle_rule()) {
      const Vec2 x = qp.bary[0] * e.p[0] + qp.bary[1] * e.p[1] + qp.bary[2] * e.p[2];
      const Mat2 g = metric.eval(x);
      const Mat2 coef = std::sqrt(g.determinant()) * g.inverse();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          trip.emplace_back(mesh.triangles[t][i], mesh.triangles[t][j], qp.weight * e.area * e.grad[i].dot(coef * e.grad[j]));
    }
  }
  return SparseOperator(mesh.vertex_count(), trip, true);
}

SparseOperator assemble_mass(const TriangleMesh& mesh, const MetricField& metric, const PotentialField* weight) {
  std::vector<Eigen::Triplet<double>> trip;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const Element e = element(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (const auto& qp : quadrature::triangle_rule()) {
      const Vec2 x = qp.bary[0] * e.p[0] + qp.bary[1] * e.p[1] + qp.bary[2] * e.p[2];
      double w = qp.weight * e.area * std::sqrt(metric.eval(x).determinant());
      if (weight != nullptr) {
        const VecX& v = weight->values();
        w *= qp.bary[0] * v[tri[0]] + qp.bary[1] * v[tri[1]] + qp.bary[2] * v[tri[2]];
      }
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], w * qp.bary[i] * qp.bary[j]);
    }
  }
  return SparseOperator(mesh.vertex_count(), trip, true);
}

MatX schur_complement(const Discretization& disc, const SparseOperator& op) {
  const Blocks<double> b = partition(op.matrix(), disc.dofs());
  const MatX aii = MatX(b.ii);
  const MatX x = aii.partialPivLu().solve(MatX(b.ib));
  return MatX(b.bb) - MatX(b.bi) * x;
}

EigenSystem eigensystem(const Discretization& disc, const PotentialField& v, int count) {
  const Blocks<double> a = partition(disc.schrodinger(v).matrix(), disc.dofs());
  const Blocks<double> m = partition(disc.mass().matrix(), disc.dofs());
  Eigen::GeneralizedSelfAdjointEigenSolver<MatX> es(MatX(a.ii), MatX(m.ii));
  if (es.info() != Eigen::Success) throw ConvergenceError("dense generalized eigensolve failed");
  EigenSystem sys;
  sys.count = count;
  sys.eigenvalues = es.eigenvalues().head(count);
  sys.vectors = es.eigenvectors().leftCols(count);
  for (int k = 0; k < count; ++k) {
    Eigen::Index idx = 0;
    sys.vectors.col(k).cwiseAbs().maxCoeff(&idx);
    if (sys.vectors(idx, k) < 0.0) sys.vectors.col(k) *= -1.0;
  }
  sys.krylov_dimension = static_cast<int>(a.ii.rows());
  finish_eigensystem(disc, v, sys);
  return sys;
}

}  // namespace dtnlab::reference
