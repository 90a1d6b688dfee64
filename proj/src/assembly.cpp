#include "dtnlab/assembly.hpp"

#include "dtnlab/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace dtnlab {

SparseOperator::SparseOperator(int dimension, const std::vector<Eigen::Triplet<double>>& triplets,
                               bool symmetric)
    : matrix_(dimension, dimension), symmetric_(symmetric) {
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();
}

SparseOperator::SparseOperator(SpMat matrix, bool symmetric) : matrix_(std::move(matrix)), symmetric_(symmetric) {
  matrix_.makeCompressed();
}

std::vector<SparseOperator::Entry> SparseOperator::entries() const {
  std::vector<Entry> out;
  out.reserve(matrix_.nonZeros());
  for (int c = 0; c < matrix_.outerSize(); ++c)
    for (SpMat::InnerIterator it(matrix_, c); it; ++it)
      out.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
  return out;
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  for (int c = 0; c < matrix_.outerSize(); ++c)
    for (SpMat::InnerIterator it(matrix_, c); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

double SparseOperator::asymmetry() const {
  const SpMat diff = matrix_ - SpMat(matrix_.transpose());
  double m = 0.0;
  for (int c = 0; c < diff.outerSize(); ++c)
    for (SpMat::InnerIterator it(diff, c); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

std::string SparseOperator::to_matrix_market() const {
  std::ostringstream out;
  const auto all = entries();
  std::vector<Entry> kept;
  for (const auto& e : all)
    if (!symmetric_ || e.row >= e.col) kept.push_back(e);
  out << "%%MatrixMarket matrix coordinate real " << (symmetric_ ? "symmetric" : "general") << '\n';
  out << dimension() << ' ' << dimension() << ' ' << kept.size() << '\n';
  char buf[64];
  for (const auto& e : kept) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out << e.row + 1 << ' ' << e.col + 1 << ' ' << buf << '\n';
  }
  return out.str();
}

SparseOperator SparseOperator::operator+(const SparseOperator& other) const {
  return SparseOperator(SpMat(matrix_ + other.matrix_), symmetric_ && other.symmetric_);
}

SparseOperator SparseOperator::operator*(double s) const { return SparseOperator(SpMat(s * matrix_), symmetric_); }

DofMap::DofMap(const TriangleMesh& mesh)
    : boundary(mesh.boundary_vertices),
      boundary_of(mesh.vertex_count(), -1),
      interior_of(mesh.vertex_count(), -1) {
  for (int b = 0; b < static_cast<int>(boundary.size()); ++b) boundary_of[boundary[b]] = b;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (boundary_of[v] < 0) {
      interior_of[v] = static_cast<int>(interior.size());
      interior.push_back(v);
    }
  }
}

VecX DofMap::interior_part(const VecX& full) const {
  VecX out(interior_count());
  for (int i = 0; i < interior_count(); ++i) out[i] = full[interior[i]];
  return out;
}

VecX DofMap::boundary_part(const VecX& full) const {
  VecX out(boundary_count());
  for (int b = 0; b < boundary_count(); ++b) out[b] = full[boundary[b]];
  return out;
}

namespace {

template <class Scalar>
Blocks<Scalar> partition_impl(const Eigen::SparseMatrix<Scalar>& a, const DofMap& dofs) {
  using Trip = Eigen::Triplet<Scalar>;
  std::vector<Trip> ii, ib, bi, bb;
  for (int c = 0; c < a.outerSize(); ++c) {
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(a, c); it; ++it) {
      const int r = static_cast<int>(it.row()), col = static_cast<int>(it.col());
      const int ri = dofs.interior_of[r], ci = dofs.interior_of[col];
      const int rb = dofs.boundary_of[r], cb = dofs.boundary_of[col];
      if (ri >= 0 && ci >= 0) ii.emplace_back(ri, ci, it.value());
      else if (ri >= 0) ib.emplace_back(ri, cb, it.value());
      else if (ci >= 0) bi.emplace_back(rb, ci, it.value());
      else bb.emplace_back(rb, cb, it.value());
    }
  }
  const int ni = dofs.interior_count(), nb = dofs.boundary_count();
  Blocks<Scalar> out;
  out.ii.resize(ni, ni);
  out.ib.resize(ni, nb);
  out.bi.resize(nb, ni);
  out.bb.resize(nb, nb);
  out.ii.setFromTriplets(ii.begin(), ii.end());
  out.ib.setFromTriplets(ib.begin(), ib.end());
  out.bi.setFromTriplets(bi.begin(), bi.end());
  out.bb.setFromTriplets(bb.begin(), bb.end());
  return out;
}

struct TriangleGeometry {
  std::array<Vec2, 3> p;
  std::array<Vec2, 3> grad;  // Euclidean gradients of the P1 hat functions
  double area;
};

TriangleGeometry triangle_geometry(const TriangleMesh& mesh, int t) {
  TriangleGeometry geo;
  const auto& tri = mesh.triangles[t];
  for (int k = 0; k < 3; ++k) geo.p[k] = mesh.vertices[tri[k]];
  geo.area = mesh.signed_area(t);
  for (int k = 0; k < 3; ++k) {
    const Vec2 e = geo.p[(k + 2) % 3] - geo.p[(k + 1) % 3];
    geo.grad[k] = Vec2(-e.y(), e.x()) / (2.0 * geo.area);
  }
  return geo;
}

}  // namespace

Blocks<double> partition(const SpMat& a, const DofMap& dofs) { return partition_impl(a, dofs); }
Blocks<Complex> partition(const SpMatC& a, const DofMap& dofs) { return partition_impl(a, dofs); }

ElementMatrices stiffness_elements(const TriangleMesh& mesh, const MetricField& metric) {
  const int nt = mesh.triangle_count();
  ElementMatrices elements(nt);
  const auto& rule = quadrature::triangle_rule();
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const TriangleGeometry geo = triangle_geometry(mesh, t);
    Mat2 coef = Mat2::Zero();
    for (const auto& qp : rule) {
      const Vec2 x = qp.bary[0] * geo.p[0] + qp.bary[1] * geo.p[1] + qp.bary[2] * geo.p[2];
      coef += qp.weight * laplace_coefficient(metric.eval(x));
    }
    coef *= geo.area;
    auto& out = elements[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[3 * i + j] = geo.grad[i].dot(coef * geo.grad[j]);
  }
  return elements;
}

ElementMatrices mass_elements(const TriangleMesh& mesh, const MetricField& metric, const VecX* weight) {
  const int nt = mesh.triangle_count();
  ElementMatrices elements(nt);
  const auto& rule = quadrature::triangle_rule();
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const TriangleGeometry geo = triangle_geometry(mesh, t);
    auto& out = elements[t];
    out.fill(0.0);
    for (const auto& qp : rule) {
      const Vec2 x = qp.bary[0] * geo.p[0] + qp.bary[1] * geo.p[1] + qp.bary[2] * geo.p[2];
      double w = qp.weight * geo.area * std::sqrt(metric.eval(x).determinant());
      if (weight != nullptr) {
        w *= qp.bary[0] * (*weight)[tri[0]] + qp.bary[1] * (*weight)[tri[1]] + qp.bary[2] * (*weight)[tri[2]];
      }
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[3 * i + j] += w * qp.bary[i] * qp.bary[j];
    }
  }
  return elements;
}

SparseOperator scatter_elements(const TriangleMesh& mesh, const ElementMatrices& elements) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * elements.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) triplets.emplace_back(tri[i], tri[j], elements[t][3 * i + j]);
  }
  return SparseOperator(mesh.vertex_count(), triplets, true);
}

SparseOperator assemble_stiffness(const TriangleMesh& mesh, const MetricField& metric) {
  return scatter_elements(mesh, stiffness_elements(mesh, metric));
}

SparseOperator assemble_mass(const TriangleMesh& mesh, const MetricField& metric, const PotentialField* weight) {
  if (weight != nullptr && weight->size() != mesh.vertex_count()) {
    throw ContractError("potential size does not match the mesh vertex count");
  }
  return scatter_elements(mesh, mass_elements(mesh, metric, weight ? &weight->values() : nullptr));
}

SparseOperator assemble_boundary_mass(const TriangleMesh& mesh, const MetricField& metric) {
  const DofMap dofs(mesh);
  const auto& rule = quadrature::segment_rule();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * mesh.boundary_edges.size());
  for (const auto& edge : mesh.boundary_edges) {
    const Vec2& a = mesh.vertices[edge[0]];
    const Vec2& b = mesh.vertices[edge[1]];
    const Vec2 tangent = b - a;
    double local[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (const auto& qp : rule) {
      const Vec2 x = a + qp.s * tangent;
      const double dl = qp.weight * std::sqrt(tangent.dot(metric.eval(x) * tangent));
      const double phi[2] = {1.0 - qp.s, qp.s};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) local[i][j] += dl * phi[i] * phi[j];
    }
    const int ids[2] = {dofs.boundary_of[edge[0]], dofs.boundary_of[edge[1]]};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) triplets.emplace_back(ids[i], ids[j], local[i][j]);
  }
  return SparseOperator(dofs.boundary_count(), triplets, true);
}

std::vector<double> boundary_loop_lengths(const TriangleMesh& mesh, const MetricField& metric) {
  const auto& rule = quadrature::segment_rule();
  std::vector<double> lengths;
  for (const auto& loop : mesh.boundary_loops) {
    double sum = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
      const Vec2& a = mesh.vertices[loop[k]];
      const Vec2& b = mesh.vertices[loop[(k + 1) % loop.size()]];
      const Vec2 tangent = b - a;
      for (const auto& qp : rule) sum += qp.weight * std::sqrt(tangent.dot(metric.eval(a + qp.s * tangent) * tangent));
    }
    lengths.push_back(sum);
  }
  return lengths;
}

}  // namespace dtnlab
