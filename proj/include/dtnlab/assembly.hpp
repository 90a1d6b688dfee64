#pragma once

#include "dtnlab/common.hpp"
#include "dtnlab/fields.hpp"
#include "dtnlab/mesh.hpp"
#include "dtnlab/metric.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace dtnlab {

using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<Complex>;

/// Assembled P1 operator. Duplicate triplets are summed in the fixed
/// triangle order used by the assembler; no computed entry is dropped.
class SparseOperator {
 public:
  struct Entry {
    int row;
    int col;
    double value;
  };

  SparseOperator() = default;
  SparseOperator(int dimension, const std::vector<Eigen::Triplet<double>>& triplets, bool symmetric);
  SparseOperator(SpMat matrix, bool symmetric);

  int dimension() const { return static_cast<int>(matrix_.rows()); }
  bool symmetric() const { return symmetric_; }
  const SpMat& matrix() const { return matrix_; }

  /// Stored entries in column-major order.
  std::vector<Entry> entries() const;
  double max_abs() const;
  /// max |A - A^T| over entries.
  double asymmetry() const;

  /// "%%MatrixMarket matrix coordinate real symmetric" (lower triangle) for
  /// symmetric operators, "... real general" otherwise.
  std::string to_matrix_market() const;

  SparseOperator operator+(const SparseOperator& other) const;
  SparseOperator operator*(double s) const;

 private:
  SpMat matrix_;
  bool symmetric_ = false;
};

/// Split of mesh vertices into boundary DOFs (in boundary loop order) and
/// interior DOFs (in increasing vertex order).
struct DofMap {
  std::vector<int> boundary;      // boundary dof -> vertex
  std::vector<int> interior;      // interior dof -> vertex
  std::vector<int> boundary_of;   // vertex -> boundary dof or -1
  std::vector<int> interior_of;   // vertex -> interior dof or -1

  explicit DofMap(const TriangleMesh& mesh);
  int boundary_count() const { return static_cast<int>(boundary.size()); }
  int interior_count() const { return static_cast<int>(interior.size()); }
  int vertex_count() const { return static_cast<int>(boundary_of.size()); }

  VecX interior_part(const VecX& full) const;
  VecX boundary_part(const VecX& full) const;
  template <class Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> combine(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& interior_values,
                                                    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& boundary_values) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> full(vertex_count());
    for (int i = 0; i < interior_count(); ++i) full[interior[i]] = interior_values[i];
    for (int b = 0; b < boundary_count(); ++b) full[boundary[b]] = boundary_values[b];
    return full;
  }
};

/// Interior/boundary blocks of a vertex-indexed matrix.
template <class Scalar>
struct Blocks {
  Eigen::SparseMatrix<Scalar> ii, ib, bi, bb;
};
Blocks<double> partition(const SpMat& a, const DofMap& dofs);
Blocks<Complex> partition(const SpMatC& a, const DofMap& dofs);

/// Per-triangle 3x3 element matrices, row-major, in triangle order.
using ElementMatrices = std::vector<std::array<double, 9>>;

/// OpenMP element kernels. Each triangle writes only its own slot, so the
/// result is identical for any thread count.
ElementMatrices stiffness_elements(const TriangleMesh& mesh, const MetricField& metric);
ElementMatrices mass_elements(const TriangleMesh& mesh, const MetricField& metric, const VecX* weight);

/// Scatter element matrices into an operator in triangle order.
SparseOperator scatter_elements(const TriangleMesh& mesh, const ElementMatrices& elements);

/// Weak Laplace-Beltrami form: integral of g^{jk} d_j u d_k v sqrt(det g).
SparseOperator assemble_stiffness(const TriangleMesh& mesh, const MetricField& metric);
/// Weighted mass form: integral of w u v sqrt(det g); unit weight if null.
SparseOperator assemble_mass(const TriangleMesh& mesh, const MetricField& metric,
                             const PotentialField* weight = nullptr);
/// Boundary mass on boundary DOFs: integral over each boundary edge of
/// u v with the metric length element.
SparseOperator assemble_boundary_mass(const TriangleMesh& mesh, const MetricField& metric);

/// Metric length of each boundary loop.
std::vector<double> boundary_loop_lengths(const TriangleMesh& mesh, const MetricField& metric);

}  // namespace dtnlab
