#pragma once

#include "dtnlab/assembly.hpp"
#include "dtnlab/common.hpp"
#include "dtnlab/fields.hpp"
#include "dtnlab/mesh.hpp"
#include "dtnlab/metric.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <memory>
#include <string>

namespace dtnlab {

/// Mesh + metric with the potential-independent operators assembled once.
class Discretization {
 public:
  Discretization(TriangleMesh mesh, MetricField metric);

  const TriangleMesh& mesh() const { return mesh_; }
  const MetricField& metric() const { return metric_; }
  const DofMap& dofs() const { return dofs_; }
  const SparseOperator& stiffness() const { return stiffness_; }
  const SparseOperator& mass() const { return mass_; }
  const SparseOperator& boundary_mass() const { return boundary_mass_; }
  const MatX& boundary_mass_dense() const { return boundary_dense_; }

  /// Mass weighted by the potential.
  SparseOperator potential_mass(const PotentialField& v) const;
  /// K + M_V.
  SparseOperator schrodinger(const PotentialField& v) const;

  /// B^{-1} p for a boundary pairing vector p.
  template <class Vec>
  Vec to_trace(const Vec& pairing) const { return boundary_llt_.solve(pairing); }
  /// sqrt(f^H B f) for a boundary trace.
  template <class Vec>
  double b_norm(const Vec& trace) const {
    return std::sqrt(std::abs(trace.dot(boundary_dense_.template cast<typename Vec::Scalar>() * trace)));
  }
  /// B-norm of the trace represented by a pairing vector: sqrt(p^H B^{-1} p).
  template <class Vec>
  double dual_norm(const Vec& pairing) const {
    return std::sqrt(std::abs(pairing.dot(to_trace(pairing))));
  }
  /// L2(M) inner product and norm for vertex fields.
  double l2_dot(const VecX& a, const VecX& b) const { return a.dot(mass_.matrix() * b); }
  double l2_norm(const VecX& a) const { return std::sqrt(l2_dot(a, a)); }
  double energy(const VecX& a) const { return a.dot(stiffness_.matrix() * a); }
  /// Integral of a vertex field against the unit mass (1^T M u).
  double integral(const VecX& a) const;

 private:
  TriangleMesh mesh_;
  MetricField metric_;
  DofMap dofs_;
  SparseOperator stiffness_;
  SparseOperator mass_;
  SparseOperator boundary_mass_;
  MatX boundary_dense_;
  Eigen::LLT<MatX> boundary_llt_;
};

/// Factorization of the interior block of a real operator, with a check
/// that zero is not a discrete Dirichlet eigenvalue.
class DirichletSolver {
 public:
  /// `op` is a vertex-indexed operator such as K + M_V.
  DirichletSolver(const Discretization& disc, const SparseOperator& op);

  /// Full vertex field u with u = f on the boundary and interior rows of
  /// op * u equal to `interior_load` (zero if null).
  VecX solve(const BoundaryTrace& f, const VecX* interior_load = nullptr) const;
  /// Interior block solve A_II x = rhs.
  VecX solve_interior(const VecX& rhs) const;
  /// Interior-zero-trace solution embedded in a vertex field: interior rows
  /// of op * u equal `load_full` restricted to interior rows.
  VecX solve_zero_trace(const VecX& load_full) const;

  /// Discrete harmonic extension (interior x boundary): columns solved in
  /// parallel, each writing its own column.
  MatX harmonic_extension() const;
  /// Schur complement S = A_BB + A_BI E, E the harmonic extension.
  MatX schur_complement(const MatX& extension) const;

  /// Smallest |mu| with A_II x = mu M_II x, estimated by inverse iteration.
  double smallest_eigen_estimate() const { return smallest_; }
  const Blocks<double>& blocks() const { return blocks_; }
  const SparseOperator& op() const { return op_; }
  const Discretization& disc() const { return *disc_; }

 private:
  const Discretization* disc_;
  SparseOperator op_;
  Blocks<double> blocks_;
  std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt_;
  double smallest_ = 0.0;
};

/// Relative residual of interior rows of op * u (against the given load).
double interior_residual(const Discretization& disc, const SparseOperator& op, const VecX& u,
                         const VecX* interior_load = nullptr);

/// Boundary operator in a boundary nodal basis. `pairing` is the bilinear
/// form f^T S h = integral over the boundary of f * Lambda(h); as an
/// operator on traces it acts as B^{-1} S.
template <class Scalar>
struct BoundaryOperator {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Mat pairing;
  MatX boundary_mass;
  std::string metric;
  std::string potential;
  Complex spectral_parameter{0.0, 0.0};

  int size() const { return static_cast<int>(pairing.rows()); }
  Vec apply(const Vec& trace) const {
    return Eigen::LLT<MatX>(boundary_mass).solve(Vec(pairing * trace));
  }
  Scalar quadratic(const Vec& f) const { return f.transpose() * pairing * f; }
};

struct DtNMatrix : BoundaryOperator<double> {
  /// Generalized eigenvalues of (S, B), ascending.
  VecX generalized_eigenvalues() const;
  /// Operator norm in the B-norm (largest |generalized eigenvalue|).
  double operator_norm() const;
  double relative_asymmetry() const;
};

using ComplexDtN = BoundaryOperator<Complex>;

/// Generalized eigenvalues of a symmetric pencil (S, B), ascending.
VecX pencil_eigenvalues(const MatX& s, const MatX& b);

/// Solve (-Delta_g + V) u = 0 with u = f on the boundary.
VecX solve_dirichlet(const Discretization& disc, const PotentialField& v, const BoundaryTrace& f);
/// Dirichlet-to-Neumann map of -Delta_g + V as a Schur complement.
DtNMatrix dtn_matrix(const Discretization& disc, const PotentialField& v);
/// DtN of a prepared solver (reuses its factorization).
DtNMatrix dtn_from_solver(const DirichletSolver& solver, const std::string& potential_label);
/// DtN of -Delta_g + z for complex z with Re z >= 0.
ComplexDtN resolvent_dtn(const Discretization& disc, Complex z);

/// Dirichlet eigenpairs of K + M_V against M on interior DOFs, with the
/// variational boundary fluxes of each eigenfunction.
struct EigenSystem {
  int count = 0;
  VecX eigenvalues;        // ascending
  MatX vectors;            // interior x count, M-orthonormal
  MatX flux_pairing;       // boundary x count: R_k = (A - lambda_k M)_{BI} phi_k
  MatX flux_traces;        // boundary x count: psi_k = B^{-1} R_k
  VecX residuals;          // ||A phi - lambda M phi||_{M^{-1}}
  int krylov_dimension = 0;

  /// Embed eigenvector k into a vertex field (zero on the boundary).
  VecX vertex_field(const DofMap& dofs, int k) const;
};

struct EigenOptions {
  double tolerance = 1e-10;         // residual relative to max(|lambda|, 1)
  int max_restarts = 8;             // Krylov dimension grows 1.5x per restart
  int block_size = 4;
  std::uint64_t seed = 0x5eed1234ULL;
};

/// Shift-invert block Krylov eigensolver with full reorthogonalization.
/// Requires N <= 0.2 * interior DOF count.
EigenSystem dirichlet_eigensystem(const Discretization& disc, const PotentialField& v, int count,
                                  const EigenOptions& options = {});

/// Fill fluxes and residuals of an eigensystem whose values/vectors are set.
void finish_eigensystem(const Discretization& disc, const PotentialField& v, EigenSystem& sys);

/// Smallest Dirichlet eigenvalue of -Delta_g.
double poincare_constant(const Discretization& disc);

/// Smallness threshold for potentials: min(lambda_1 / 10, 0.1).
double smallness_delta(double lambda1);

}  // namespace dtnlab
