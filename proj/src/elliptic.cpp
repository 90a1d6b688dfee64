#include "dtnlab/elliptic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dtnlab {

Discretization::Discretization(TriangleMesh mesh, MetricField metric)
    : mesh_(std::move(mesh)), metric_(std::move(metric)), dofs_(mesh_) {
  check_metric_on_mesh(metric_, mesh_);
  if (dofs_.boundary_count() == 0) throw ContractError("mesh has no boundary");
  stiffness_ = assemble_stiffness(mesh_, metric_);
  mass_ = assemble_mass(mesh_, metric_);
  boundary_mass_ = assemble_boundary_mass(mesh_, metric_);
  boundary_dense_ = MatX(boundary_mass_.matrix());
  boundary_llt_.compute(boundary_dense_);
  if (boundary_llt_.info() != Eigen::Success) throw ContractError("boundary mass is not positive definite");
}

SparseOperator Discretization::potential_mass(const PotentialField& v) const { return assemble_mass(mesh_, metric_, &v); }

SparseOperator Discretization::schrodinger(const PotentialField& v) const {
  if (v.is_zero()) return stiffness_;
  return stiffness_ + potential_mass(v);
}

double Discretization::integral(const VecX& a) const { return VecX::Ones(a.size()).dot(mass_.matrix() * a); }

namespace {

constexpr const char* kSingularMessage = "A2 violated (zero is a discrete Dirichlet eigenvalue)";

}  // namespace

DirichletSolver::DirichletSolver(const Discretization& disc, const SparseOperator& op)
    : disc_(&disc), op_(op), blocks_(partition(op.matrix(), disc.dofs())) {
  const int ni = disc.dofs().interior_count();
  ldlt_ = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
  if (ni == 0) return;
  ldlt_->compute(blocks_.ii);
  if (ldlt_->info() != Eigen::Success) throw SingularOperatorError(kSingularMessage);

  // Inverse iteration against the interior mass for the eigenvalue closest to 0.
  const SpMat m_ii = partition(disc.mass().matrix(), disc.dofs()).ii;
  double scale = 0.0;
  for (int i = 0; i < ni; ++i) scale = std::max(scale, std::abs(blocks_.ii.coeff(i, i)) / m_ii.coeff(i, i));
  DeterministicRng rng(0xD1A2ULL);
  VecX x(ni);
  for (int i = 0; i < ni; ++i) x[i] = rng.uniform(-1.0, 1.0);
  for (int it = 0; it < 6; ++it) {
    VecX y = ldlt_->solve(VecX(m_ii * x));
    if (!y.allFinite()) throw SingularOperatorError(kSingularMessage);
    const double n = std::sqrt(y.dot(m_ii * y));
    if (!(n > 0.0) || !std::isfinite(n)) throw SingularOperatorError(kSingularMessage);
    x = y / n;
  }
  smallest_ = std::abs(x.dot(blocks_.ii * x) / x.dot(m_ii * x));
  if (smallest_ <= 1e-10 * scale) throw SingularOperatorError(kSingularMessage);
}

VecX DirichletSolver::solve_interior(const VecX& rhs) const {
  if (rhs.size() == 0) return rhs;
  return ldlt_->solve(rhs);
}

VecX DirichletSolver::solve(const BoundaryTrace& f, const VecX* interior_load) const {
  const DofMap& dofs = disc_->dofs();
  if (f.size() != dofs.boundary_count()) throw ContractError("trace length does not match boundary DOF count");
  VecX rhs = -(blocks_.ib * f);
  if (interior_load != nullptr) rhs += *interior_load;
  return dofs.combine<double>(solve_interior(rhs), f);
}

VecX DirichletSolver::solve_zero_trace(const VecX& load_full) const {
  const DofMap& dofs = disc_->dofs();
  return dofs.combine<double>(solve_interior(dofs.interior_part(load_full)), VecX::Zero(dofs.boundary_count()));
}

MatX DirichletSolver::harmonic_extension() const {
  const int ni = disc_->dofs().interior_count(), nb = disc_->dofs().boundary_count();
  MatX ext(ni, nb);
  if (ni == 0) return ext;
  const MatX rhs = MatX(blocks_.ib);
#pragma omp parallel for schedule(dynamic, 4)
  for (int b = 0; b < nb; ++b) ext.col(b) = -ldlt_->solve(VecX(rhs.col(b)));
  return ext;
}

MatX DirichletSolver::schur_complement(const MatX& extension) const {
  MatX s = MatX(blocks_.bb);
  if (extension.rows() > 0) s += blocks_.bi * extension;
  return s;
}

double interior_residual(const Discretization& disc, const SparseOperator& op, const VecX& u, const VecX* interior_load) {
  const DofMap& dofs = disc.dofs();
  VecX r = dofs.interior_part(op.matrix() * u);
  if (interior_load != nullptr) r -= *interior_load;
  const double scale = op.max_abs() * std::max(u.cwiseAbs().maxCoeff(), 1e-300);
  return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff() / scale;
}

VecX pencil_eigenvalues(const MatX& s, const MatX& b) {
  const MatX sym = 0.5 * (s + s.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<MatX> es(sym, b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("generalized boundary eigenproblem failed");
  return es.eigenvalues();
}

VecX DtNMatrix::generalized_eigenvalues() const { return pencil_eigenvalues(pairing, boundary_mass); }

double DtNMatrix::operator_norm() const { return generalized_eigenvalues().cwiseAbs().maxCoeff(); }

double DtNMatrix::relative_asymmetry() const {
  const double scale = pairing.cwiseAbs().maxCoeff();
  return scale == 0.0 ? 0.0 : (pairing - pairing.transpose()).cwiseAbs().maxCoeff() / scale;
}

VecX solve_dirichlet(const Discretization& disc, const PotentialField& v, const BoundaryTrace& f) {
  const DirichletSolver solver(disc, disc.schrodinger(v));
  return solver.solve(f);
}

DtNMatrix dtn_from_solver(const DirichletSolver& solver, const std::string& potential_label) {
  DtNMatrix out;
  out.pairing = solver.schur_complement(solver.harmonic_extension());
  out.boundary_mass = solver.disc().boundary_mass_dense();
  out.metric = solver.disc().metric().spec().to_string();
  out.potential = potential_label;
  return out;
}

DtNMatrix dtn_matrix(const Discretization& disc, const PotentialField& v) {
  const DirichletSolver solver(disc, disc.schrodinger(v));
  char label[64];
  std::snprintf(label, sizeof label, "vertex field, sup %.6g", v.sup_norm());
  return dtn_from_solver(solver, label);
}

ComplexDtN resolvent_dtn(const Discretization& disc, Complex z) {
  if (z.real() < 0.0) throw ContractError("resolvent_dtn requires Re z >= 0");
  const SpMatC a = disc.stiffness().matrix().cast<Complex>() + z * disc.mass().matrix().cast<Complex>();
  const Blocks<Complex> blocks = partition(a, disc.dofs());
  const int ni = disc.dofs().interior_count();
  ComplexDtN out;
  out.pairing = MatXc(blocks.bb);
  if (ni > 0) {
    Eigen::SparseLU<SpMatC> lu;
    lu.analyzePattern(blocks.ii);
    lu.factorize(blocks.ii);
    if (lu.info() != Eigen::Success) throw SingularOperatorError(kSingularMessage);
    const MatXc ext = lu.solve(MatXc(blocks.ib));
    out.pairing -= blocks.bi * ext;
  }
  out.boundary_mass = disc.boundary_mass_dense();
  out.metric = disc.metric().spec().to_string();
  out.potential = "resolvent";
  out.spectral_parameter = z;
  return out;
}

VecX EigenSystem::vertex_field(const DofMap& dofs, int k) const {
  return dofs.combine<double>(VecX(vectors.col(k)), VecX::Zero(dofs.boundary_count()));
}

void finish_eigensystem(const Discretization& disc, const PotentialField& v, EigenSystem& sys) {
  const DofMap& dofs = disc.dofs();
  const Blocks<double> a = partition(disc.schrodinger(v).matrix(), dofs);
  const Blocks<double> m = partition(disc.mass().matrix(), dofs);
  Eigen::SimplicialLLT<SpMat> m_llt(m.ii);
  const int n = sys.count;
  sys.flux_pairing.resize(dofs.boundary_count(), n);
  sys.flux_traces.resize(dofs.boundary_count(), n);
  sys.residuals.resize(n);
  for (int k = 0; k < n; ++k) {
    const VecX phi = sys.vectors.col(k);
    const double lam = sys.eigenvalues[k];
    const VecX r = a.ii * phi - lam * (m.ii * phi);
    sys.residuals[k] = std::sqrt(std::max(0.0, r.dot(m_llt.solve(r))));
    sys.flux_pairing.col(k) = a.bi * phi - lam * (m.bi * phi);
  }
  sys.flux_traces = disc.to_trace(MatX(sys.flux_pairing));
}

namespace {

// Sign convention: the entry of largest magnitude is positive.
void normalize_sign(MatX& vectors) {
  for (int k = 0; k < vectors.cols(); ++k) {
    Eigen::Index idx = 0;
    vectors.col(k).cwiseAbs().maxCoeff(&idx);
    if (vectors(idx, k) < 0.0) vectors.col(k) *= -1.0;
  }
}

// M-orthonormalize the columns of w (n x b) against q[:, :cols] and among
// themselves; dependent columns are replaced by fresh random directions.
void orthonormalize_block(MatX& w, const MatX& q, const MatX& mq, int cols, const SpMat& m, DeterministicRng& rng) {
  const int n = static_cast<int>(w.rows());
  for (int c = 0; c < w.cols(); ++c) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      const double before = std::sqrt(std::max(0.0, w.col(c).dot(m * w.col(c))));
      for (int pass = 0; pass < 2; ++pass) {
        if (cols > 0) w.col(c) -= q.leftCols(cols) * (mq.leftCols(cols).transpose() * w.col(c));
        for (int p = 0; p < c; ++p) w.col(c) -= w.col(p) * w.col(p).dot(m * w.col(c));
      }
      const double after = std::sqrt(std::max(0.0, w.col(c).dot(m * w.col(c))));
      if (after > 1e-10 * before && after > 0.0) {
        w.col(c) /= after;
        break;
      }
      for (int i = 0; i < n; ++i) w(i, c) = rng.uniform(-1.0, 1.0);
      if (attempt == 3) throw ConvergenceError("Krylov basis exhausted");
    }
  }
}

}  // namespace

EigenSystem dirichlet_eigensystem(const Discretization& disc, const PotentialField& v, int count, const EigenOptions& options) {
  const DofMap& dofs = disc.dofs();
  const int n = dofs.interior_count();
  if (count < 1) throw ContractError("eigensystem count must be positive");
  if (count > 0.2 * n) throw ContractError("eigensystem count exceeds 0.2 x interior DOF count");
  const SpMat a = partition(disc.schrodinger(v).matrix(), dofs).ii;
  const SpMat m = partition(disc.mass().matrix(), dofs).ii;
  const double vmin = v.size() == 0 ? 0.0 : v.values().minCoeff();
  const double sigma = std::min(0.0, vmin) - 1.0;
  Eigen::SimplicialLLT<SpMat> shifted(SpMat(a - sigma * m));
  if (shifted.info() != Eigen::Success) throw ConvergenceError("shifted operator factorization failed");
  Eigen::SimplicialLLT<SpMat> m_llt(m);

  const int b = options.block_size;
  int dim = std::max(2 * count, count + 60);
  dim = std::min(n, (dim + b - 1) / b * b);
  double worst = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    DeterministicRng rng(options.seed);
    const int blocks = (dim + b - 1) / b;
    const int total = std::min(n, blocks * b);
    MatX q = MatX::Zero(n, total), mq = MatX::Zero(n, total), tq = MatX::Zero(n, total);
    MatX w(n, b);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < b; ++c) w(i, c) = rng.uniform(-1.0, 1.0);
    int cols = 0;
    while (cols < total) {
      const int width = std::min(b, total - cols);
      MatX block = w.leftCols(width);
      orthonormalize_block(block, q, mq, cols, m, rng);
      q.middleCols(cols, width) = block;
      mq.middleCols(cols, width) = m * block;
      const MatX image = shifted.solve(MatX(mq.middleCols(cols, width)));
      tq.middleCols(cols, width) = image;
      w = MatX::Zero(n, b);
      w.leftCols(width) = image;
      for (int c = width; c < b; ++c)
        for (int i = 0; i < n; ++i) w(i, c) = rng.uniform(-1.0, 1.0);
      cols += width;
    }
    MatX h = mq.transpose() * tq;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatX> es(h);
    if (es.info() != Eigen::Success) throw ConvergenceError("projected eigenproblem failed");
    // Largest theta <-> smallest lambda.
    EigenSystem sys;
    sys.count = count;
    sys.krylov_dimension = total;
    sys.eigenvalues.resize(count);
    MatX coeffs(total, count);
    for (int k = 0; k < count; ++k) {
      const int idx = total - 1 - k;
      sys.eigenvalues[k] = sigma + 1.0 / es.eigenvalues()[idx];
      coeffs.col(k) = es.eigenvectors().col(idx);
    }
    sys.vectors = q * coeffs;
    normalize_sign(sys.vectors);
    finish_eigensystem(disc, v, sys);
    worst = 0.0;
    bool ok = true;
    for (int k = 0; k < count; ++k) {
      const double rel = sys.residuals[k] / std::max(std::abs(sys.eigenvalues[k]), 1.0);
      worst = std::max(worst, rel);
      if (rel > options.tolerance) ok = false;
    }
    if (ok) return sys;
    if (total == n) break;
    dim = std::min(n, static_cast<int>(std::ceil(1.5 * dim)));
  }
  char msg[160];
  std::snprintf(msg, sizeof msg, "eigensolver did not converge: worst relative residual %.3e > %.1e", worst,
                options.tolerance);
  throw ConvergenceError(msg);
}

double poincare_constant(const Discretization& disc) {
  const EigenSystem sys = dirichlet_eigensystem(disc, PotentialField::zero(disc.mesh().vertex_count()), 1);
  return sys.eigenvalues[0];
}

double smallness_delta(double lambda1) { return std::min(lambda1 / 10.0, 0.1); }

}  // namespace dtnlab
