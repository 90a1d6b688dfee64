#pragma once

#include "dtnlab/elliptic.hpp"
#include "dtnlab/semilinear.hpp"

#include <string>
#include <vector>

namespace dtnlab {

/// Dirichlet eigensystem of -Delta_g with reference value mu > 0.
struct SpectralTraceData {
  EigenSystem eigen;
  double mu = 0.0;

  static SpectralTraceData build(const Discretization& disc, int count, double mu);
  int count() const { return eigen.count; }
  /// (f, psi_k) in the boundary B-pairing, i.e. f^T R_k.
  VecX coefficients(const BoundaryTrace& f) const;
};

struct CoefficientCheck {
  int count = 0;
  double max_rel_gap = 0.0;  // |(f, psi_k) + lambda_k (u0, phi_k)_M| / (lambda_k ||u0||_M)
  std::vector<double> gaps;
};
CoefficientCheck coefficient_identity(const Discretization& disc, const SpectralTraceData& data, const BoundaryTrace& f);

/// Sum over k <= N of (f, psi_k) / ((lambda_k + z)(lambda_k + mu)) psi_k.
VecXc zeta_partial(const SpectralTraceData& data, const BoundaryTrace& f, Complex z, int n);

/// Trace of the mass Schur complement M_BB - M_BI M_II^{-1} M_IB applied to f.
/// The discrete resolvent difference carries this term on top of the eigen
/// sum; it is O(h) and vanishes in the continuum.
VecX mass_layer_term(const Discretization& disc, const BoundaryTrace& f);

/// Pairing vector Lambda(z) f of -Delta_g + z.
VecXc resolvent_apply(const Discretization& disc, Complex z, const BoundaryTrace& f);

/// (Lambda(z) f - Lambda(mu) f) / (z - mu) as a trace.
VecXc zeta_direct(const Discretization& disc, const BoundaryTrace& f, Complex z, double mu);

struct ResolventConvergence {
  Complex z;
  std::vector<int> schedule;
  std::vector<double> errors;  // ||zeta_partial(N) + mass layer - zeta_direct||_B
  double direct_norm = 0.0;
};
ResolventConvergence resolvent_convergence(const Discretization& disc, const SpectralTraceData& data,
                                           const BoundaryTrace& f, Complex z, const std::vector<int>& schedule);

/// max over z of ||zeta_partial(N)||_B / ||f||_B.
double uniform_bound(const Discretization& disc, const SpectralTraceData& data, const BoundaryTrace& f, int n,
                     const std::vector<Complex>& zs);

struct ZetaGapRow {
  Complex z;
  double gap = 0.0;       // ||zeta^(1)(z) - zeta^(2)(z)||_B (first metric's B)
  double relative = 0.0;  // gap over ||zeta^(1)(z)||_B
};
struct ZetaGapReport {
  std::vector<ZetaGapRow> rows;
  std::vector<ZetaGapRow> mu_rows;  // along z = mu_k
  double max_gap = 0.0;
};
/// Both discretizations must share the mesh.
ZetaGapReport zeta_gap_audit(const Discretization& first, const Discretization& second, const BoundaryTrace& f,
                             const std::vector<Complex>& zs, double mu, const std::vector<double>& mu_sequence = {});

/// w = (1 + z) / (1 - z) and its inverse.
Complex mobius(Complex z);
Complex mobius_inverse(Complex w);

struct BlaschkeSequence {
  std::string descriptor;
  std::vector<double> zeros;    // t_k
  std::vector<double> mu;       // t_k G'(t_k)
  std::vector<double> r;        // (mu_k - 1) / (1 + mu_k)
  std::vector<double> inverse_sum;   // partial sums of 1 / mu_k
  std::vector<double> blaschke_sum;  // partial sums of 1 - |r_k|
  std::vector<double> identity_sum;  // partial sums of 2 / (1 + mu_k)
  double max_residual = 0.0;         // max |G(t_k)|
  double max_identity_gap = 0.0;
  bool monotone = true;
  int divergence_k = 0;
  double increment = 0.0;        // S_{10K} - S_K
  double model_increment = 0.0;  // (2 / c) ln 10 with mu_k ~ c k
  bool divergence_established = false;
  std::string message;
};
/// Qualifying zeros (mu_k > 1) of G on (0, t_max], at most k_max of them.
BlaschkeSequence blaschke_audit(const ScalarProfile& g, int k_max, double t_max = 1e5, int divergence_k = 100);
std::string blaschke_csv(const BlaschkeSequence& seq);

}  // namespace dtnlab
