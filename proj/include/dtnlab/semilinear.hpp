#pragma once

#include "dtnlab/elliptic.hpp"

#include <string>
#include <variant>
#include <vector>

namespace dtnlab {

/// Scalar profile G with derivative, from a small catalog:
/// sin, linear(a) = s - a, damped_sin = sin(s) / (1 + s^2).
class ScalarProfile {
 public:
  static ScalarProfile from_spec(const CatalogSpec& spec);
  double value(double s) const;
  double derivative(double s) const;
  const CatalogSpec& spec() const { return spec_; }

 private:
  CatalogSpec spec_;
};

/// F(x, s) = V(x) s^m.
struct PowerNonlinearity {
  PotentialField v;
  int m = 2;
};
/// F(x, s) = s G(s).
struct SeparableNonlinearity {
  ScalarProfile g;
};

/// Nonlinearity F(x, s) written as weight(x) * h(s); the weight is the
/// vertex potential for the power variant and 1 otherwise.
class NonlinearitySpec {
 public:
  static NonlinearitySpec power(PotentialField v, int m);
  static NonlinearitySpec separable(ScalarProfile g);

  bool is_power() const { return std::holds_alternative<PowerNonlinearity>(variant_); }
  const PowerNonlinearity& as_power() const { return std::get<PowerNonlinearity>(variant_); }
  const SeparableNonlinearity& as_separable() const { return std::get<SeparableNonlinearity>(variant_); }

  double h(double s) const;
  double dh(double s) const;
  /// Vertex weight, or null for weight 1.
  const VecX* weight() const;
  double weight_sup() const;
  std::string describe() const;

 private:
  std::variant<PowerNonlinearity, SeparableNonlinearity> variant_;
};

/// Galerkin residual K u + N(u) with N(u)_i = integral of w h(u) phi_i, and
/// the Jacobian K + M_{w h'(u)}; nonlinear terms use the element quadrature
/// applied to the P1 interpolant of u.
struct NonlinearResidual {
  VecX residual;
  SparseOperator jacobian;
};
NonlinearResidual nonlinear_residual(const Discretization& disc, const NonlinearitySpec& f, const VecX& u,
                                     bool with_jacobian = true);

/// Radii of the small-solution regime around the constant t_k.
struct WellPosedness {
  double t_k = 0.0;
  double lambda1 = 0.0;  // smallest Dirichlet eigenvalue of -Delta + dF/ds(., t_k)
  double lipschitz = 0.0;
  double delta0 = 0.0;   // min(0.1, lambda1 / (10 lip))
  double delta1 = 0.0;   // 2 delta0
};
WellPosedness well_posedness(const Discretization& disc, const NonlinearitySpec& f, double t_k);

struct SemilinearSolution {
  VecX u;
  VecX flux;  // boundary rows of K u + N(u): the pairing of the Neumann data
  int iterations = 0;
  std::vector<double> residual_history;
  double residual = 0.0;
};

/// Newton solver for -Delta_g u + F(x, u) = 0 with u = t_k + eps f on the
/// boundary, started from u = t_k.
class SemilinearSolver {
 public:
  SemilinearSolver(const Discretization& disc, NonlinearitySpec f, double t_k);
  SemilinearSolver(const Discretization& disc, NonlinearitySpec f, WellPosedness radii);

  SemilinearSolution solve(const BoundaryTrace& f, double eps) const;
  const WellPosedness& radii() const { return radii_; }
  const NonlinearitySpec& nonlinearity() const { return f_; }
  const Discretization& disc() const { return *disc_; }

 private:
  const Discretization* disc_;
  NonlinearitySpec f_;
  WellPosedness radii_;
};

/// Zero-trace solution of -Delta_g v + V = 0.
VecX direct_vm(const Discretization& disc, const PotentialField& v);

struct ExpansionRecord {
  int m = 0;
  std::vector<double> eps_grid;
  std::vector<VecX> solutions;
  std::vector<VecX> coefficients;  // fitted fields at eps^0 .. eps^{m+2}
  VecX vm;                         // fitted coefficient at eps^m
  double vm_rel_error = 0.0;       // L2 against direct_vm
  double max_low_order = 0.0;      // max relative norm at orders 2..m-1
  std::vector<double> remainder_eps;
  std::vector<double> remainder_norms;
  double fitted_exponent = 0.0;
};

/// Higher-order linearization of F = V s^m around t = 0 with trace 1.
ExpansionRecord extract_vm(const Discretization& disc, const PotentialField& v, int m, double eps_max,
                           int half_points = 6);

struct MomentReport {
  double integral_v = 0.0;     // int V
  double integral_v_vm = 0.0;  // int V v_m
  double integral_grad = 0.0;  // int |grad v_m|^2
  double identity_gap = 0.0;   // integral_grad + integral_v_vm
  double fitted_low = 0.0;     // coefficient of eps^{m+1} in the flux pairing
  double fitted_high = 0.0;    // coefficient of eps^{2m}
  double expected_high = 0.0;  // (m+1) int V v_m + int |grad v_m|^2
  std::vector<double> eps_grid;
  std::vector<double> flux_pairing;
};

/// Moment identities and the fit of eps -> int u_eps d_nu u_eps.
MomentReport moment_checks(const Discretization& disc, const PotentialField& v, const VecX& vm, int m, double eps_max,
                           int points = 12);

/// Derivative in eps of the boundary flux at t_k + eps f: by centered
/// differences of Newton solves and by the linear DtN with potential
/// dF/ds(., t_k). Both are returned as boundary pairing vectors.
struct FirstLinearization {
  VecX fd;
  VecX direct;
  double relative_gap = 0.0;  // B-dual norm of (fd - direct) over that of direct
};
FirstLinearization first_linearization(const SemilinearSolver& solver, const BoundaryTrace& f, double eps = 1e-3);

}  // namespace dtnlab
