#pragma once

#include "dtnlab/elliptic.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace dtnlab {

// ---------------------------------------------------------------------------
// Finite-difference lab on uniform boxes in dimension 2 or 3.

using PointFn = std::function<double(const std::array<double, 3>&)>;

/// Analytic triple (c, u, g) with g diagonal; coordinates beyond n are zero.
struct ConformalCase {
  std::string name;
  PointFn c;
  PointFn u;
  std::array<PointFn, 3> g_diag;
};

/// Uniform grid on [lo, hi]^n with `points` nodes per axis.
struct GridField {
  int n = 2;
  int points = 0;
  double lo = -1.0;
  double hi = 1.0;
  int margin = 4;  // two 4th-order stencil half-widths
  double spacing() const { return (hi - lo) / (points - 1); }
};

struct ConformalResidual {
  double residual = 0.0;  // max |LHS - RHS| over interior nodes
  double v_sup = 0.0;     // max |V| over interior nodes
};

/// Residual of -Delta_{cg} u = c^{-(n+2)/4} (-Delta_g + V)(c^{(n-2)/4} u),
/// V = c^{-(n-2)/4} Delta_g c^{(n-2)/4}, every Laplacian in divergence form
/// with 4th-order central differences.
ConformalResidual conformal_potential_residual(const ConformalCase& cc, const GridField& grid);

/// Residuals on `points`, 2*points-1, 4*points-3 nodes and the observed
/// orders log2(r_k / r_{k+1}).
struct ConvergenceStudy {
  std::vector<double> spacings;
  std::vector<double> residuals;
  std::vector<double> orders;
  double v_sup_max = 0.0;
};
ConvergenceStudy conformal_convergence(const ConformalCase& cc, int n, int points);

/// Built-in cases: identity factor, bump factor with a Euclidean metric,
/// and a bump factor over a diagonal non-flat metric.
std::vector<ConformalCase> conformal_catalog();

// ---------------------------------------------------------------------------
// Mesh identities.

/// Smooth positive test field given with gradient and Hessian.
struct AnalyticField {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;
  std::function<Mat2(const Vec2&)> hessian;

  static AnalyticField constant(double c);
  /// w(r) = 2 - r^2 + r^4 / 2, so w'(1) = 0 on the unit circle.
  static AnalyticField neumann_radial();
};

struct IbpChain {
  double lhs_a = 0.0;  // integral of Delta_g w / w
  double lhs_b = 0.0;  // -integral of <grad w, grad w^{-1}>_g
  double lhs_c = 0.0;  // integral of w^{-2} |grad w|_g^2
  double max_grad = 0.0;
};

/// Three integrals of the chain 0 = int Delta w / w = -int <dw, d(1/w)> =
/// int |dw|^2 / w^2, each by element quadrature of analytic integrands.
IbpChain ibp_chain_check(const Discretization& disc, const AnalyticField& w);

struct RigiditySplit {
  VecX u_dot;      // K u_dot + M_V 1 = 0 on interior rows, zero trace
  VecX remainder;  // (K + M_V) r + M_V u_dot = 0 on interior rows, zero trace
  VecX u;          // 1 + u_dot + r
  VecX direct;     // direct solve with trace 1
  double residual_u_dot = 0.0;
  double residual_remainder = 0.0;
  double residual_u = 0.0;
  double reconstruction_gap = 0.0;  // max |u - direct| / max |direct|
  double u_dot_l2 = 0.0;
  double remainder_h1 = 0.0;
  double v_sup = 0.0;
  /// ||r||_{H^1} / (||V||_inf ||u_dot||_{L^2}); zero when u_dot vanishes.
  double ratio() const;
};

/// Split of the solution with trace 1; requires ||V||_inf <= delta.
RigiditySplit rigidity_split(const Discretization& disc, const PotentialField& v, double delta);

struct RigidityReport {
  double lhs = 0.0;               // integral |grad u_dot|^2
  double rhs = 0.0;               // integral V u_dot r + integral V u_dot^2
  double gap = 0.0;               // lhs - rhs
  double mean = 0.0;              // integral V
  double boundary_term = 0.0;     // 1^T Lambda_V 1
  double reconstructed = 0.0;     // mean - boundary_term (Galerkin value of the gap)
  double lambda1 = 0.0;
  double delta = 0.0;
  double constant = 0.0;          // measured C
  bool contraction_rhs = false;   // |rhs| <= (delta + C delta^2) ||u_dot||^2
  bool poincare_lhs = false;      // lhs >= lambda1 ||u_dot||^2 (within rounding)
};

RigidityReport rigidity_identity_check(const Discretization& disc, const RigiditySplit& split, const PotentialField& v,
                                       double lambda1, double delta, double constant);

/// Integral of V dV_g as 1^T M_V 1.
double mean_zero(const Discretization& disc, const PotentialField& v);

/// Largest split ratio over `draws` random trigonometric potentials of sup
/// norm delta (seeds seed, seed+1, ...), draws evaluated in parallel.
double measure_split_constant(const Discretization& disc, double delta, int draws, std::uint64_t seed);

}  // namespace dtnlab
