#pragma once

#include "dtnlab/elliptic.hpp"

#include <string>
#include <vector>

namespace dtnlab {

/// Potential on the segment (1 - t) V1 + t V2.
PotentialField interpolate_potential(const PotentialField& v1, const PotentialField& v2, double t);

/// H_f(t) = f^T S_t f with S_t the DtN pairing of (1 - t) V1 + t V2.
std::vector<double> h_curve(const Discretization& disc, const PotentialField& v1, const PotentialField& v2,
                            const BoundaryTrace& f, const std::vector<double>& t_grid);

/// Fields of the expansion u_t = u0 + t v + t^2 r_t, all with one shared
/// factorization per t.
struct LinearizationFields {
  double t = 0.0;
  VecX u0, v, r, r_dot, r_ddot;
  VecX direct;                  // direct solve at t
  double reconstruction = 0.0;  // max |u0 + t v + t^2 r - direct| / max |direct|
  double max_residual = 0.0;    // worst relative residual of the five equations
  /// ||r|| + ||r'|| / delta + ||r''|| / delta^2 over delta ||v|| (L2 norms).
  double chain_constant(const Discretization& disc, double delta) const;
};

LinearizationFields linearization_fields(const Discretization& disc, const PotentialField& v1, const PotentialField& q,
                                         const BoundaryTrace& f, double t);

/// Five-term closed form of H''_f(t).
double hessian_formula(const Discretization& disc, const PotentialField& v1, const PotentialField& q,
                       const LinearizationFields& fields);

/// Second central difference of H at t with step dt, Richardson-extrapolated
/// once with dt / 2.
double hessian_fd(const Discretization& disc, const PotentialField& v1, const PotentialField& v2, const BoundaryTrace& f,
                  double t, double dt = 1e-2);

struct GapResult {
  double min_eigenvalue = 0.0;  // of (S_t - (1 - t) S_1 - t S_2, B)
  double lambda_norm = 0.0;     // ||S_t||_B
};
GapResult operator_combination_gap(const Discretization& disc, const PotentialField& v1, const PotentialField& v2, double t);

struct RigidityScanRow {
  double t = 0.0;
  double difference = 0.0;  // ||Lambda_{tV} - Lambda_0||_B
};
struct RigidityScan {
  std::vector<RigidityScanRow> rows;
  double slope = 0.0;     // ||U^T M_V U||_B, the derivative at t = 0
  double fd_slope = 0.0;  // ||Lambda_{hV} - Lambda_{-hV}||_B / (2h)
  double fd_step = 0.0;
};
RigidityScan deformation_rigidity_scan(const Discretization& disc, const PotentialField& v, const std::vector<double>& t_list,
                                       double fd_step = 1e-4);

/// One row of the exported curve.
struct ConvexityCurveRow {
  double t, h, hessian_formula, hessian_fd, gap_min_eig;
};
/// Curve on the 11-point grid t = 0, 0.1, ..., 1.
std::vector<ConvexityCurveRow> convexity_curve(const Discretization& disc, const PotentialField& v1,
                                               const PotentialField& v2, const BoundaryTrace& f);
std::string convexity_csv(const std::vector<ConvexityCurveRow>& rows);

/// Catalog triple for the concavity checks.
struct ConvexityTriple {
  std::string name;
  PotentialField v1;
  PotentialField v2;
  BoundaryTrace f;
};
/// Ten triples on the given mesh with sup norms at most delta.
std::vector<ConvexityTriple> convexity_catalog(const TriangleMesh& mesh, double delta);

}  // namespace dtnlab
