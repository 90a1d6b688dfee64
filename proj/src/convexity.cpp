#include "dtnlab/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dtnlab {

PotentialField interpolate_potential(const PotentialField& v1, const PotentialField& v2, double t) {
  if (v1.size() != v2.size()) throw ContractError("potentials live on different meshes");
  return PotentialField(VecX((1.0 - t) * v1.values() + t * v2.values()));
}

namespace {

double h_value(const Discretization& disc, const PotentialField& v, const BoundaryTrace& f) {
  const SparseOperator a = disc.schrodinger(v);
  const DirichletSolver solver(disc, a);
  const VecX u = solver.solve(f);
  return u.dot(a.matrix() * u);
}

MatX pairing_of(const Discretization& disc, const PotentialField& v) { return dtn_matrix(disc, v).pairing; }

}  // namespace

std::vector<double> h_curve(const Discretization& disc, const PotentialField& v1, const PotentialField& v2,
                            const BoundaryTrace& f, const std::vector<double>& t_grid) {
  std::vector<double> out(t_grid.size());
  const int n = static_cast<int>(t_grid.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < n; ++k) out[k] = h_value(disc, interpolate_potential(v1, v2, t_grid[k]), f);
  return out;
}

double LinearizationFields::chain_constant(const Discretization& disc, double delta) const {
  const double nv = disc.l2_norm(v);
  if (nv == 0.0) return 0.0;
  const double chain = disc.l2_norm(r) + disc.l2_norm(r_dot) / delta + disc.l2_norm(r_ddot) / (delta * delta);
  return chain / (delta * nv);
}

LinearizationFields linearization_fields(const Discretization& disc, const PotentialField& v1, const PotentialField& q,
                                         const BoundaryTrace& f, double t) {
  const SparseOperator mq = disc.potential_mass(q);
  const SparseOperator a1 = disc.schrodinger(v1);
  const SparseOperator at = disc.schrodinger(PotentialField(VecX(v1.values() + t * q.values())));
  const DirichletSolver s1(disc, a1);
  const DirichletSolver st(disc, at);
  const DofMap& dofs = disc.dofs();

  LinearizationFields out;
  out.t = t;
  out.u0 = s1.solve(f);
  const VecX load_v = -VecX(mq.matrix() * out.u0);
  out.v = s1.solve_zero_trace(load_v);
  const VecX load_r = -VecX(mq.matrix() * out.v);
  out.r = st.solve_zero_trace(load_r);
  const VecX load_rd = -VecX(mq.matrix() * out.r);
  out.r_dot = st.solve_zero_trace(load_rd);
  const VecX load_rdd = -2.0 * VecX(mq.matrix() * out.r_dot);
  out.r_ddot = st.solve_zero_trace(load_rdd);
  out.direct = st.solve(f);

  const VecX recon = out.u0 + t * out.v + t * t * out.r;
  const double scale = out.direct.cwiseAbs().maxCoeff();
  out.reconstruction = scale == 0.0 ? recon.cwiseAbs().maxCoeff() : (recon - out.direct).cwiseAbs().maxCoeff() / scale;

  auto res = [&](const SparseOperator& op, const VecX& u, const VecX& load) {
    if (u.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    const VecX li = dofs.interior_part(load);
    return interior_residual(disc, op, u, &li);
  };
  out.max_residual = std::max({res(a1, out.u0, VecX::Zero(out.u0.size())), res(a1, out.v, load_v), res(at, out.r, load_r),
                               res(at, out.r_dot, load_rd), res(at, out.r_ddot, load_rdd)});
  return out;
}

double hessian_formula(const Discretization& disc, const PotentialField& v1, const PotentialField& q,
                       const LinearizationFields& x) {
  const SpMat mq = disc.potential_mass(q).matrix();
  const SpMat a1 = disc.schrodinger(v1).matrix();
  const double t = x.t;
  const VecX mqv = mq * x.v;
  return -2.0 * x.v.dot(a1 * x.v) + 6.0 * t * x.v.dot(mqv) + 12.0 * t * t * x.r.dot(mqv) +
         8.0 * t * t * t * x.r_dot.dot(mqv) + t * t * t * t * x.r_ddot.dot(mqv);
}

double hessian_fd(const Discretization& disc, const PotentialField& v1, const PotentialField& v2, const BoundaryTrace& f,
                  double t, double dt) {
  // Increments H(t + s) - H(t) = s u_t^T M_q u_{t+s} hold exactly for the
  // Galerkin solutions and avoid cancellation between nearly equal H values.
  const SpMat mq = disc.potential_mass(v2 - v1).matrix();
  const std::vector<double> steps = {-dt, -0.5 * dt, 0.5 * dt, dt};
  const VecX center = solve_dirichlet(disc, interpolate_potential(v1, v2, t), f);
  const VecX mq_center = mq * center;
  std::vector<double> inc(steps.size());
  const int n = static_cast<int>(steps.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < n; ++k) {
    const VecX u = solve_dirichlet(disc, interpolate_potential(v1, v2, t + steps[k]), f);
    inc[k] = steps[k] * mq_center.dot(u);
  }
  const double coarse = (inc[0] + inc[3]) / (dt * dt);
  const double fine = (inc[1] + inc[2]) / (0.25 * dt * dt);
  return (4.0 * fine - coarse) / 3.0;
}

GapResult operator_combination_gap(const Discretization& disc, const PotentialField& v1, const PotentialField& v2, double t) {
  const MatX s1 = pairing_of(disc, v1);
  const MatX s2 = pairing_of(disc, v2);
  const MatX st = pairing_of(disc, interpolate_potential(v1, v2, t));
  const MatX gap = st - (1.0 - t) * s1 - t * s2;
  GapResult out;
  out.min_eigenvalue = pencil_eigenvalues(gap, disc.boundary_mass_dense())[0];
  out.lambda_norm = pencil_eigenvalues(st, disc.boundary_mass_dense()).cwiseAbs().maxCoeff();
  return out;
}

RigidityScan deformation_rigidity_scan(const Discretization& disc, const PotentialField& v, const std::vector<double>& t_list,
                                       double fd_step) {
  const MatX& b = disc.boundary_mass_dense();
  const int nv = disc.mesh().vertex_count();
  const DirichletSolver laplace(disc, disc.stiffness());
  const MatX s0 = dtn_from_solver(laplace, "zero").pairing;
  RigidityScan scan;
  for (double t : t_list) {
    const MatX st = pairing_of(disc, v * t);
    scan.rows.push_back({t, pencil_eigenvalues(st - s0, b).cwiseAbs().maxCoeff()});
  }
  // Slope: U^T M_V U with U the harmonic extensions of the boundary hats.
  const DofMap& dofs = disc.dofs();
  const MatX ext = laplace.harmonic_extension();
  MatX u = MatX::Zero(nv, dofs.boundary_count());
  for (int i = 0; i < dofs.interior_count(); ++i) u.row(dofs.interior[i]) = ext.row(i);
  for (int k = 0; k < dofs.boundary_count(); ++k) u(dofs.boundary[k], k) = 1.0;
  const MatX slope = u.transpose() * (disc.potential_mass(v).matrix() * u);
  scan.slope = pencil_eigenvalues(slope, b).cwiseAbs().maxCoeff();
  const MatX plus = pairing_of(disc, v * fd_step);
  const MatX minus = pairing_of(disc, v * (-fd_step));
  scan.fd_slope = pencil_eigenvalues((plus - minus) / (2.0 * fd_step), b).cwiseAbs().maxCoeff();
  scan.fd_step = fd_step;
  return scan;
}

std::vector<ConvexityCurveRow> convexity_curve(const Discretization& disc, const PotentialField& v1,
                                               const PotentialField& v2, const BoundaryTrace& f) {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(0.1 * k);
  const std::vector<double> h = h_curve(disc, v1, v2, f, grid);
  const PotentialField q = v2 - v1;
  std::vector<ConvexityCurveRow> rows;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const LinearizationFields fields = linearization_fields(disc, v1, q, f, grid[k]);
    rows.push_back({grid[k], h[k], hessian_formula(disc, v1, q, fields), hessian_fd(disc, v1, v2, f, grid[k]),
                    operator_combination_gap(disc, v1, v2, grid[k]).min_eigenvalue});
  }
  return rows;
}

std::string convexity_csv(const std::vector<ConvexityCurveRow>& rows) {
  std::ostringstream out;
  out << "t,H,H2_formula,H2_fd,gap_min_eig\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.3f,%.17g,%.17g,%.17g,%.17g\n", r.t, r.h, r.hessian_formula, r.hessian_fd, r.gap_min_eig);
    out << buf;
  }
  return out.str();
}

std::vector<ConvexityTriple> convexity_catalog(const TriangleMesh& mesh, double delta) {
  const double a = delta;
  const double pi = 3.14159265358979323846;
  auto field = [&](auto fn) { return PotentialField::sample(mesh, fn); };
  auto trace = [&](const char* key) { return make_trace(CatalogSpec::parse(key), mesh); };
  const PotentialField zero = PotentialField::zero(mesh.vertex_count());
  const PotentialField base = field([&](const Vec2& x) { return 0.5 * a * std::sin(pi * x.x()); });
  std::vector<ConvexityTriple> cat;
  cat.push_back({"zero-vs-quadratic", zero, field([&](const Vec2& x) { return 0.5 * a * x.x() * x.x(); }), trace("fourier:k=1")});
  cat.push_back({"constant-vs-gaussian", PotentialField::constant(mesh.vertex_count(), 0.5 * a),
                 field([&](const Vec2& x) { return a * std::exp(-x.squaredNorm() / 0.25); }), trace("one")});
  cat.push_back({"negative-vs-positive", PotentialField::constant(mesh.vertex_count(), -0.8 * a),
                 PotentialField::constant(mesh.vertex_count(), 0.8 * a), trace("fourier:k=2")});
  cat.push_back({"linear-vs-zero", field([&](const Vec2& x) { return a * x.x(); }), zero, trace("x")});
  cat.push_back({"trig-pair", random_trig_potential(mesh, a, 11), random_trig_potential(mesh, a, 12), trace("fourier:k=3")});
  cat.push_back({"trig-pair-b", random_trig_potential(mesh, a, 13), random_trig_potential(mesh, a, 14), trace("xy")});
  const PotentialField same = random_trig_potential(mesh, a, 15);
  cat.push_back({"equal", same, same, trace("fourier:k=1")});
  cat.push_back({"threshold-difference", base,
                 base + field([&](const Vec2& x) { return 1.1e-3 * (1.0 + 0.5 * std::cos(pi * x.y())) / 1.5; }),
                 trace("fourier:k=1,phase=0.3")});
  cat.push_back({"shifted-gaussians", field([&](const Vec2& x) { return a * std::exp(-(x - Vec2(0.3, 0.0)).squaredNorm() / 0.2); }),
                 field([&](const Vec2& x) { return a * std::exp(-(x - Vec2(-0.3, 0.2)).squaredNorm() / 0.2); }),
                 trace("fourier:k=2,phase=0.5")});
  cat.push_back({"quadratic-vs-constant", field([&](const Vec2& x) { return a * x.x() * x.x(); }),
                 PotentialField::constant(mesh.vertex_count(), -0.5 * a), trace("x2y2")});
  return cat;
}

}  // namespace dtnlab
