#include "dtnlab/semilinear.hpp"

#include "dtnlab/quadrature.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dtnlab {

ScalarProfile ScalarProfile::from_spec(const CatalogSpec& spec) {
  if (spec.key == "sin" || spec.key == "damped_sin") {
    spec.require_only({});
  } else if (spec.key == "linear") {
    spec.require_only({"a"});
  } else {
    throw ContractError("unknown profile key '" + spec.key + "'");
  }
  ScalarProfile p;
  p.spec_ = spec;
  return p;
}

double ScalarProfile::value(double s) const {
  if (spec_.key == "sin") return std::sin(s);
  if (spec_.key == "linear") return s - spec_.get("a", 0.0);
  return std::sin(s) / (1.0 + s * s);
}

double ScalarProfile::derivative(double s) const {
  if (spec_.key == "sin") return std::cos(s);
  if (spec_.key == "linear") return 1.0;
  const double d = 1.0 + s * s;
  return std::cos(s) / d - 2.0 * s * std::sin(s) / (d * d);
}

NonlinearitySpec NonlinearitySpec::power(PotentialField v, int m) {
  if (m < 2) throw ContractError("power nonlinearity needs m >= 2");
  NonlinearitySpec out;
  out.variant_ = PowerNonlinearity{std::move(v), m};
  return out;
}

NonlinearitySpec NonlinearitySpec::separable(ScalarProfile g) {
  NonlinearitySpec out;
  out.variant_ = SeparableNonlinearity{std::move(g)};
  return out;
}

double NonlinearitySpec::h(double s) const {
  if (is_power()) return std::pow(s, as_power().m);
  return s * as_separable().g.value(s);
}

double NonlinearitySpec::dh(double s) const {
  if (is_power()) {
    const int m = as_power().m;
    return m * std::pow(s, m - 1);
  }
  const ScalarProfile& g = as_separable().g;
  return g.value(s) + s * g.derivative(s);
}

const VecX* NonlinearitySpec::weight() const { return is_power() ? &as_power().v.values() : nullptr; }

double NonlinearitySpec::weight_sup() const { return is_power() ? as_power().v.sup_norm() : 1.0; }

std::string NonlinearitySpec::describe() const {
  if (is_power()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "power:m=%d,sup=%.6g", as_power().m, as_power().v.sup_norm());
    return buf;
  }
  return "separable:" + as_separable().g.spec().to_string();
}

NonlinearResidual nonlinear_residual(const Discretization& disc, const NonlinearitySpec& f, const VecX& u,
                                     bool with_jacobian) {
  const TriangleMesh& mesh = disc.mesh();
  const MetricField& metric = disc.metric();
  const VecX* w = f.weight();
  const int nt = mesh.triangle_count();
  std::vector<std::array<double, 3>> vecs(nt);
  ElementMatrices mats(with_jacobian ? nt : 0);
  const auto& rule = quadrature::triangle_rule();
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.signed_area(t);
    auto& vec = vecs[t];
    vec.fill(0.0);
    if (with_jacobian) mats[t].fill(0.0);
    for (const auto& qp : rule) {
      const Vec2 x = qp.bary[0] * mesh.vertices[tri[0]] + qp.bary[1] * mesh.vertices[tri[1]] +
                     qp.bary[2] * mesh.vertices[tri[2]];
      double dv = qp.weight * area * std::sqrt(metric.eval(x).determinant());
      if (w != nullptr) dv *= qp.bary[0] * (*w)[tri[0]] + qp.bary[1] * (*w)[tri[1]] + qp.bary[2] * (*w)[tri[2]];
      const double uq = qp.bary[0] * u[tri[0]] + qp.bary[1] * u[tri[1]] + qp.bary[2] * u[tri[2]];
      const double hv = dv * f.h(uq);
      for (int i = 0; i < 3; ++i) vec[i] += hv * qp.bary[i];
      if (with_jacobian) {
        const double dh = dv * f.dh(uq);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) mats[t][3 * i + j] += dh * qp.bary[i] * qp.bary[j];
      }
    }
  }
  NonlinearResidual out;
  out.residual = disc.stiffness().matrix() * u;
  for (int t = 0; t < nt; ++t)
    for (int i = 0; i < 3; ++i) out.residual[mesh.triangles[t][i]] += vecs[t][i];
  if (with_jacobian) out.jacobian = disc.stiffness() + scatter_elements(mesh, mats);
  return out;
}

WellPosedness well_posedness(const Discretization& disc, const NonlinearitySpec& f, double t_k) {
  const int nv = disc.mesh().vertex_count();
  WellPosedness r;
  r.t_k = t_k;
  if (f.weight_sup() * std::abs(f.h(t_k)) > 1e-12 * std::max(1.0, std::abs(t_k)))
    throw ContractError("t_k is not a zero of the nonlinearity");
  const VecX lin = f.weight() != nullptr ? VecX(*f.weight() * f.dh(t_k)) : VecX::Constant(nv, f.dh(t_k));
  r.lambda1 = dirichlet_eigensystem(disc, PotentialField(lin), 1).eigenvalues[0];
  if (!(r.lambda1 > 0.0)) throw ContractError("linearized operator at t_k is not positive; no small-solution radius");
  constexpr int kSamples = 400;
  for (int i = 0; i < kSamples; ++i) {
    const double s0 = t_k - 1.0 + 2.0 * i / kSamples;
    const double s1 = t_k - 1.0 + 2.0 * (i + 1) / kSamples;
    r.lipschitz = std::max(r.lipschitz, std::abs(f.dh(s1) - f.dh(s0)) / (s1 - s0));
  }
  r.lipschitz *= f.weight_sup();
  r.delta0 = r.lipschitz > 0.0 ? std::min(0.1, r.lambda1 / (10.0 * r.lipschitz)) : 0.1;
  r.delta1 = 2.0 * r.delta0;
  return r;
}

SemilinearSolver::SemilinearSolver(const Discretization& disc, NonlinearitySpec f, double t_k)
    : disc_(&disc), f_(std::move(f)), radii_(well_posedness(disc, f_, t_k)) {}

SemilinearSolver::SemilinearSolver(const Discretization& disc, NonlinearitySpec f, WellPosedness radii)
    : disc_(&disc), f_(std::move(f)), radii_(radii) {}

SemilinearSolution SemilinearSolver::solve(const BoundaryTrace& f, double eps) const {
  const Discretization& disc = *disc_;
  const DofMap& dofs = disc.dofs();
  if (f.size() != dofs.boundary_count()) throw ContractError("trace length does not match boundary DOF count");
  const double data = f.size() == 0 ? 0.0 : std::abs(eps) * f.cwiseAbs().maxCoeff();
  if (data > radii_.delta0 * (1.0 + 1e-12)) throw ContractError("boundary data exceeds the well-posedness radius");
  const double t_k = radii_.t_k;
  VecX u = VecX::Constant(dofs.vertex_count(), t_k);
  for (int b = 0; b < dofs.boundary_count(); ++b) u[dofs.boundary[b]] = t_k + eps * f[b];
  const double kscale = disc.stiffness().max_abs();

  SemilinearSolution sol;
  constexpr int kMaxIterations = 40;
  for (int it = 0; it <= kMaxIterations; ++it) {
    NonlinearResidual nr = nonlinear_residual(disc, f_, u, true);
    const VecX ri = dofs.interior_part(nr.residual);
    const double rel = ri.size() == 0 ? 0.0 : ri.cwiseAbs().maxCoeff() / (kscale * std::max(u.cwiseAbs().maxCoeff(), 1e-300));
    sol.residual_history.push_back(rel);
    if (rel <= 1e-12) {
      sol.u = u;
      sol.flux = dofs.boundary_part(nr.residual);
      sol.iterations = it;
      sol.residual = rel;
      return sol;
    }
    if (it == kMaxIterations) break;
    const DirichletSolver jac(disc, nr.jacobian);
    const VecX step = jac.solve_interior(ri);
    for (int i = 0; i < dofs.interior_count(); ++i) u[dofs.interior[i]] -= step[i];
    if ((u.array() - t_k).abs().maxCoeff() > radii_.delta1)
      throw ConvergenceError("outside well-posedness regime: iterate left the small-solution ball");
  }
  throw ConvergenceError("outside well-posedness regime: Newton did not converge");
}

VecX direct_vm(const Discretization& disc, const PotentialField& v) {
  const DirichletSolver laplace(disc, disc.stiffness());
  const VecX ones = VecX::Ones(disc.mesh().vertex_count());
  return laplace.solve_zero_trace(-VecX(disc.potential_mass(v).matrix() * ones));
}

namespace {

// Least-squares fit of samples y_j (rows of `values`) against eps^p for the
// given powers, with eps scaled by eps_max for conditioning.
MatX power_fit(const std::vector<double>& eps, const MatX& values, const std::vector<int>& powers, double eps_max) {
  const int n = static_cast<int>(eps.size());
  MatX a(n, powers.size());
  for (int j = 0; j < n; ++j)
    for (std::size_t p = 0; p < powers.size(); ++p) a(j, p) = std::pow(eps[j] / eps_max, powers[p]);
  MatX coef = a.colPivHouseholderQr().solve(values);
  for (std::size_t p = 0; p < powers.size(); ++p) coef.row(p) /= std::pow(eps_max, powers[p]);
  return coef;
}

}  // namespace

ExpansionRecord extract_vm(const Discretization& disc, const PotentialField& v, int m, double eps_max, int half_points) {
  const SemilinearSolver solver(disc, NonlinearitySpec::power(v, m), 0.0);
  eps_max = std::min(eps_max, solver.radii().delta0);
  const int nb = disc.dofs().boundary_count(), nv = disc.mesh().vertex_count();
  const VecX ones_b = VecX::Ones(nb);

  ExpansionRecord rec;
  rec.m = m;
  for (int j = -half_points; j <= half_points; ++j) rec.eps_grid.push_back(eps_max * j / half_points);
  const int n = static_cast<int>(rec.eps_grid.size());
  rec.solutions.resize(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (int j = 0; j < n; ++j) rec.solutions[j] = solver.solve(ones_b, rec.eps_grid[j]).u;

  MatX y(n, nv);
  for (int j = 0; j < n; ++j) y.row(j) = (rec.solutions[j].array() - rec.eps_grid[j]).matrix().transpose();
  std::vector<int> powers;
  for (int p = 0; p <= m + 2; ++p) powers.push_back(p);
  const MatX coef = power_fit(rec.eps_grid, y, powers, eps_max);
  for (int p = 0; p <= m + 2; ++p) rec.coefficients.push_back(coef.row(p).transpose());
  rec.vm = rec.coefficients[m];

  const VecX direct = direct_vm(disc, v);
  const double ref = disc.l2_norm(direct);
  const double scale = ref > 0.0 ? ref : 1.0;
  rec.vm_rel_error = disc.l2_norm(VecX(rec.vm - direct)) / scale;
  for (int p = 2; p < m; ++p) rec.max_low_order = std::max(rec.max_low_order, disc.l2_norm(rec.coefficients[p]) / scale);

  for (int i = 0; i < 4; ++i) rec.remainder_eps.push_back(eps_max / std::pow(2.0, i));
  rec.remainder_norms.resize(rec.remainder_eps.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < 4; ++i) {
    const double e = rec.remainder_eps[i];
    const VecX u = solver.solve(ones_b, e).u;
    rec.remainder_norms[i] = disc.l2_norm(VecX(u.array() - e - std::pow(e, m) * direct.array()));
  }
  // Slope of log ||r|| against log eps.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  bool positive = true;
  for (int i = 0; i < 4; ++i) {
    if (!(rec.remainder_norms[i] > 0.0)) positive = false;
    const double lx = std::log(rec.remainder_eps[i]), ly = std::log(std::max(rec.remainder_norms[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  rec.fitted_exponent = positive ? (4 * sxy - sx * sy) / (4 * sxx - sx * sx) : std::numeric_limits<double>::infinity();
  return rec;
}

MomentReport moment_checks(const Discretization& disc, const PotentialField& v, const VecX& vm, int m, double eps_max,
                           int points) {
  MomentReport rep;
  const SpMat mv = disc.potential_mass(v).matrix();
  const VecX ones = VecX::Ones(disc.mesh().vertex_count());
  rep.integral_v = ones.dot(mv * ones);
  rep.integral_v_vm = ones.dot(mv * vm);
  rep.integral_grad = disc.energy(vm);
  rep.identity_gap = rep.integral_grad + rep.integral_v_vm;
  rep.expected_high = (m + 1) * rep.integral_v_vm + rep.integral_grad;

  const SemilinearSolver solver(disc, NonlinearitySpec::power(v, m), 0.0);
  eps_max = std::min(eps_max, solver.radii().delta0);
  const VecX ones_b = VecX::Ones(disc.dofs().boundary_count());
  const int half = points / 2;
  for (int j = -half; j <= half; ++j)
    if (j != 0) rep.eps_grid.push_back(eps_max * j / half);
  const int n = static_cast<int>(rep.eps_grid.size());
  rep.flux_pairing.resize(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (int j = 0; j < n; ++j) {
    const SemilinearSolution s = solver.solve(ones_b, rep.eps_grid[j]);
    // Interior rows of K u + N(u) vanish, so the full dot product is the boundary pairing.
    rep.flux_pairing[j] = rep.eps_grid[j] * ones_b.dot(s.flux);
  }
  MatX y(n, 1);
  for (int j = 0; j < n; ++j) y(j, 0) = rep.flux_pairing[j];
  const MatX coef = power_fit(rep.eps_grid, y, {m + 1, 2 * m, 2 * m + 1, 2 * m + 2}, eps_max);
  rep.fitted_low = coef(0, 0);
  rep.fitted_high = coef(1, 0);
  return rep;
}

FirstLinearization first_linearization(const SemilinearSolver& solver, const BoundaryTrace& f, double eps) {
  const Discretization& disc = solver.disc();
  const NonlinearitySpec& nl = solver.nonlinearity();
  const double t_k = solver.radii().t_k;
  const int nv = disc.mesh().vertex_count();
  const VecX lin = nl.weight() != nullptr ? VecX(*nl.weight() * nl.dh(t_k)) : VecX::Constant(nv, nl.dh(t_k));
  FirstLinearization out;
  const SemilinearSolution plus = solver.solve(f, eps);
  const SemilinearSolution minus = solver.solve(f, -eps);
  out.fd = (plus.flux - minus.flux) / (2.0 * eps);
  out.direct = dtn_matrix(disc, PotentialField(lin)).pairing * f;
  const double ref = disc.dual_norm(out.direct);
  const double diff = disc.dual_norm(VecX(out.fd - out.direct));
  out.relative_gap = ref > 0.0 ? diff / ref : diff;
  return out;
}

}  // namespace dtnlab
