#include "dtnlab/identities.hpp"

#include "dtnlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dtnlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Lattice {
  int n;
  int p;
  double lo;
  double h;
  std::array<long, 3> stride{1, 1, 1};
  long size = 1;

  Lattice(const GridField& grid) : n(grid.n), p(grid.points), lo(grid.lo), h(grid.spacing()) {
    for (int d = 0; d < n; ++d) {
      stride[d] = size;
      size *= p;
    }
  }
  std::array<int, 3> index(long flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int d = 0; d < n; ++d) {
      idx[d] = static_cast<int>(flat % p);
      flat /= p;
    }
    return idx;
  }
  std::array<double, 3> point(long flat) const {
    const auto idx = index(flat);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int d = 0; d < n; ++d) x[d] = lo + h * idx[d];
    return x;
  }
  std::vector<double> sample(const PointFn& fn) const {
    std::vector<double> out(size);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < size; ++i) out[i] = fn(point(i));
    return out;
  }
  bool inside(long flat, int depth) const {
    const auto idx = index(flat);
    for (int d = 0; d < n; ++d)
      if (idx[d] < depth || idx[d] > p - 1 - depth) return false;
    return true;
  }
  // Fourth-order central first derivative along axis d; NaN near the edge.
  std::vector<double> derivative(const std::vector<double>& f, int d) const {
    std::vector<double> out(size, kNaN);
    const long s = stride[d];
#pragma omp parallel for schedule(static)
    for (long i = 0; i < size; ++i) {
      const int k = index(i)[d];
      if (k < 2 || k > p - 3) continue;
      out[i] = (f[i - 2 * s] - 8.0 * f[i - s] + 8.0 * f[i + s] - f[i + 2 * s]) / (12.0 * h);
    }
    return out;
  }
  // (1 / vol) sum_d D_d(coef_d D_d w).
  std::vector<double> laplacian(const std::vector<double>& w, const std::vector<std::vector<double>>& coef,
                                const std::vector<double>& vol) const {
    std::vector<double> out(size, 0.0);
    for (int d = 0; d < n; ++d) {
      std::vector<double> flux = derivative(w, d);
      for (long i = 0; i < size; ++i) flux[i] *= coef[d][i];
      const std::vector<double> div = derivative(flux, d);
      for (long i = 0; i < size; ++i) out[i] += div[i];
    }
    for (long i = 0; i < size; ++i) out[i] /= vol[i];
    return out;
  }
};

}  // namespace

ConformalResidual conformal_potential_residual(const ConformalCase& cc, const GridField& grid) {
  if (grid.n != 2 && grid.n != 3) throw ContractError("conformal lab supports n = 2 or 3");
  if (grid.margin < 4 || grid.points < 2 * grid.margin + 1) throw ContractError("grid too small for the FD stencils");
  const Lattice lat(grid);
  const int n = grid.n;
  const std::vector<double> c = lat.sample(cc.c);
  const std::vector<double> u = lat.sample(cc.u);
  for (double ci : c)
    if (!(ci > 0.0)) throw ContractError("conformal factor must be positive on the grid");
  std::vector<std::vector<double>> gd(n);
  for (int d = 0; d < n; ++d) gd[d] = lat.sample(cc.g_diag[d]);

  const double e_w = (n - 2) / 4.0;
  const double e_out = -(n + 2) / 4.0;
  std::vector<double> vol_g(lat.size, 1.0), vol_cg(lat.size);
  std::vector<std::vector<double>> a_g(n, std::vector<double>(lat.size)), a_cg = a_g;
  for (long i = 0; i < lat.size; ++i) {
    for (int d = 0; d < n; ++d) vol_g[i] *= gd[d][i];
    vol_g[i] = std::sqrt(vol_g[i]);
    vol_cg[i] = std::pow(c[i], n / 2.0) * vol_g[i];
    for (int d = 0; d < n; ++d) {
      a_g[d][i] = vol_g[i] / gd[d][i];
      a_cg[d][i] = vol_cg[i] / (c[i] * gd[d][i]);
    }
  }
  std::vector<double> w(lat.size), wu(lat.size);
  for (long i = 0; i < lat.size; ++i) {
    w[i] = std::pow(c[i], e_w);
    wu[i] = w[i] * u[i];
  }
  const std::vector<double> lap_cg_u = lat.laplacian(u, a_cg, vol_cg);
  const std::vector<double> lap_g_w = lat.laplacian(w, a_g, vol_g);
  const std::vector<double> lap_g_wu = lat.laplacian(wu, a_g, vol_g);

  ConformalResidual out;
  for (long i = 0; i < lat.size; ++i) {
    if (!lat.inside(i, grid.margin)) continue;
    const double v = lap_g_w[i] / w[i];
    const double lhs = -lap_cg_u[i];
    const double rhs = std::pow(c[i], e_out) * (-lap_g_wu[i] + v * wu[i]);
    out.residual = std::max(out.residual, std::abs(lhs - rhs));
    out.v_sup = std::max(out.v_sup, std::abs(v));
  }
  return out;
}

ConvergenceStudy conformal_convergence(const ConformalCase& cc, int n, int points) {
  ConvergenceStudy study;
  int p = points;
  for (int level = 0; level < 3; ++level) {
    GridField grid;
    grid.n = n;
    grid.points = p;
    const ConformalResidual r = conformal_potential_residual(cc, grid);
    study.spacings.push_back(grid.spacing());
    study.residuals.push_back(r.residual);
    study.v_sup_max = std::max(study.v_sup_max, r.v_sup);
    p = 2 * p - 1;
  }
  for (std::size_t k = 0; k + 1 < study.residuals.size(); ++k)
    study.orders.push_back(std::log2(study.residuals[k] / study.residuals[k + 1]));
  return study;
}

std::vector<ConformalCase> conformal_catalog() {
  using P = std::array<double, 3>;
  const PointFn one = [](const P&) { return 1.0; };
  std::vector<ConformalCase> cases;
  cases.push_back({"identity-factor", one, [](const P& x) { return std::sin(x[0]) * x[1] + x[2] * x[2]; }, {one, one, one}});
  cases.push_back({"bump-euclidean",
                   [](const P& x) { return 1.0 + 0.2 * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); },
                   [](const P& x) { return std::sin(x[0]) * x[1]; },
                   {one, one, one}});
  cases.push_back({"wave-diagonal",
                   [](const P& x) { return 1.2 + 0.3 * std::sin(x[0]) * std::cos(x[1]) + 0.1 * x[2]; },
                   [](const P& x) { return std::exp(0.5 * x[0]) * std::cos(x[1]) + x[2]; },
                   {[](const P& x) { return 1.0 + 0.2 * x[0] * x[0]; },
                    [](const P& x) { return 1.0 + 0.1 * std::sin(x[1]); },
                    [](const P& x) { return 1.5 + 0.2 * x[2]; }}});
  return cases;
}

AnalyticField AnalyticField::constant(double c) {
  return {[c](const Vec2&) { return c; }, [](const Vec2&) { return Vec2(Vec2::Zero()); },
          [](const Vec2&) { return Mat2(Mat2::Zero()); }};
}

AnalyticField AnalyticField::neumann_radial() {
  AnalyticField f;
  f.value = [](const Vec2& x) {
    const double s = x.squaredNorm();
    return 2.0 - s + 0.5 * s * s;
  };
  // w = 2 - s + s^2/2 with s = |x|^2: grad w = (-2 + 2 s) x.
  f.gradient = [](const Vec2& x) { return Vec2((-2.0 + 2.0 * x.squaredNorm()) * x); };
  f.hessian = [](const Vec2& x) {
    const double s = x.squaredNorm();
    return Mat2((-2.0 + 2.0 * s) * Mat2::Identity() + 4.0 * x * x.transpose());
  };
  return f;
}

IbpChain ibp_chain_check(const Discretization& disc, const AnalyticField& w) {
  const TriangleMesh& mesh = disc.mesh();
  const MetricField& metric = disc.metric();
  IbpChain out;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.signed_area(t);
    for (const auto& qp : quadrature::triangle_rule()) {
      const Vec2 x = qp.bary[0] * mesh.vertices[tri[0]] + qp.bary[1] * mesh.vertices[tri[1]] +
                     qp.bary[2] * mesh.vertices[tri[2]];
      const double wv = w.value(x);
      if (!(wv > 0.0)) throw ContractError("ibp chain requires w > 0");
      const Vec2 dw = w.gradient(x);
      const Mat2 hw = w.hessian(x);
      const Mat2 g = metric.eval(x);
      const Mat2 gi = g.inverse();
      const double vol = std::sqrt(g.determinant());
      const auto dg = metric.deriv(x);
      // div(A grad w) with A = vol g^{-1}.
      double div = 0.0;
      for (int j = 0; j < 2; ++j) {
        const double dvol = 0.5 * vol * (gi * dg[j]).trace();
        const Mat2 da = dvol * gi - vol * gi * dg[j] * gi;
        div += da.row(j).dot(dw);
      }
      div += vol * (gi.cwiseProduct(hw)).sum();
      const double lap = div / vol;
      const Vec2 d_inv = -dw / (wv * wv);
      const double dx = qp.weight * area * vol;
      out.lhs_a += dx * lap / wv;
      out.lhs_b -= dx * dw.dot(gi * d_inv);
      out.lhs_c += dx * dw.dot(gi * dw) / (wv * wv);
      out.max_grad = std::max(out.max_grad, std::sqrt(dw.dot(gi * dw)));
    }
  }
  return out;
}

double RigiditySplit::ratio() const {
  if (u_dot_l2 == 0.0 || v_sup == 0.0) return 0.0;
  return remainder_h1 / (v_sup * u_dot_l2);
}

RigiditySplit rigidity_split(const Discretization& disc, const PotentialField& v, double delta) {
  if (v.sup_norm() > delta * (1.0 + 1e-12)) throw ContractError("rigidity split requires ||V||_inf <= delta");
  const DofMap& dofs = disc.dofs();
  const int nv = disc.mesh().vertex_count();
  const SparseOperator mv = disc.potential_mass(v);
  const SparseOperator full = disc.stiffness() + mv;
  const DirichletSolver laplace(disc, disc.stiffness());
  const DirichletSolver schrod(disc, full);

  RigiditySplit s;
  s.v_sup = v.sup_norm();
  const VecX ones = VecX::Ones(nv);
  const VecX load_dot = -VecX(mv.matrix() * ones);
  s.u_dot = laplace.solve_zero_trace(load_dot);
  const VecX load_r = -VecX(mv.matrix() * s.u_dot);
  s.remainder = schrod.solve_zero_trace(load_r);
  s.u = ones + s.u_dot + s.remainder;
  s.direct = schrod.solve(VecX::Ones(dofs.boundary_count()));

  const VecX li = dofs.interior_part(load_dot), lr = dofs.interior_part(load_r);
  s.residual_u_dot = interior_residual(disc, disc.stiffness(), s.u_dot, &li);
  s.residual_remainder = interior_residual(disc, full, s.remainder, &lr);
  s.residual_u = interior_residual(disc, full, s.u);
  s.reconstruction_gap = (s.u - s.direct).cwiseAbs().maxCoeff() / s.direct.cwiseAbs().maxCoeff();
  s.u_dot_l2 = disc.l2_norm(s.u_dot);
  s.remainder_h1 = std::sqrt(disc.energy(s.remainder) + disc.l2_dot(s.remainder, s.remainder));
  return s;
}

RigidityReport rigidity_identity_check(const Discretization& disc, const RigiditySplit& split, const PotentialField& v,
                                       double lambda1, double delta, double constant) {
  const SparseOperator mv = disc.potential_mass(v);
  RigidityReport rep;
  rep.lhs = disc.energy(split.u_dot);
  rep.rhs = split.u_dot.dot(mv.matrix() * split.remainder) + split.u_dot.dot(mv.matrix() * split.u_dot);
  rep.gap = rep.lhs - rep.rhs;
  rep.mean = mean_zero(disc, v);
  const DtNMatrix dtn = dtn_matrix(disc, v);
  rep.boundary_term = dtn.quadratic(VecX::Ones(dtn.size()));
  rep.reconstructed = rep.mean - rep.boundary_term;
  rep.lambda1 = lambda1;
  rep.delta = delta;
  rep.constant = constant;
  const double ud2 = split.u_dot_l2 * split.u_dot_l2;
  rep.contraction_rhs = std::abs(rep.rhs) <= (delta + constant * delta * delta) * ud2 * (1.0 + 1e-12) + 1e-300;
  rep.poincare_lhs = rep.lhs >= lambda1 * ud2 * (1.0 - 1e-9);
  return rep;
}

double mean_zero(const Discretization& disc, const PotentialField& v) {
  const VecX ones = VecX::Ones(disc.mesh().vertex_count());
  return ones.dot(disc.potential_mass(v).matrix() * ones);
}

double measure_split_constant(const Discretization& disc, double delta, int draws, std::uint64_t seed) {
  std::vector<double> ratios(draws, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < draws; ++k) {
    const PotentialField v = random_trig_potential(disc.mesh(), delta, seed + static_cast<std::uint64_t>(k));
    ratios[k] = rigidity_split(disc, v, delta).ratio();
  }
  return *std::max_element(ratios.begin(), ratios.end());
}

}  // namespace dtnlab
