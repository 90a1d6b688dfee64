#include "dtnlab/experiments.hpp"

#include "dtnlab/convexity.hpp"
#include "dtnlab/holomorphy.hpp"
#include "dtnlab/identities.hpp"
#include "dtnlab/reference.hpp"
#include "dtnlab/semilinear.hpp"
#include "dtnlab/xray.hpp"

#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

namespace dtnlab {

namespace {

using json = nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi;
constexpr double kBesselJ01Squared = 5.783185962946784;  // j_{0,1}^2
constexpr int kDenseCrosscheckLimit = 3000;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Section {
  std::string name;
  const ExperimentConfig* cfg = nullptr;
  std::vector<CheckRecord> checks;
  json metrics = json::object();
  std::vector<std::pair<std::string, std::string>> files;

  void check(const std::string& id, const std::string& ref, double lhs, double rhs, double gap, double tol) {
    CheckRecord c;
    c.check_id = name + "." + id;
    c.ref = ref;
    c.lhs = lhs;
    c.rhs = rhs;
    c.gap = gap;
    c.tolerance = cfg->tolerance(c.check_id, tol);
    c.pass = std::isfinite(gap) && gap <= c.tolerance;
    checks.push_back(c);
  }
  void at_least(const std::string& id, const std::string& ref, double value, double bound) {
    check(id, ref, value, bound, std::isfinite(value) ? std::max(0.0, bound - value) : INFINITY, 0.0);
  }
  void at_most(const std::string& id, const std::string& ref, double value, double bound) {
    check(id, ref, value, bound, std::isfinite(value) ? std::max(0.0, value - bound) : INFINITY, 0.0);
  }
  void relative(const std::string& id, const std::string& ref, double lhs, double rhs, double tol) {
    const double scale = std::max(std::abs(rhs), 1e-300);
    check(id, ref, lhs, rhs, std::abs(lhs - rhs) / scale, tol);
  }
  void flag(const std::string& id, const std::string& ref, bool ok) { check(id, ref, ok ? 1 : 0, 1, ok ? 0 : 1, 0.0); }
};

struct MeshChoice {
  TriangleMesh mesh;
  std::optional<ShapeSpec> shape;
  double h = 0.0;
};

MeshChoice section_mesh(const ExperimentConfig& cfg, const std::string& fallback) {
  MeshChoice out;
  if (cfg.has("mesh_file")) {
    std::ifstream in(cfg.text("mesh_file", ""));
    std::ostringstream buf;
    buf << in.rdbuf();
    out.mesh = load_mesh(buf.str());
    out.h = out.mesh.max_edge_length();
    return out;
  }
  const CatalogSpec spec = CatalogSpec::parse(cfg.text("mesh", fallback));
  const CatalogSpec defaults = CatalogSpec::parse(fallback);
  out.shape = ShapeSpec::from_catalog(spec);
  out.h = spec.get("h", spec.key == defaults.key ? defaults.get("h", 0.05) : 0.05);
  out.mesh = generate_mesh(*out.shape, out.h);
  return out;
}

MetricField section_metric(const ExperimentConfig& cfg) {
  return cfg.has("metric") ? MetricField::from_spec(CatalogSpec::parse(cfg.text("metric", ""))) : MetricField();
}

bool is_euclidean(const MetricField& m) { return std::holds_alternative<metrics::Euclidean>(m.variant()); }

// ---------------------------------------------------------------------------

void run_dtn(Section& s) {
  const ExperimentConfig& cfg = *s.cfg;
  MeshChoice mc = section_mesh(cfg, "disk:h=0.05");
  const Discretization disc(std::move(mc.mesh), section_metric(cfg));
  const PotentialField v = make_potential(CatalogSpec::parse(cfg.text("potential", "zero")), disc.mesh());
  const DtNMatrix dtn = dtn_matrix(disc, v);
  const VecX eig = dtn.generalized_eigenvalues();
  const double norm = dtn.operator_norm();
  s.metrics["boundary_dofs"] = disc.dofs().boundary_count();
  s.metrics["interior_dofs"] = disc.dofs().interior_count();
  s.metrics["operator_norm"] = norm;

  s.check("symmetry", "DtN pairing is symmetric", dtn.relative_asymmetry(), 0.0, dtn.relative_asymmetry(), 1e-10);
  if (v.is_zero()) {
    const double r = disc.dual_norm(VecX(dtn.pairing * VecX::Ones(dtn.size())));
    s.check("constant_kernel", "Laplace DtN annihilates constants", r, 0.0, r / norm, 1e-8);
  }
  if (disc.dofs().interior_count() <= kDenseCrosscheckLimit) {
    const MatX dense = reference::schur_complement(disc, disc.schrodinger(v));
    const double diff = (dense - dtn.pairing).cwiseAbs().maxCoeff() / dtn.pairing.cwiseAbs().maxCoeff();
    s.check("dense_schur", "sparse Schur complement matches dense LU route", diff, 0.0, diff, 1e-10);
  }
  std::vector<double> oracle;
  if (mc.shape && mc.shape->shape == Shape::disk && is_euclidean(disc.metric()) && v.is_zero()) {
    for (double k : {0, 1, 1, 2, 2, 3, 3}) oracle.push_back(k / mc.shape->radius);
    double worst = 0.0;
    for (std::size_t k = 0; k < oracle.size(); ++k)
      worst = std::max(worst, std::abs(eig[k] - oracle[k]) / std::max(oracle[k], 1.0 / mc.shape->radius));
    s.check("disk_spectrum", "flat disk DtN spectrum by Fourier separation", eig[1], oracle[1], worst, 0.02);
  }
  std::ostringstream csv;
  csv << "k,eigenvalue,oracle\n";
  for (Eigen::Index k = 0; k < eig.size(); ++k)
    csv << k << ',' << fmt(eig[k]) << ',' << (static_cast<std::size_t>(k) < oracle.size() ? fmt(oracle[k]) : "") << '\n';
  s.files.emplace_back("dtn_spectrum.csv", csv.str());
}

void run_eigs(Section& s) {
  const ExperimentConfig& cfg = *s.cfg;
  MeshChoice mc = section_mesh(cfg, "disk:h=0.05");
  const Discretization disc(std::move(mc.mesh), section_metric(cfg));
  const PotentialField v = make_potential(CatalogSpec::parse(cfg.text("potential", "zero")), disc.mesh());
  const int count = cfg.integer("eigen_count", 10);
  EigenOptions opts;
  opts.seed = cfg.seed;
  const EigenSystem sys = dirichlet_eigensystem(disc, v, count, opts);
  double worst = 0.0;
  for (int k = 0; k < sys.count; ++k) worst = std::max(worst, sys.residuals[k] / std::max(std::abs(sys.eigenvalues[k]), 1.0));
  s.check("residual", "Dirichlet eigenpair residual in the dual mass norm", worst, 0.0, worst, 1e-10);
  s.metrics["krylov_dimension"] = sys.krylov_dimension;
  if (disc.dofs().interior_count() <= kDenseCrosscheckLimit) {
    const EigenSystem dense = reference::eigensystem(disc, v, count);
    double diff = 0.0;
    for (int k = 0; k < count; ++k)
      diff = std::max(diff, std::abs(sys.eigenvalues[k] - dense.eigenvalues[k]) / std::max(std::abs(dense.eigenvalues[k]), 1.0));
    s.check("dense_eigenvalues", "Krylov eigenvalues match dense generalized solve", diff, 0.0, diff, 1e-8);
  }
  if (mc.shape && is_euclidean(disc.metric()) && v.is_zero()) {
    if (mc.shape->shape == Shape::disk) {
      const double oracle = kBesselJ01Squared / (mc.shape->radius * mc.shape->radius);
      s.relative("disk_lambda1", "first Dirichlet eigenvalue of the disk, Bessel zero", sys.eigenvalues[0], oracle, 0.01);
    } else if (mc.shape->shape == Shape::square) {
      const double oracle = 2.0 * kPi * kPi / (mc.shape->side * mc.shape->side);
      s.relative("square_lambda1", "first Dirichlet eigenvalue of the square, separation", sys.eigenvalues[0], oracle, 0.005);
    }
  }
  std::ostringstream csv;
  csv << "k,eigenvalue,residual\n";
  for (int k = 0; k < sys.count; ++k) csv << k + 1 << ',' << fmt(sys.eigenvalues[k]) << ',' << fmt(sys.residuals[k]) << '\n';
  s.files.emplace_back("eigenvalues.csv", csv.str());
}

void run_conformal(Section& s) {
  std::ostringstream csv;
  csv << "case,n,spacing,residual,order\n";
  for (const ConformalCase& cc : conformal_catalog()) {
    for (int n : {2, 3}) {
      const ConvergenceStudy st = conformal_convergence(cc, n, n == 3 ? 21 : 41);
      for (std::size_t i = 0; i < st.residuals.size(); ++i)
        csv << cc.name << ',' << n << ',' << fmt(st.spacings[i]) << ',' << fmt(st.residuals[i]) << ','
            << (i > 0 ? fmt(st.orders[i - 1]) : "") << '\n';
      const double rmax = *std::max_element(st.residuals.begin(), st.residuals.end());
      if (n == 2) {
        s.check(cc.name + ".n2_potential", "conformal potential vanishes in dimension two", st.v_sup_max, 0.0, st.v_sup_max, 0.0);
      } else if (rmax <= 1e-12) {
        s.check(cc.name + ".n3_exact", "conformal identity exact for a constant factor", rmax, 0.0, rmax, 1e-12);
      } else {
        const double order = *std::min_element(st.orders.begin(), st.orders.end());
        s.at_least(cc.name + ".n3_order", "conformal to potential reduction, observed FD order", order, 3.5);
      }
    }
  }
  s.files.emplace_back("conformal_convergence.csv", csv.str());
}

void run_rigidity(Section& s) {
  const ExperimentConfig& cfg = *s.cfg;
  MeshChoice mc = section_mesh(cfg, "square:h=0.0625");
  const MetricField metric = section_metric(cfg);
  const std::string vspec = cfg.text("potential", "sinsin:amplitude=0.01");
  const Discretization disc(mc.mesh, metric);
  const PotentialField v = make_potential(CatalogSpec::parse(vspec), disc.mesh());
  const double l1 = poincare_constant(disc);
  const double delta = smallness_delta(l1);
  const RigiditySplit split = rigidity_split(disc, v, delta);
  const double c1 = measure_split_constant(disc, delta, 32, cfg.seed);
  const RigidityReport rep = rigidity_identity_check(disc, split, v, l1, delta, c1);

  s.check("reconstruction", "u = 1 + u_dot + r reproduces the direct solve", split.reconstruction_gap, 0.0,
          split.reconstruction_gap, 1e-9);
  const double scale = std::max({std::abs(rep.mean), std::abs(rep.boundary_term), std::abs(rep.lhs), 1e-300});
  s.check("identity", "energy identity gap equals int V minus the boundary term", rep.gap, rep.reconstructed,
          std::abs(rep.gap - rep.reconstructed) / scale, 1e-9);
  s.flag("poincare", "Poincare lower bound on the energy of u_dot", rep.poincare_lhs);
  s.flag("contraction", "remainder bound with the measured constant", rep.contraction_rhs);

  // Same potential on a mesh with half the spacing.
  std::optional<Discretization> fine;
  if (mc.shape) {
    fine.emplace(generate_mesh(*mc.shape, 0.5 * mc.h), metric);
    const double l1f = poincare_constant(*fine);
    const double c2 = measure_split_constant(*fine, smallness_delta(l1f), 32, cfg.seed);
    s.check("constant_stability", "measured remainder constant stable under refinement", c1, c2,
            std::abs(c1 - c2) / std::max(c2, 1e-300), 0.2);
    s.metrics["constant_fine"] = c2;
  }
  s.metrics["lambda1"] = l1;
  s.metrics["delta"] = delta;
  s.metrics["constant"] = c1;
  s.metrics["integral_v"] = rep.mean;
  s.metrics["boundary_term"] = rep.boundary_term;
  s.metrics["energy_lhs"] = rep.lhs;
  s.metrics["energy_rhs"] = rep.rhs;
}

void run_convexity(Section& s) {
  const ExperimentConfig& cfg = *s.cfg;
  MeshChoice mc = section_mesh(cfg, "disk:h=0.1");
  const Discretization disc(std::move(mc.mesh), section_metric(cfg));
  const double l1 = poincare_constant(disc);
  const double delta = smallness_delta(l1);
  s.metrics["lambda1"] = l1;
  s.metrics["delta"] = delta;

  std::ostringstream table;
  table << "triple,q_sup,gap_t025,gap_t050,gap_t075,lambda_norm,hessian_mismatch,max_hessian\n";
  const auto catalog = convexity_catalog(disc.mesh(), delta);
  for (const ConvexityTriple& tr : catalog) {
    const PotentialField q = tr.v2 - tr.v1;
    double gaps[3] = {0, 0, 0};
    double norm = 0.0;
    for (int i = 0; i < 3; ++i) {
      const GapResult g = operator_combination_gap(disc, tr.v1, tr.v2, 0.25 * (i + 1));
      gaps[i] = g.min_eigenvalue;
      norm = std::max(norm, g.lambda_norm);
    }
    const double worst_gap = std::min({gaps[0], gaps[1], gaps[2]});
    s.check(tr.name + ".concavity_gap", "gap pencil of the DtN combination is nonnegative", worst_gap, 0.0,
            std::max(0.0, -worst_gap) / norm, 1e-8);

    double mismatch = 0.0, h2max = -INFINITY, hscale = 1.0;
    const std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    const std::vector<double> hvals = h_curve(disc, tr.v1, tr.v2, tr.f, grid);
    for (double h : hvals) hscale = std::max(hscale, std::abs(h));
    for (double t : grid) {
      const LinearizationFields lf = linearization_fields(disc, tr.v1, q, tr.f, t);
      const double hf = hessian_formula(disc, tr.v1, q, lf);
      const double hd = hessian_fd(disc, tr.v1, tr.v2, tr.f, t);
      mismatch = std::max(mismatch, q.is_zero() ? std::abs(hf - hd) : std::abs(hf - hd) / std::max(std::abs(hf), 1e-300));
      h2max = std::max(h2max, hf);
    }
    s.check(tr.name + ".hessian_formula", "five-term Hessian formula against finite differences", mismatch, 0.0, mismatch, 1e-3);
    s.check(tr.name + ".hessian_sign", "second derivative of H_f is nonpositive", h2max, 0.0,
            std::max(0.0, h2max) / hscale, 1e-9);
    if (q.sup_norm() >= 1e-3) s.at_least(tr.name + ".strictness", "strict concavity gap at t = 1/2", gaps[1], 1e-10);
    table << tr.name << ',' << fmt(q.sup_norm()) << ',' << fmt(gaps[0]) << ',' << fmt(gaps[1]) << ',' << fmt(gaps[2]) << ','
          << fmt(norm) << ',' << fmt(mismatch) << ',' << fmt(h2max) << '\n';
  }
  s.files.emplace_back("convexity_catalog.csv", table.str());
  const ConvexityTriple& first = catalog.front();
  s.files.emplace_back("convexity_curve.csv", convexity_csv(convexity_curve(disc, first.v1, first.v2, first.f)));

  std::ostringstream scan_csv;
  scan_csv << "potential,t,difference,slope,fd_slope\n";
  for (const ConvexityTriple& tr : catalog) {
    for (const auto& [label, v] : {std::pair{std::string("v1"), tr.v1}, std::pair{std::string("v2"), tr.v2}}) {
      if (v.is_zero() || (label == "v2" && tr.name == "equal")) continue;
      const RigidityScan scan = deformation_rigidity_scan(disc, v, {0.01, 0.1, 0.5});
      const std::string id = tr.name + "." + label;
      s.check(id + ".slope", "derivative of the DtN family at t = 0 against finite differences", scan.slope, scan.fd_slope,
              std::abs(scan.slope - scan.fd_slope) / std::max(scan.fd_slope, 1e-300), 0.05);
      s.check(id + ".nonzero", "nonzero potential moves the DtN map", scan.slope, 0.0, scan.slope > 0.0 ? 0.0 : 1.0, 0.0);
      for (const auto& row : scan.rows)
        scan_csv << id << ',' << fmt(row.t) << ',' << fmt(row.difference) << ',' << fmt(scan.slope) << ','
                 << fmt(scan.fd_slope) << '\n';
    }
  }
  s.files.emplace_back("corollary_scan.csv", scan_csv.str());
}

void run_semilinear(Section& s) {
  const ExperimentConfig& cfg = *s.cfg;
  MeshChoice mc = section_mesh(cfg, "disk:h=0.05");
  const Discretization disc(std::move(mc.mesh), section_metric(cfg));
  const std::string vspec = cfg.text("potential", "constant:value=1");
  const PotentialField v = make_potential(CatalogSpec::parse(vspec), disc.mesh());
  const double eps_max = cfg.number("eps_max", 0.1);
  std::vector<int> orders = {2, 3};
  if (cfg.has("m")) orders = {cfg.integer("m", 2)};
  const CatalogSpec nl = CatalogSpec::parse(cfg.text("nonlinearity", "power"));
  if (nl.key == "power" && nl.has("m")) orders = {static_cast<int>(nl.get("m", 2))};
  const bool oracle = mc.shape && mc.shape->shape == Shape::disk && is_euclidean(disc.metric()) &&
                      CatalogSpec::parse(vspec).to_string() == CatalogSpec::parse("constant:value=1").to_string();

  std::ostringstream csv;
  csv << "m,eps,flux_pairing\n";
  for (int m : orders) {
    const std::string p = "m" + std::to_string(m);
    const ExpansionRecord rec = extract_vm(disc, v, m, eps_max);
    s.check(p + ".vm_extraction", "fitted eps^m coefficient against the direct v_m solve", rec.vm_rel_error, 0.0,
            rec.vm_rel_error, 1e-3);
    if (m > 2)
      s.check(p + ".low_orders", "coefficients below order m vanish", rec.max_low_order, 0.0, rec.max_low_order, 1e-6);
    s.at_least(p + ".remainder_order", "remainder of the expansion decays faster than eps^m", rec.fitted_exponent, m + 0.5);
    const VecX vm = direct_vm(disc, v);
    const MomentReport mr = moment_checks(disc, v, vm, m, eps_max);
    const double iscale = std::max({std::abs(mr.integral_grad), std::abs(mr.integral_v_vm), 1e-300});
    s.check(p + ".vm_identity", "energy of v_m plus int V v_m vanishes", mr.identity_gap, 0.0,
            v.is_zero() ? std::abs(mr.identity_gap) : std::abs(mr.identity_gap) / iscale, 1e-9);
    if (!v.is_zero()) {
      s.relative(p + ".flux_low", "eps^(m+1) coefficient of the flux pairing is int V", mr.fitted_low, mr.integral_v, 0.01);
      s.relative(p + ".flux_high", "eps^(2m) coefficient of the flux pairing", mr.fitted_high, mr.expected_high, 0.01);
    }
    if (oracle) s.relative(p + ".disk_integral", "int V on the unit disk with V = 1 is pi", mr.fitted_low, kPi, 0.01);
    s.metrics[p] = {{"vm_rel_error", rec.vm_rel_error},
                    {"fitted_exponent", rec.fitted_exponent},
                    {"integral_v", mr.integral_v},
                    {"integral_v_vm", mr.integral_v_vm},
                    {"integral_grad", mr.integral_grad}};
    for (std::size_t j = 0; j < mr.eps_grid.size(); ++j) csv << m << ',' << fmt(mr.eps_grid[j]) << ',' << fmt(mr.flux_pairing[j]) << '\n';
  }
  s.files.emplace_back("semilinear_flux.csv", csv.str());

  const CatalogSpec gspec = nl.key == "power" ? CatalogSpec::parse("sin") : nl;
  const double t_k = cfg.number("t_k", 2.0 * kPi);
  const SemilinearSolver solver(disc, NonlinearitySpec::separable(ScalarProfile::from_spec(gspec)), t_k);
  const BoundaryTrace f = make_trace(CatalogSpec::parse(cfg.text("trace", "fourier:k=1")), disc.mesh());
  const FirstLinearization fl = first_linearization(solver, f);
  s.check("first_linearization", "eps derivative of the nonlinear flux is the DtN with potential t_k G'(t_k)",
          fl.relative_gap, 0.0, fl.relative_gap, 1e-4);
  s.metrics["well_posedness"] = {{"t_k", solver.radii().t_k},
                                 {"lambda1", solver.radii().lambda1},
                                 {"lipschitz", solver.radii().lipschitz},
                                 {"delta0", solver.radii().delta0},
                                 {"delta1", solver.radii().delta1}};
}

void run_holomorphy(Section& s) {
  const ExperimentConfig& cfg = *s.cfg;
  MeshChoice mc = section_mesh(cfg, "disk:h=0.04");
  const MetricField metric = section_metric(cfg);
  const Discretization disc(mc.mesh, metric);
  const int n = cfg.integer("zeta_count", 300);
  const CatalogSpec gspec = CatalogSpec::parse(cfg.text("nonlinearity", "sin"));
  const ScalarProfile g = ScalarProfile::from_spec(gspec.key == "power" ? CatalogSpec::parse("sin") : gspec);
  const BlaschkeSequence bs = blaschke_audit(g, 1000);
  const double mu = bs.mu.front();
  const SpectralTraceData data = SpectralTraceData::build(disc, n, mu);
  const BoundaryTrace f = make_trace(CatalogSpec::parse(cfg.text("trace", "fourier:k=1")), disc.mesh());

  const CoefficientCheck cc = coefficient_identity(disc, data, f);
  s.check("coefficients", "Green coefficient identity (f, psi_k) = -lambda_k (u0, phi_k)", cc.max_rel_gap, 0.0,
          cc.max_rel_gap, 1e-8);

  std::vector<int> schedule;
  for (int k = 30; k < n; k *= 2) schedule.push_back(k);
  schedule.push_back(n);
  std::ostringstream conv;
  conv << "z_re,z_im,N,error,direct_norm\n";
  for (const Complex z : {Complex(0, 0), Complex(1, 0), Complex(0, 1)}) {
    const ResolventConvergence rc = resolvent_convergence(disc, data, f, z, schedule);
    bool monotone = true;
    for (std::size_t i = 1; i < rc.errors.size(); ++i) monotone = monotone && rc.errors[i] <= rc.errors[i - 1];
    char id[48];
    std::snprintf(id, sizeof id, "z_%g_%g", z.real(), z.imag());
    s.at_least(std::string(id) + ".decay", "resolvent difference against the eigen sum, error ratio from 30 to N",
               rc.errors.front() / rc.errors.back(), 3.0);
    s.flag(std::string(id) + ".monotone", "eigen sum error nonincreasing on the doubling schedule", monotone);
    for (std::size_t i = 0; i < rc.errors.size(); ++i)
      conv << fmt(z.real()) << ',' << fmt(z.imag()) << ',' << rc.schedule[i] << ',' << fmt(rc.errors[i]) << ','
           << fmt(rc.direct_norm) << '\n';
  }
  s.files.emplace_back("zeta_convergence.csv", conv.str());
  s.metrics["uniform_bound"] = uniform_bound(disc, data, f, n, {0.0, 1.0, 10.0, 100.0, Complex(0, 1), Complex(1, 1)});
  s.metrics["mass_layer_norm"] = disc.b_norm(mass_layer_term(disc, f));

  const std::vector<Complex> zs = {0.0, 1.0, Complex(0, 1), Complex(1, 1), 10.0};
  const Discretization twin(mc.mesh, metric);
  const ZetaGapReport same = zeta_gap_audit(disc, twin, f, zs, mu);
  s.check("identical_metric_gap", "zeta gap vanishes for identical metrics", same.max_gap, 0.0, same.max_gap, 1e-10);
  std::ostringstream gap_csv;
  gap_csv << "second_metric,z_re,z_im,gap,relative\n";
  for (const char* other : {"conformal:amplitude=0.2,width=0.5", "anisotropic:a11=1,a22=1.2"}) {
    const Discretization second(mc.mesh, MetricField::from_spec(CatalogSpec::parse(other)));
    const ZetaGapReport rep = zeta_gap_audit(disc, second, f, zs, mu, {bs.mu[1], bs.mu[2], bs.mu[3]});
    for (const auto* rows : {&rep.rows, &rep.mu_rows})
      for (const ZetaGapRow& r : *rows)
        gap_csv << other << ',' << fmt(r.z.real()) << ',' << fmt(r.z.imag()) << ',' << fmt(r.gap) << ',' << fmt(r.relative) << '\n';
  }
  s.files.emplace_back("zeta_gap.csv", gap_csv.str());

  double mob = 0.0;
  for (int j = 0; j < 8; ++j) {
    const Complex z = 0.99 * std::polar(1.0, 2.0 * kPi * j / 8.0);
    mob = std::max(mob, std::abs(mobius_inverse(mobius(z)) - z));
    s.metrics["mobius_min_real"] = std::min(s.metrics.value("mobius_min_real", 1e300), mobius(z).real());
  }
  s.check("mobius_roundtrip", "Mobius map and inverse compose to the identity", mob, 0.0, mob, 1e-14);

  s.check("zero_residual", "every listed t_k is a zero of G", bs.max_residual, 0.0, bs.max_residual, 1e-12);
  s.flag("monotone_mu", "t_k G'(t_k) strictly increasing", bs.monotone);
  s.check("blaschke_identity", "sum of 1 - |r_k| equals 2 sum 1/(1 + mu_k)", bs.max_identity_gap, 0.0, bs.max_identity_gap, 1e-12);
  if (gspec.key == "sin" || gspec.key == "power") {
    double err = 0.0;
    for (int k = 0; k < std::min<int>(100, static_cast<int>(bs.zeros.size())); ++k)
      err = std::max(err, std::abs(bs.zeros[k] - 2.0 * kPi * (k + 1)));
    s.check("zeros_2pik", "qualifying zeros of sin are 2 pi k", err, 0.0, err, 1e-12);
    s.relative("log_growth", "S_10K - S_K against (1/pi) ln 10 at K = 100", bs.increment, std::log(10.0) / kPi, 0.1);
  } else {
    s.flag("divergence", bs.message, bs.divergence_established);
  }
  s.files.emplace_back("blaschke.csv", blaschke_csv(bs));
}

void run_xray(Section& s) {
  const ExperimentConfig& cfg = *s.cfg;
  const int nb = cfg.integer("xray_boundary", 512);
  const int na = cfg.integer("xray_angles", 256);
  const double l_max = cfg.number("l_max", 10.0);
  const MetricField flat;
  const ShapeSpec disk;
  ShapeSpec annulus;
  annulus.shape = Shape::annulus;

  const GeodesicRay diam = trace_geodesic(flat, disk, Vec2(1, 0), Vec2(-1, 0), l_max);
  s.check("diameter", "diameter chord of the unit disk has length 2", diam.length, 2.0, std::abs(diam.length - 2.0), 1e-8);
  const double th = 0.7;
  const GeodesicRay chord = trace_geodesic(flat, disk, Vec2(1, 0), Vec2(-std::cos(th), std::sin(th)), l_max);
  s.check("chord", "chord length 2 cos(theta)", chord.length, 2 * std::cos(th), std::abs(chord.length - 2 * std::cos(th)), 1e-8);
  const double parab = ray_transform(make_plane_field(CatalogSpec::parse("paraboloid")), diam);
  s.check("paraboloid_transform", "transform of 1 - |x|^2 along the diameter is 4/3", parab, 4.0 / 3.0,
          std::abs(parab - 4.0 / 3.0), 1e-8);

  const InfluxQuadrature q = influx_quadrature(flat, disk, nb, na);
  s.relative("influx_weight", "influx weights total twice the boundary length", q.total_weight(), 4.0 * kPi, 1e-12);
  const SantaloResult one = santalo_average(flat, disk, make_plane_field(CatalogSpec::parse("one")), q, l_max);
  s.relative("santalo_lhs_one", "influx side for V0 = 1 equals 2 pi^2", one.lhs, 2 * kPi * kPi, 1e-3);
  s.relative("santalo_rhs_one", "volume side for V0 = 1 equals 2 pi^2", one.rhs, 2 * kPi * kPi, 1e-3);
  const SantaloResult odd = santalo_average(flat, disk, make_plane_field(CatalogSpec::parse("x")), q, l_max);
  s.check("santalo_mean_zero", "influx average of a mean-zero field vanishes", odd.lhs, 0.0, std::abs(odd.lhs) / odd.scale, 1e-3);
  const std::string field = cfg.text("xray_field", "bump");
  const MetricField metric = section_metric(cfg);
  const InfluxQuadrature qm = influx_quadrature(metric, disk, nb, na);
  const SantaloResult gen = santalo_average(metric, disk, make_plane_field(CatalogSpec::parse(field)), qm, l_max);
  s.check("santalo_field", "Santalo identity for the configured field and metric", gen.lhs, gen.rhs, gen.gap, 1e-3);
  s.check("speed_drift", "unit speed conserved along geodesics", gen.max_speed_drift, 0.0, gen.max_speed_drift, 1e-8);

  const int audit_b = 128, audit_a = 64;
  const NontrappingReport flat_disk = nontrapping_audit(flat, disk, audit_b, audit_a, l_max);
  const NontrappingReport flat_ann = nontrapping_audit(flat, annulus, audit_b, audit_a, l_max);
  const MetricField waist = MetricField::from_spec(CatalogSpec::parse(cfg.text("waist_metric", "revolution:a=1,b=0.05,r0=0.75")));
  const NontrappingReport waist_ann = nontrapping_audit(waist, annulus, audit_b, audit_a, l_max);
  s.check("flat_disk_exit", "every flat disk ray exits", flat_disk.trapped_fraction, 0.0, flat_disk.trapped_fraction, 0.0);
  s.check("flat_disk_length", "flat disk exit lengths bounded by the diameter", flat_disk.max_exit_length, 2.0,
          std::max(0.0, flat_disk.max_exit_length - 2.0), 1e-8);
  s.check("flat_annulus_exit", "every flat annulus ray exits", flat_ann.trapped_fraction, 0.0, flat_ann.trapped_fraction, 0.0);
  s.check("waist_trapped", "waist annulus has rays that do not exit within L_max", waist_ann.trapped_fraction, 0.0,
          waist_ann.trapped_fraction > 0.0 ? 0.0 : 1.0, 0.0);
  for (const auto& [label, rep] : {std::pair{"flat_disk", flat_disk}, std::pair{"flat_annulus", flat_ann},
                                   std::pair{"waist_annulus", waist_ann}}) {
    s.metrics[label] = {{"rays", rep.rays},
                        {"trapped_fraction", rep.trapped_fraction},
                        {"max_exit_length", rep.max_exit_length},
                        {"verdict", rep.verdict}};
  }
  s.metrics["santalo_one"] = {{"lhs", one.lhs}, {"rhs", one.rhs}};
  s.files.emplace_back("rays_waist.csv", ray_csv(influx_quadrature(waist, annulus, 32, 16), waist, annulus, l_max));
}

using Runner = void (*)(Section&);
const std::vector<std::pair<std::string, Runner>>& runners() {
  static const std::vector<std::pair<std::string, Runner>> r = {
      {"dtn", run_dtn},         {"eigs", run_eigs},           {"conformal", run_conformal}, {"rigidity", run_rigidity},
      {"convexity", run_convexity}, {"semilinear", run_semilinear}, {"holomorphy", run_holomorphy}, {"xray", run_xray}};
  return r;
}

json check_json(const CheckRecord& c) {
  return {{"check_id", c.check_id}, {"ref", c.ref},         {"lhs", c.lhs},  {"rhs", c.rhs},
          {"gap", c.gap},           {"tolerance", c.tolerance}, {"pass", c.pass}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

int run_experiments(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  config.validate();
  if (options.jobs > 0) omp_set_num_threads(options.jobs);
  std::filesystem::create_directories(options.out_dir);

  std::vector<Section> sections;
  for (const auto& [name, fn] : runners()) {
    if (config.experiment != "all" && config.experiment != name) continue;
    Section s;
    s.name = name;
    s.cfg = &config;
    try {
      fn(s);
    } catch (const ConfigError&) {
      throw;
    } catch (const ContractError& e) {
      throw ConfigError(name + ": " + e.what());
    } catch (const std::exception& e) {
      s.metrics["error"] = e.what();
      s.check("completed", std::string("experiment raised: ") + e.what(), 0, 1, 1, 0.0);
    }
    int fails = 0;
    for (const auto& c : s.checks) fails += c.pass ? 0 : 1;
    log << name << ": " << s.checks.size() << " checks, " << fails << " failed\n";
    sections.push_back(std::move(s));
  }

  json manifest;
  manifest["tool"] = "dtnlab";
  manifest["version"] = "0.1.0";
  manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION);
  manifest["compiler"] = __VERSION__;
  manifest["seed"] = config.seed;
  manifest["config"] = json::object();
  for (const auto& [k, v] : config.entries) manifest["config"][k] = v;
  manifest["experiments"] = json::array();
  int total = 0, failed = 0;
  for (const Section& s : sections) {
    json rec;
    rec["experiment"] = s.name;
    rec["checks"] = json::array();
    for (const auto& c : s.checks) {
      rec["checks"].push_back(check_json(c));
      ++total;
      failed += c.pass ? 0 : 1;
    }
    rec["metrics"] = s.metrics;
    const std::string file = s.name + ".json";
    write_file(options.out_dir / file, rec.dump(2) + "\n");
    json entry = {{"name", s.name}, {"record", file}, {"files", json::array()}};
    for (const auto& [fname, content] : s.files) {
      write_file(options.out_dir / fname, content);
      entry["files"].push_back(fname);
    }
    manifest["experiments"].push_back(entry);
  }
  manifest["checks"] = total;
  manifest["failures"] = failed;
  write_file(options.out_dir / "manifest.json", manifest.dump(2) + "\n");
  log << "total: " << total << " checks, " << failed << " failed\n";
  return failed == 0 ? 0 : 1;
}

ReportSummary report_directory(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) throw ContractError("no manifest.json in '" + dir.string() + "'");
  std::ifstream in(manifest_path);
  const json manifest = json::parse(in);
  ReportSummary out;
  std::ostringstream table;
  char line[512];
  std::snprintf(line, sizeof line, "%-48s %-12s %-12s %-4s  %s\n", "check_id", "gap", "tolerance", "", "reference");
  table << line;
  for (const auto& entry : manifest.at("experiments")) {
    std::ifstream rin(dir / entry.at("record").get<std::string>());
    if (!rin) throw ContractError("missing record file " + entry.at("record").get<std::string>());
    const json rec = json::parse(rin);
    for (const auto& c : rec.at("checks")) {
      const bool pass = c.at("pass").get<bool>();
      const double gap = c.at("gap").is_number() ? c.at("gap").get<double>() : INFINITY;
      std::snprintf(line, sizeof line, "%-48s %-12.4g %-12.4g %-4s  %s\n", c.at("check_id").get<std::string>().c_str(), gap,
                    c.at("tolerance").get<double>(), pass ? "PASS" : "FAIL", c.at("ref").get<std::string>().c_str());
      table << line;
      ++out.checks;
      out.failures += pass ? 0 : 1;
    }
  }
  table << out.checks << " checks, " << out.failures << " failures\n";
  out.table = table.str();
  return out;
}

}  // namespace dtnlab
