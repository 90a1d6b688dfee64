#include "dtnlab/holomorphy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dtnlab {

namespace {

VecXc complex_trace(const Discretization& disc, const VecXc& pairing) {
  const VecX re = disc.to_trace(VecX(pairing.real()));
  const VecX im = disc.to_trace(VecX(pairing.imag()));
  VecXc out(re.size());
  for (Eigen::Index i = 0; i < re.size(); ++i) out[i] = Complex(re[i], im[i]);
  return out;
}

}  // namespace

SpectralTraceData SpectralTraceData::build(const Discretization& disc, int count, double mu) {
  if (!(mu > 0.0)) throw ContractError("reference value mu must be positive");
  SpectralTraceData data;
  data.eigen = dirichlet_eigensystem(disc, PotentialField::zero(disc.mesh().vertex_count()), count);
  data.mu = mu;
  return data;
}

VecX SpectralTraceData::coefficients(const BoundaryTrace& f) const { return eigen.flux_pairing.transpose() * f; }

CoefficientCheck coefficient_identity(const Discretization& disc, const SpectralTraceData& data, const BoundaryTrace& f) {
  const DofMap& dofs = disc.dofs();
  const DirichletSolver laplace(disc, disc.stiffness());
  const VecX u0 = laplace.solve(f);
  const VecX mu0 = dofs.interior_part(VecX(disc.mass().matrix() * u0));
  const double u0_norm = disc.l2_norm(u0);
  const VecX c = data.coefficients(f);
  CoefficientCheck out;
  out.count = data.count();
  out.gaps.resize(out.count);
  for (int k = 0; k < out.count; ++k) {
    const double lam = data.eigen.eigenvalues[k];
    const double pairing = mu0.dot(data.eigen.vectors.col(k));
    const double scale = std::abs(lam) * u0_norm;
    out.gaps[k] = scale > 0.0 ? std::abs(c[k] + lam * pairing) / scale : std::abs(c[k] + lam * pairing);
    out.max_rel_gap = std::max(out.max_rel_gap, out.gaps[k]);
  }
  return out;
}

VecXc zeta_partial(const SpectralTraceData& data, const BoundaryTrace& f, Complex z, int n) {
  if (z.real() < 0.0) throw ContractError("zeta_partial requires Re z >= 0");
  if (n < 0 || n > data.count()) throw ContractError("N exceeds the eigensystem size");
  const VecX c = data.coefficients(f);
  VecXc out = VecXc::Zero(data.eigen.flux_traces.rows());
  for (int k = 0; k < n; ++k) {
    const double lam = data.eigen.eigenvalues[k];
    const Complex w = c[k] / ((lam + z) * (lam + data.mu));
    out += w * data.eigen.flux_traces.col(k).cast<Complex>();
  }
  return out;
}

VecX mass_layer_term(const Discretization& disc, const BoundaryTrace& f) {
  const DofMap& dofs = disc.dofs();
  const Blocks<double> m = partition(disc.mass().matrix(), dofs);
  VecX pairing = m.bb * f;
  if (dofs.interior_count() > 0) {
    Eigen::SimplicialLLT<SpMat> llt(m.ii);
    pairing -= m.bi * llt.solve(VecX(m.ib * f));
  }
  return disc.to_trace(pairing);
}

VecXc resolvent_apply(const Discretization& disc, Complex z, const BoundaryTrace& f) {
  if (z.real() < 0.0) throw ContractError("resolvent requires Re z >= 0");
  const SpMatC a = disc.stiffness().matrix().cast<Complex>() + z * disc.mass().matrix().cast<Complex>();
  const Blocks<Complex> blocks = partition(a, disc.dofs());
  const VecXc fc = f.cast<Complex>();
  VecXc out = blocks.bb * fc;
  if (disc.dofs().interior_count() > 0) {
    Eigen::SparseLU<SpMatC> lu;
    lu.analyzePattern(blocks.ii);
    lu.factorize(blocks.ii);
    if (lu.info() != Eigen::Success) throw SingularOperatorError("resolvent interior block is singular");
    out -= blocks.bi * lu.solve(VecXc(blocks.ib * fc));
  }
  return out;
}

VecXc zeta_direct(const Discretization& disc, const BoundaryTrace& f, Complex z, double mu) {
  if (!(mu > 0.0)) throw ContractError("reference value mu must be positive");
  if (std::abs(z - mu) == 0.0) throw ContractError("z = mu: remove singularity via zeta_partial or a limiting difference");
  const VecXc diff = resolvent_apply(disc, z, f) - resolvent_apply(disc, Complex(mu, 0.0), f);
  return complex_trace(disc, VecXc(diff / (z - mu)));
}

ResolventConvergence resolvent_convergence(const Discretization& disc, const SpectralTraceData& data,
                                           const BoundaryTrace& f, Complex z, const std::vector<int>& schedule) {
  ResolventConvergence out;
  out.z = z;
  out.schedule = schedule;
  const VecXc target = zeta_direct(disc, f, z, data.mu) - mass_layer_term(disc, f).cast<Complex>();
  out.direct_norm = disc.b_norm(target);
  out.errors.resize(schedule.size());
  const int n = static_cast<int>(schedule.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) out.errors[i] = disc.b_norm(VecXc(zeta_partial(data, f, z, schedule[i]) - target));
  return out;
}

double uniform_bound(const Discretization& disc, const SpectralTraceData& data, const BoundaryTrace& f, int n,
                     const std::vector<Complex>& zs) {
  const double fn = disc.b_norm(f);
  if (fn == 0.0) return 0.0;
  double worst = 0.0;
  for (const Complex& z : zs) worst = std::max(worst, disc.b_norm(zeta_partial(data, f, z, n)) / fn);
  return worst;
}

ZetaGapReport zeta_gap_audit(const Discretization& first, const Discretization& second, const BoundaryTrace& f,
                             const std::vector<Complex>& zs, double mu, const std::vector<double>& mu_sequence) {
  if (first.mesh().vertex_count() != second.mesh().vertex_count() ||
      first.dofs().boundary_count() != second.dofs().boundary_count())
    throw ContractError("zeta gap audit needs both metrics on the same mesh");
  ZetaGapReport rep;
  auto row = [&](Complex z, double ref) {
    const VecXc a = zeta_direct(first, f, z, ref);
    const VecXc b = zeta_direct(second, f, z, ref);
    ZetaGapRow r;
    r.z = z;
    r.gap = first.b_norm(VecXc(a - b));
    const double na = first.b_norm(a);
    r.relative = na > 0.0 ? r.gap / na : r.gap;
    rep.max_gap = std::max(rep.max_gap, r.gap);
    return r;
  };
  for (const Complex& z : zs) rep.rows.push_back(row(z, mu));
  // Along z = mu_k the reference is shifted to mu_k + 1 to stay off the pole.
  for (double m : mu_sequence) rep.mu_rows.push_back(row(Complex(m, 0.0), m + 1.0));
  return rep;
}

Complex mobius(Complex z) {
  if (z == Complex(1.0, 0.0)) throw ContractError("mobius map has a pole at z = 1");
  return (1.0 + z) / (1.0 - z);
}

Complex mobius_inverse(Complex w) {
  if (w == Complex(-1.0, 0.0)) throw ContractError("inverse mobius map has a pole at w = -1");
  return (w - 1.0) / (w + 1.0);
}

namespace {

double refine_zero(const ScalarProfile& g, double a, double b) {
  double ga = g.value(a);
  for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double gm = g.value(m);
    if (gm == 0.0) return m;
    if ((gm < 0.0) == (ga < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  double t = 0.5 * (a + b);
  const double d = g.derivative(t);
  if (d != 0.0) t -= g.value(t) / d;
  return t;
}

}  // namespace

BlaschkeSequence blaschke_audit(const ScalarProfile& g, int k_max, double t_max, int divergence_k) {
  BlaschkeSequence seq;
  seq.descriptor = g.spec().to_string();
  seq.divergence_k = divergence_k;
  constexpr double kStep = 0.1;
  double a = 0.5 * kStep;
  double ga = g.value(a);
  while (static_cast<int>(seq.zeros.size()) < k_max && a < t_max) {
    const double b = a + kStep;
    const double gb = g.value(b);
    double t = -1.0;
    if (gb == 0.0) {
      t = b;
    } else if ((ga < 0.0) != (gb < 0.0)) {
      t = refine_zero(g, a, b);
    }
    if (t > 0.0) {
      const double mu = t * g.derivative(t);
      if (mu > 1.0) {
        seq.zeros.push_back(t);
        seq.mu.push_back(mu);
      }
    }
    a = b;
    ga = gb;
  }
  if (seq.zeros.empty()) throw ContractError("no qualifying zeros of G found in range");

  double inv = 0.0, bl = 0.0, id = 0.0;
  for (std::size_t k = 0; k < seq.zeros.size(); ++k) {
    const double mu = seq.mu[k];
    const double r = (mu - 1.0) / (1.0 + mu);
    seq.r.push_back(r);
    inv += 1.0 / mu;
    bl += 1.0 - std::abs(r);
    id += 2.0 / (1.0 + mu);
    seq.inverse_sum.push_back(inv);
    seq.blaschke_sum.push_back(bl);
    seq.identity_sum.push_back(id);
    seq.max_identity_gap = std::max(seq.max_identity_gap, std::abs(bl - id));
    seq.max_residual = std::max(seq.max_residual, std::abs(g.value(seq.zeros[k])));
    if (k > 0 && !(mu > seq.mu[k - 1])) seq.monotone = false;
  }

  const int k = divergence_k;
  if (k > 0 && static_cast<int>(seq.zeros.size()) >= 10 * k) {
    seq.increment = seq.identity_sum[10 * k - 1] - seq.identity_sum[k - 1];
    const double c = (seq.mu[10 * k - 1] - seq.mu[k - 1]) / (9.0 * k);
    seq.model_increment = (2.0 / c) * std::log(10.0);
    seq.divergence_established = seq.increment > 0.5 * seq.model_increment;
    seq.message = seq.divergence_established ? "partial sums grow like the logarithmic model"
                                             : "partial sums fall short of the logarithmic model";
  } else {
    seq.message = "divergence not established on range";
  }
  return seq;
}

std::string blaschke_csv(const BlaschkeSequence& seq) {
  std::ostringstream out;
  out << "K,t_K,mu_K,S_K,blaschke_sum\n";
  char buf[160];
  for (std::size_t k = 0; k < seq.zeros.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", k + 1, seq.zeros[k], seq.mu[k], seq.identity_sum[k],
                  seq.blaschke_sum[k]);
    out << buf;
  }
  return out.str();
}

}  // namespace dtnlab
