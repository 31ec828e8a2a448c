#include "varex/operators.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "face_iter.hpp"
#include "varex/util.hpp"

namespace varex {

namespace {

std::array<double, 2> model_flux(const KernelArgs& a) {
  const double mag = a.dim == 2 ? std::hypot(a.xi[0], a.xi[1]) : std::abs(a.xi[0]);
  if (mag == 0.0) return {0.0, 0.0};
  const double coef = a.theta * std::pow(mag, a.p - 2.0);
  return {coef * a.xi[0], coef * a.xi[1]};
}

}  // namespace

ProblemSpec make_p_laplacian_spec(const ProductMeasureGrid& m, StochasticField f, ScalarFn g,
                                  StochasticField gamma_fn, StochasticField k_fn, double alpha_c,
                                  double beta_c) {
  if (!(alpha_c > 0.0) || !(beta_c > 0.0))
    throw DomainError("problem spec: alpha and beta must be positive");
  if (k_fn.data.min_value() < 0.0) throw DomainError("problem spec: k(x,t) must be nonnegative");
  if (!f.data.same_shape(m) || !gamma_fn.data.same_shape(m) || !k_fn.data.same_shape(m))
    throw GridError("problem spec: field shapes do not match grid");

  ProblemSpec spec;
  spec.kind = ModelKind::p_laplacian_with_g;
  spec.A = model_flux;
  ScalarFn g_local = g;
  spec.A0 = [g_local](const KernelArgs& a) {
    const double mag = a.dim == 2 ? std::hypot(a.xi[0], a.xi[1]) : std::abs(a.xi[0]);
    if (mag == 0.0 && a.p < 2.0) return 0.0;
    return a.theta * g_local(a.s) * std::pow(mag, a.p - 1.0);
  };
  spec.f = std::move(f);
  spec.g = std::move(g);
  spec.gamma_fn = std::move(gamma_fn);
  spec.k_fn = std::move(k_fn);
  spec.alpha_c = alpha_c;
  spec.beta_c = beta_c;
  return spec;
}

OperatorPairing pairing(const StochasticField& u, const StochasticField& phi,
                        const ProblemSpec& spec, const ExponentField& p, const WeightField& w,
                        const ProductMeasureGrid& m) {
  if (!u.data.same_shape(m) || !phi.data.same_shape(m))
    throw GridError("pairing: field shapes do not match grid");

  const auto& g = m.grid;
  const VectorField grad_u = gradient(u, m);

  OperatorPairing out;
  for (int j = 0; j < m.n_samples(); ++j) {
    const double t = m.omega.samples[j];
    auto us = u.data.sample_slice(j);
    auto ps = phi.data.sample_slice(j);
    auto pexp = p.data.sample_slice(j);
    auto th = w.data.sample_slice(j);
    auto gx = grad_u.comp[0].sample_slice(j);
    auto gy = g.dim == 2 ? grad_u.comp[1].sample_slice(j) : std::span<const double>{};

    double flux_part = 0.0;
    detail::for_each_face(g, [&](const detail::FaceRef& f) {
      KernelArgs a;
      a.dim = g.dim;
      const auto clo = g.coords(f.node_lo);
      const auto chi = g.coords(f.node_hi);
      a.x = 0.5 * (clo[0] + chi[0]);
      a.y = 0.5 * (clo[1] + chi[1]);
      a.t = t;
      a.s = 0.5 * (us[f.node_lo] + us[f.node_hi]);
      a.theta = 0.5 * (th[f.node_lo] + th[f.node_hi]);
      a.p = 0.5 * (pexp[f.node_lo] + pexp[f.node_hi]);
      const double axial = (us[f.node_hi] - us[f.node_lo]) * f.inv_h;
      if (g.dim == 2) {
        const auto& trans = f.axis == 0 ? gy : gx;
        const double other = 0.5 * (trans[f.node_lo] + trans[f.node_hi]);
        a.xi[f.axis] = axial;
        a.xi[1 - f.axis] = other;
      } else {
        a.xi[0] = axial;
      }
      const auto flux = spec.A(a);
      const double dphi = (ps[f.node_hi] - ps[f.node_lo]) * f.inv_h;
      const double term = f.weight * flux[f.axis] * dphi;
      if (!std::isfinite(term))
        throw DomainError("pairing: non-finite flux integrand at face node " +
                          std::to_string(f.node_lo));
      flux_part += term;
    });

    double lower_part = 0.0;
    for (int node = 0; node < m.n_nodes(); ++node) {
      KernelArgs a;
      a.dim = g.dim;
      const auto c = g.coords(node);
      a.x = c[0];
      a.y = c[1];
      a.t = t;
      a.s = us[node];
      a.theta = th[node];
      a.p = pexp[node];
      a.xi[0] = gx[node];
      if (g.dim == 2) a.xi[1] = gy[node];
      const double term = g.quad_weights[node] * spec.A0(a) * ps[node];
      if (!std::isfinite(term))
        throw DomainError("pairing: non-finite lower-order integrand at node " +
                          std::to_string(node));
      lower_part += term;
    }

    out.gamma1_part += m.omega.probs[j] * flux_part;
    out.gamma2_part += m.omega.probs[j] * lower_part;
  }
  out.total = out.gamma1_part + out.gamma2_part;
  return out;
}

namespace {

std::string witness_string(int node, int sample, double s, const std::array<double, 2>& xi,
                           const std::array<double, 2>& mu, bool has_mu) {
  std::ostringstream os;
  os << "node=" << node << " sample=" << sample << " s=" << s << " xi=(" << xi[0] << "," << xi[1]
     << ")";
  if (has_mu) os << " mu=(" << mu[0] << "," << mu[1] << ")";
  return os.str();
}

void update_worst(GrowthCondition& cond, double slack, const std::string& witness) {
  if (cond.checked == 0 || slack < cond.worst_slack) {
    cond.worst_slack = slack;
    cond.witness = witness;
  }
  ++cond.checked;
}

}  // namespace

GrowthReport check_growth(const ProblemSpec& spec, const ExponentField& p, const WeightField& w,
                          const ProductMeasureGrid& m, long n_draws, std::uint64_t seed) {
  GrowthReport rep;
  auto rng = make_rng(seed, 0x67726f77ULL);
  std::uniform_int_distribution<int> node_dist(0, m.n_nodes() - 1);
  std::uniform_int_distribution<int> sample_dist(0, m.n_samples() - 1);
  std::uniform_real_distribution<double> val_dist(-3.0, 3.0);

  const int dim = m.grid.dim;
  for (long draw = 0; draw < n_draws; ++draw) {
    const int node = node_dist(rng);
    const int sample = sample_dist(rng);
    KernelArgs a;
    a.dim = dim;
    const auto c = m.grid.coords(node);
    a.x = c[0];
    a.y = c[1];
    a.t = m.omega.samples[sample];
    a.s = val_dist(rng);
    a.theta = w.data.at(node, sample);
    a.p = p.data.at(node, sample);
    a.xi = {val_dist(rng), dim == 2 ? val_dist(rng) : 0.0};
    std::array<double, 2> mu{val_dist(rng), dim == 2 ? val_dist(rng) : 0.0};
    // Exercise the degenerate point now and then.
    if (draw % 97 == 0) a.xi = {0.0, 0.0};

    const double q = a.p / (a.p - 1.0);
    const double ximag = dim == 2 ? std::hypot(a.xi[0], a.xi[1]) : std::abs(a.xi[0]);

    const auto flux = spec.A(a);
    const double amag = dim == 2 ? std::hypot(flux[0], flux[1]) : std::abs(flux[0]);

    // H3: |A| <= beta theta^{1/p} [k + theta^{1/q} |xi|^{p-1}]
    const double h3_rhs = spec.beta_c * std::pow(a.theta, 1.0 / a.p) *
                          (spec.k_fn.data.at(node, sample) +
                           std::pow(a.theta, 1.0 / q) * std::pow(ximag, a.p - 1.0));
    update_worst(rep.h3, normalized_slack(amag, h3_rhs),
                 witness_string(node, sample, a.s, a.xi, mu, false));

    // H4: (A(xi) - A(mu)) . (xi - mu) > 0 for xi != mu
    const double sep = dim == 2 ? std::hypot(a.xi[0] - mu[0], a.xi[1] - mu[1])
                                : std::abs(a.xi[0] - mu[0]);
    if (sep < 1e-8) {
      ++rep.h4.skipped;
    } else {
      KernelArgs b = a;
      b.xi = mu;
      const auto flux_mu = spec.A(b);
      double bracket = (flux[0] - flux_mu[0]) * (a.xi[0] - mu[0]);
      if (dim == 2) bracket += (flux[1] - flux_mu[1]) * (a.xi[1] - mu[1]);
      update_worst(rep.h4, bracket, witness_string(node, sample, a.s, a.xi, mu, true));
    }

    // H5: A . xi >= alpha theta |xi|^p
    const double axi = flux[0] * a.xi[0] + (dim == 2 ? flux[1] * a.xi[1] : 0.0);
    const double h5_rhs = spec.alpha_c * a.theta * std::pow(ximag, a.p);
    update_worst(rep.h5, normalized_slack(h5_rhs, axi),
                 witness_string(node, sample, a.s, a.xi, mu, false));

    // |A0| <= gamma + g(s) theta |xi|^{p-1}
    const double a0 = spec.A0(a);
    const double eq10_rhs = spec.gamma_fn.data.at(node, sample) +
                            spec.g(a.s) * a.theta * std::pow(ximag, a.p - 1.0);
    update_worst(rep.eq10, normalized_slack(std::abs(a0), eq10_rhs),
                 witness_string(node, sample, a.s, a.xi, mu, false));
  }

  rep.h3.pass = rep.h3.worst_slack >= -1e-12;
  rep.h4.pass = rep.h4.checked == 0 || rep.h4.worst_slack > 0.0;
  rep.h5.pass = rep.h5.worst_slack >= -1e-12;
  rep.eq10.pass = rep.eq10.worst_slack >= -1e-12;
  rep.pass = rep.h3.pass && rep.h4.pass && rep.h5.pass && rep.eq10.pass;
  return rep;
}

CoercivityReport coercivity_probe(const ProblemSpec& spec, const ExponentField& p,
                                  const WeightField& w, const ProductMeasureGrid& m,
                                  const StochasticField& u0, const std::vector<double>& scales) {
  if (scales.size() < 2)
    throw DomainError("coercivity_probe: need at least two scales to fit a slope");
  const double base_seminorm = w0_seminorm(u0, p, w, m);
  if (base_seminorm == 0.0) throw DomainError("coercivity_probe: u0 has zero gradient");

  CoercivityReport rep;
  for (double c : scales) {
    Field scaled = u0.data;
    for (double& v : scaled.values) v *= c;
    StochasticField cu{std::move(scaled), u0.zero_boundary};
    CoercivityRow row;
    row.scale = c;
    row.seminorm = w0_seminorm(cu, p, w, m);
    row.pairing_value = pairing(cu, cu, spec, p, w, m).total;
    row.ratio = row.pairing_value / row.seminorm;
    rep.rows.push_back(row);
  }

  // Least-squares slope of log(ratio) against log(seminorm).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rep.rows.size());
  for (const auto& r : rep.rows) {
    const double lx = std::log(r.seminorm);
    const double ly = std::log(std::max(r.ratio, 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.fitted_r = 1.0 + slope;

  rep.ratio_increasing = true;
  for (std::size_t i = rep.rows.size() / 2; i + 1 < rep.rows.size(); ++i)
    if (!(rep.rows[i + 1].ratio > rep.rows[i].ratio)) rep.ratio_increasing = false;
  rep.pass = rep.ratio_increasing && slope > 0.0;
  return rep;
}

double monotonicity_bracket(const ProblemSpec& spec, const StochasticField& u1,
                            const StochasticField& u2, const ExponentField& p,
                            const WeightField& w, const ProductMeasureGrid& m) {
  if (!u1.data.same_shape(m) || !u2.data.same_shape(m))
    throw GridError("monotonicity_bracket: field shapes do not match grid");
  const VectorField g1 = gradient(u1, m);
  const VectorField g2 = gradient(u2, m);
  const int dim = m.grid.dim;

  double total = 0.0;
  for (int j = 0; j < m.n_samples(); ++j) {
    double inner = 0.0;
    for (int node = 0; node < m.n_nodes(); ++node) {
      KernelArgs a;
      a.dim = dim;
      const auto c = m.grid.coords(node);
      a.x = c[0];
      a.y = c[1];
      a.t = m.omega.samples[j];
      a.s = u1.data.at(node, j);
      a.theta = w.data.at(node, j);
      a.p = p.data.at(node, j);
      a.xi = {g1.comp[0].at(node, j), dim == 2 ? g1.comp[1].at(node, j) : 0.0};
      KernelArgs b = a;
      b.xi = {g2.comp[0].at(node, j), dim == 2 ? g2.comp[1].at(node, j) : 0.0};
      const auto fa = spec.A(a);
      const auto fb = spec.A(b);
      double dot = (fa[0] - fb[0]) * (a.xi[0] - b.xi[0]);
      if (dim == 2) dot += (fa[1] - fb[1]) * (a.xi[1] - b.xi[1]);
      inner += m.grid.quad_weights[node] * dot;
    }
    total += m.omega.probs[j] * inner;
  }
  return total;
}

BoundednessReport boundedness_probe(const StochasticField& u, const StochasticField& phi,
                                    const ProblemSpec& spec, const ExponentField& p,
                                    const WeightField& w, const ProductMeasureGrid& m) {
  BoundednessReport rep;
  OperatorPairing pair = pairing(u, phi, spec, p, w, m);
  rep.lhs = std::abs(pair.gamma1_part);

  const ExponentField q = conjugate_exponent(p);
  const double q_minus = q.p_minus;
  const double q_plus = q.p_plus;

  // rho_q of A(., u, grad u) theta^{-1/p}, used only for the case split.
  const VectorField grad_u = gradient(u, m);
  Field a_scaled(m.n_nodes(), m.n_samples());
  const int dim = m.grid.dim;
  for (int j = 0; j < m.n_samples(); ++j) {
    for (int node = 0; node < m.n_nodes(); ++node) {
      KernelArgs a;
      a.dim = dim;
      const auto c = m.grid.coords(node);
      a.x = c[0];
      a.y = c[1];
      a.t = m.omega.samples[j];
      a.s = u.data.at(node, j);
      a.theta = w.data.at(node, j);
      a.p = p.data.at(node, j);
      a.xi = {grad_u.comp[0].at(node, j), dim == 2 ? grad_u.comp[1].at(node, j) : 0.0};
      const auto flux = spec.A(a);
      const double amag = dim == 2 ? std::hypot(flux[0], flux[1]) : std::abs(flux[0]);
      a_scaled.at(node, j) = amag * std::pow(a.theta, -1.0 / a.p);
    }
  }
  const double rho_a = modular(a_scaled, q.data, constant_field(m, 1.0), m);
  rep.theta_exponent = rho_a >= 1.0 ? 1.0 / q_minus : 1.0 / q_plus;

  Field k_pow_q(m.n_nodes(), m.n_samples());
  for (std::size_t i = 0; i < k_pow_q.values.size(); ++i)
    k_pow_q.values[i] = std::pow(spec.k_fn.data.values[i], q.data.values[i]);
  const double c1 = integrate(k_pow_q, m);

  Field grad_mag = grad_u.magnitude();
  const double rho_grad = modular(grad_mag, p.data, w.data, m);
  const double grad_phi_norm = w0_seminorm(phi, p, w, m);

  const double holder_c = 1.0 + 1.0 / p.p_minus - 1.0 / p.p_plus;
  const double beta_factor =
      std::max(std::pow(spec.beta_c, q_minus), std::pow(spec.beta_c, q_plus));
  const double big_m = beta_factor * std::pow(2.0, q_plus - 1.0);
  rep.bound = holder_c * std::pow(big_m * (c1 + rho_grad), rep.theta_exponent) * grad_phi_norm;
  rep.pass = normalized_slack(rep.lhs, rep.bound) >= -1e-9;
  return rep;
}

}  // namespace varex
