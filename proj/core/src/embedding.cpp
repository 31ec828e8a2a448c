#include "varex/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace varex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Field unit_field(const ProductMeasureGrid& m) { return constant_field(m, 1.0); }

}  // namespace

EmbeddingExponents critical_exponents(const ExponentField& p, const AuxExponentField& s, int d,
                                      const ProductMeasureGrid& m,
                                      const std::optional<Field>& alpha,
                                      const std::optional<Field>& q_target) {
  if (d < 1) throw DomainError("critical_exponents: dimension must be >= 1");
  EmbeddingExponents e;
  e.p_star = Field(m.n_nodes(), m.n_samples());
  e.p_s = Field(m.n_nodes(), m.n_samples());
  e.p_s_star = Field(m.n_nodes(), m.n_samples());
  const double dd = static_cast<double>(d);
  for (std::size_t i = 0; i < e.p_s.values.size(); ++i) {
    const double pv = p.data.values[i];
    const double sv = s.data.values[i];
    e.p_star.values[i] = pv < dd ? dd * pv / (dd - pv) : kInf;
    const double ps = pv * sv / (sv + 1.0);
    e.p_s.values[i] = ps;
    // The "arbitrary" branch maps to +inf by convention.
    e.p_s_star.values[i] = ps < dd ? dd * ps / (dd * (sv + 1.0) - pv * sv) : kInf;
  }
  if (alpha) {
    e.alpha = *alpha;
    if (q_target) {
      Field r(m.n_nodes(), m.n_samples());
      for (std::size_t i = 0; i < r.values.size(); ++i) {
        const double a = alpha->values[i];
        if (!(a > 1.0)) throw DomainError("critical_exponents: alpha must exceed 1");
        r.values[i] = a / (a - 1.0) * q_target->values[i];
      }
      e.r = std::move(r);
    }
  }
  return e;
}

HolderReport check_holder(const StochasticField& f, const StochasticField& g,
                          const ExponentField& p, const WeightField& w,
                          const ProductMeasureGrid& m) {
  HolderReport rep;
  Field fg(m.n_nodes(), m.n_samples());
  for (std::size_t i = 0; i < fg.values.size(); ++i)
    fg.values[i] = std::abs(f.data.values[i] * g.data.values[i]);
  rep.lhs = integrate(fg, m);

  const ExponentField q = conjugate_exponent(p);
  const WeightField w_conj = conjugate_weight(w, p);
  rep.norm_f = luxemburg_norm(f, p, w, m).value;
  rep.norm_g = luxemburg_norm(g.data, q.data, w_conj.data, m).value;
  if (!std::isfinite(rep.norm_f) || !std::isfinite(rep.norm_g))
    throw DomainError("check_holder: non-finite norm");
  rep.constant = 1.0 + 1.0 / p.p_minus - 1.0 / p.p_plus;
  rep.rhs = rep.constant * rep.norm_f * rep.norm_g;
  rep.slack = normalized_slack(rep.lhs, rep.rhs);
  rep.pass = rep.slack >= -1e-9;
  return rep;
}

double poincare_ratio(const StochasticField& u, const ExponentField& p, const WeightField& w,
                      const ProductMeasureGrid& m) {
  if (!u.zero_boundary) throw DomainError("poincare_ratio: field must be zero on the boundary");
  const double denom = w0_seminorm(u, p, w, m);
  if (denom == 0.0) throw DomainError("poincare_ratio: gradient vanishes (u == 0)");
  const double num = luxemburg_norm(u, p, w, m).value;
  return num / denom;
}

namespace {

// Prop-2 case split: returns field min when the norm is >= 1, else max
// (lower-exponent direction of the norm->modular bound).
double select_gamma_lower(double norm, double lo, double hi) { return norm >= 1.0 ? lo : hi; }

struct RawNorm {
  double value;
};

RawNorm raw_norm(const Field& u, const Field& expnt, const Field& theta,
                 const ProductMeasureGrid& m) {
  return {luxemburg_norm(u, expnt, theta, m).value};
}

}  // namespace

ChainTerms embedding_chain_terms(const StochasticField& u, const ExponentField& p,
                                 const AuxExponentField& s, const WeightField& w,
                                 const ProductMeasureGrid& m) {
  if (!w.h2_ok)
    throw HypothesisError(
        "embedding_chain_terms: weight failed the negative-power integrability condition");

  const Field ones = unit_field(m);
  Field grad_mag = gradient(u, m).magnitude();

  // Exponent helper fields.
  Field p_s(m.n_nodes(), m.n_samples());
  Field ratio_r(m.n_nodes(), m.n_samples());   // p/p_s = (s+1)/s
  Field s_plus1(m.n_nodes(), m.n_samples());
  Field f_big(m.n_nodes(), m.n_samples());     // |grad u|^{p_s} theta^{p_s/p}
  Field g_small(m.n_nodes(), m.n_samples());   // theta^{-s/(s+1)}
  Field theta_inv(m.n_nodes(), m.n_samples());
  for (std::size_t i = 0; i < p_s.values.size(); ++i) {
    const double pv = p.data.values[i];
    const double sv = s.data.values[i];
    const double th = w.data.values[i];
    const double ps = pv * sv / (sv + 1.0);
    p_s.values[i] = ps;
    ratio_r.values[i] = (sv + 1.0) / sv;
    s_plus1.values[i] = sv + 1.0;
    f_big.values[i] = std::pow(grad_mag.values[i], ps) * std::pow(th, ps / pv);
    g_small.values[i] = std::pow(th, -sv / (sv + 1.0));
    theta_inv.values[i] = 1.0 / th;
  }

  const double rho_grad = modular(grad_mag, p.data, w.data, m);
  const double rho_s_theta_inv = modular(theta_inv, s.data, ones, m);
  const double lhs6 = modular(grad_mag, p_s, ones, m);

  const double norm_f = raw_norm(f_big, ratio_r, ones, m).value;
  const double norm_g = raw_norm(g_small, s_plus1, ones, m).value;

  ChainTerms t;
  t.gamma1 = select_gamma_lower(norm_f, ratio_r.min_value(), ratio_r.max_value());
  t.gamma2 = select_gamma_lower(norm_g, s.s_minus + 1.0, s.s_plus + 1.0);

  t.grad_norm_ps = raw_norm(grad_mag, p_s, ones, m).value;
  t.gamma3 = select_gamma_lower(t.grad_norm_ps, p_s.min_value(), p_s.max_value());

  t.grad_norm_weighted = luxemburg_norm(grad_mag, p.data, w.data, m).value;
  // Upper bound of the norm--modular chain flips the case.
  t.gamma4 = t.grad_norm_weighted >= 1.0 ? p.p_plus : p.p_minus;

  const double holder_c =
      1.0 + 1.0 / ratio_r.min_value() - 1.0 / ratio_r.max_value();

  t.eq6.lhs = lhs6;
  t.eq6.base = std::pow(rho_grad, 1.0 / t.gamma1) * std::pow(rho_s_theta_inv, 1.0 / t.gamma2);
  t.eq6.derived = holder_c;

  t.eq7.lhs = std::pow(t.grad_norm_ps, t.gamma3);
  t.eq7.base = std::pow(rho_grad, 1.0 / t.gamma1);
  t.eq7.derived = holder_c * std::pow(rho_s_theta_inv, 1.0 / t.gamma2);

  t.eq8.lhs = t.grad_norm_ps;
  t.eq8.base = std::pow(t.grad_norm_weighted, t.gamma4 / (t.gamma1 * t.gamma3));
  t.eq8.derived = std::pow(t.eq7.derived, 1.0 / t.gamma3);

  // Linear comparison of the norms of u itself; single-constant bound
  // from the finite measure and the weight's lower bound.
  t.eq9.lhs = raw_norm(u.data, p_s, ones, m).value;
  t.eq9.base = luxemburg_norm(u, p, w, m).value;
  const double measure = m.grid.measure();
  const double c_min = w.data.min_value();
  t.eq9.derived = std::pow(1.0 + measure, 1.0 / p_s.min_value()) *
                  std::pow(std::max(1.0, 1.0 / c_min), 1.0 / p.p_minus);

  for (ChainInequality* eq : {&t.eq6, &t.eq7, &t.eq8, &t.eq9})
    eq->ratio = eq->base > 0.0 ? eq->lhs / eq->base : 0.0;
  return t;
}

ChainCalibration calibrate_chain(const std::vector<ChainTerms>& seed_family) {
  ChainCalibration cal;
  cal.family_size = static_cast<int>(seed_family.size());
  for (const auto& t : seed_family) {
    cal.c6 = std::max(cal.c6, t.eq6.ratio);
    cal.c7 = std::max(cal.c7, t.eq7.ratio);
    cal.c8 = std::max(cal.c8, t.eq8.ratio);
    cal.c9 = std::max(cal.c9, t.eq9.ratio);
  }
  return cal;
}

ChainValidation validate_chain(const ChainTerms& t, const ChainCalibration& cal) {
  ChainValidation v;
  v.worst_margin = kInf;
  const std::pair<const ChainInequality*, double> eqs[] = {
      {&t.eq6, cal.c6}, {&t.eq7, cal.c7}, {&t.eq8, cal.c8}, {&t.eq9, cal.c9}};
  for (const auto& [eq, c_cal] : eqs) {
    const double c = std::max(c_cal, eq->derived);
    v.worst_margin = std::min(v.worst_margin, normalized_slack(eq->lhs, c * eq->base));
  }
  v.pass = v.worst_margin >= -1e-9;
  return v;
}

LocalBoundReport local_integrability_bound(const StochasticField& u, const ExponentField& p,
                                           const WeightField& w, const ProductMeasureGrid& m,
                                           const SubBox& k) {
  ProductMeasureGrid mk;
  mk.grid = restrict_grid(m.grid, k);
  mk.omega = m.omega;

  const int ns = m.n_samples();
  Field uk = restrict_field(u.data, m.grid, k, ns);
  Field pk = restrict_field(p.data, m.grid, k, ns);
  Field wk = restrict_field(w.data, m.grid, k, ns);

  Field abs_u = uk;
  for (double& v : abs_u.values) v = std::abs(v);
  LocalBoundReport rep;
  rep.lhs = integrate(abs_u, mk);

  Field qk(uk.n_nodes, ns), u_th(uk.n_nodes, ns), th_neg(uk.n_nodes, ns), onesk(uk.n_nodes, ns);
  for (std::size_t i = 0; i < qk.values.size(); ++i) {
    const double pv = pk.values[i];
    qk.values[i] = pv / (pv - 1.0);
    u_th.values[i] = std::abs(uk.values[i]) * std::pow(wk.values[i], 1.0 / pv);
    th_neg.values[i] = std::pow(wk.values[i], -1.0 / pv);
    onesk.values[i] = 1.0;
  }
  const double norm_u = luxemburg_norm(u_th, pk, onesk, mk).value;
  const double norm_th = luxemburg_norm(th_neg, qk, onesk, mk).value;
  rep.a_k = 1.0 + 1.0 / pk.min_value() - 1.0 / pk.max_value();
  rep.rhs = rep.a_k * norm_u * norm_th;
  rep.pass = normalized_slack(rep.lhs, rep.rhs) >= -1e-9;
  return rep;
}

CompactBoundReport weighted_modular_bound(const StochasticField& u, const Field& q_target,
                                          const Field& alpha, const ExponentField& p,
                                          const WeightField& w, const ProductMeasureGrid& m) {
  const Field ones = unit_field(m);
  Field u_pow_q(m.n_nodes(), m.n_samples());
  Field alpha0(m.n_nodes(), m.n_samples());
  for (std::size_t i = 0; i < u_pow_q.values.size(); ++i) {
    const double a = alpha.values[i];
    if (!(a > 1.0)) throw DomainError("weighted_modular_bound: alpha must exceed 1");
    u_pow_q.values[i] = std::pow(std::abs(u.data.values[i]), q_target.values[i]);
    alpha0.values[i] = a / (a - 1.0);
  }
  CompactBoundReport rep;
  rep.lhs = modular(u.data, q_target, w.data, m);
  const double holder_c = 1.0 + 1.0 / p.p_minus - 1.0 / p.p_plus;
  const double norm_theta = luxemburg_norm(w.data, alpha, ones, m).value;
  const double norm_uq = luxemburg_norm(u_pow_q, alpha0, ones, m).value;
  rep.rhs = holder_c * norm_theta * norm_uq;
  rep.pass = normalized_slack(rep.lhs, rep.rhs) >= -1e-9;
  return rep;
}

WeakConvergencePanel weak_convergence_panel(const std::vector<StochasticField>& seq,
                                            const StochasticField& u,
                                            const std::vector<StochasticField>& duals,
                                            const ExponentField& p, const WeightField& w,
                                            const ProductMeasureGrid& m,
                                            const WeakConvergenceOptions& opts) {
  if (seq.empty()) throw DomainError("weak_convergence_panel: empty sequence");
  if (duals.empty()) throw DomainError("weak_convergence_panel: empty dual panel");

  WeakConvergencePanel panel;

  for (const auto& un : seq) {
    const double nv = luxemburg_norm(un, p, w, m).value;
    if (!std::isfinite(nv))
      throw HypothesisError("weak_convergence_panel: non-finite norm in the sequence");
    panel.norms.push_back(nv);
    panel.sup_norm = std::max(panel.sup_norm, nv);
  }
  if (opts.norm_bound && panel.sup_norm > *opts.norm_bound)
    throw HypothesisError("weak_convergence_panel: sequence norms exceed the stated bound");

  // a.e. convergence at grid level: every interior node must either end
  // within tolerance of the limit or show decreasing error over the
  // last half of the sequence. Boundary nodes are measure-zero.
  const std::size_t len = seq.size();
  const std::size_t half = len >= 2 ? std::min(len / 2, len - 2) : 0;
  for (int j = 0; j < m.n_samples(); ++j) {
    for (int node = 0; node < m.n_nodes(); ++node) {
      if (m.grid.is_boundary(node)) continue;
      const double e_final = std::abs(seq[len - 1].data.at(node, j) - u.data.at(node, j));
      if (e_final <= opts.ptwise_tol) continue;
      const double e_half = std::abs(seq[half].data.at(node, j) - u.data.at(node, j));
      bool decreasing = len >= 2;
      double prev = e_half;
      for (std::size_t k = half + 1; k < len; ++k) {
        const double ek = std::abs(seq[k].data.at(node, j) - u.data.at(node, j));
        if (ek > prev * (1.0 + 1e-9) + 1e-14) {
          decreasing = false;
          break;
        }
        prev = ek;
      }
      if (!decreasing || !(e_final < e_half))
        throw HypothesisError(
            "weak_convergence_panel: pointwise a.e. convergence hypothesis violated at an "
            "interior node");
    }
  }

  const ExponentField q = conjugate_exponent(p);
  const WeightField w_conj = conjugate_weight(w, p);

  panel.pass = true;
  for (const auto& g : duals) {
    const double gnorm = luxemburg_norm(g.data, q.data, w_conj.data, m).value;
    if (!std::isfinite(gnorm))
      throw DomainError("weak_convergence_panel: dual field has non-finite norm");
    std::vector<double> row;
    Field prod(m.n_nodes(), m.n_samples());
    for (const auto& un : seq) {
      for (std::size_t i = 0; i < prod.values.size(); ++i)
        prod.values[i] = un.data.values[i] * g.data.values[i];
      row.push_back(integrate(prod, m));
    }
    for (std::size_t i = 0; i < prod.values.size(); ++i)
      prod.values[i] = u.data.values[i] * g.data.values[i];
    const double limit = integrate(prod, m);

    // Pass rule: deviation eventually small and non-increasing over the
    // last half of the sequence.
    const double d_final = std::abs(row.back() - limit);
    bool ok = d_final <= opts.pairing_tol;
    double prev = std::abs(row[half] - limit);
    for (std::size_t k = half + 1; k < row.size() && ok; ++k) {
      const double dk = std::abs(row[k] - limit);
      if (dk > prev * (1.0 + 1e-9) + 1e-12) ok = false;
      prev = dk;
    }
    panel.pass = panel.pass && ok;
    panel.pairings.push_back(std::move(row));
    panel.pairing_limit.push_back(limit);
  }
  return panel;
}

}  // namespace varex
