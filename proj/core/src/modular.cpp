#include "varex/modular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace varex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_zero(const Field& u) {
  for (double v : u.values)
    if (v != 0.0) return false;
  return true;
}

double scaled_modular(const Field& u, const Field& p, const Field& theta,
                      const ProductMeasureGrid& m, double inv_lambda) {
  double total = 0.0;
  for (int j = 0; j < m.n_samples(); ++j) {
    double inner = 0.0;
    auto us = u.sample_slice(j);
    auto ps = p.sample_slice(j);
    auto ts = theta.sample_slice(j);
    const auto& w = m.grid.quad_weights;
    for (int node = 0; node < m.n_nodes(); ++node) {
      const double a = std::abs(us[node]) * inv_lambda;
      inner += w[node] * ts[node] * std::pow(a, ps[node]);
    }
    total += m.omega.probs[j] * inner;
    if (!std::isfinite(total)) return kInf;
  }
  return total;
}

}  // namespace

double modular(const Field& u, const Field& p, const Field& theta, const ProductMeasureGrid& m) {
  if (!u.same_shape(m) || !p.same_shape(m) || !theta.same_shape(m))
    throw GridError("modular: field shapes do not match grid");
  return scaled_modular(u, p, theta, m, 1.0);
}

double modular(const StochasticField& u, const ExponentField& p, const WeightField& w,
               const ProductMeasureGrid& m) {
  return modular(u.data, p.data, w.data, m);
}

NormResult luxemburg_norm(const Field& u, const Field& p, const Field& theta,
                          const ProductMeasureGrid& m, const NormOptions& opts) {
  if (all_zero(u)) return NormResult{0.0, 0.0, 0, {0.0, 0.0}};

  const double rho1 = modular(u, p, theta, m);
  if (!std::isfinite(rho1))
    throw DomainError("luxemburg_norm: field not in space at this resolution (modular overflow)");

  const double p_minus = std::max(p.min_value(), 1e-12);
  NormResult res;

  // Starting guess; exact when the exponent is constant and theta == 1.
  double lambda = std::pow(std::max(1.0, rho1), 1.0 / p_minus);
  double rho = scaled_modular(u, p, theta, m, 1.0 / lambda);
  ++res.iterations;
  if (std::abs(rho - 1.0) <= opts.tol) {
    res.value = lambda;
    res.modular_at_unit = rho;
    res.bracket = {lambda, lambda};
    return res;
  }

  // Bracket the root by doubling/halving: rho(u/lambda) decreases in lambda.
  double lo, hi;
  if (rho > 1.0) {
    lo = lambda;
    hi = lambda;
    for (int k = 0; k < opts.max_scalings; ++k) {
      hi *= 2.0;
      rho = scaled_modular(u, p, theta, m, 1.0 / hi);
      ++res.iterations;
      if (rho <= 1.0) break;
      lo = hi;
    }
    if (rho > 1.0)
      throw DomainError("luxemburg_norm: bracket search exhausted (norm not representable)");
  } else {
    hi = lambda;
    lo = lambda;
    for (int k = 0; k < opts.max_scalings; ++k) {
      lo *= 0.5;
      rho = scaled_modular(u, p, theta, m, 1.0 / lo);
      ++res.iterations;
      if (rho >= 1.0) break;
      hi = lo;
    }
    if (rho < 1.0)
      throw DomainError("luxemburg_norm: bracket search exhausted (field vanishes numerically)");
  }

  double mid = 0.5 * (lo + hi);
  double rho_mid = 0.0;
  while (true) {
    mid = 0.5 * (lo + hi);
    rho_mid = scaled_modular(u, p, theta, m, 1.0 / mid);
    ++res.iterations;
    if (std::abs(rho_mid - 1.0) <= opts.tol) break;
    if (hi - lo <= opts.min_rel_width * mid) break;
    if (rho_mid > 1.0)
      lo = mid;
    else
      hi = mid;
  }

  res.value = mid;
  res.modular_at_unit = rho_mid;
  res.bracket = {lo, hi};
  return res;
}

NormResult luxemburg_norm(const StochasticField& u, const ExponentField& p, const WeightField& w,
                          const ProductMeasureGrid& m, const NormOptions& opts) {
  return luxemburg_norm(u.data, p.data, w.data, m, opts);
}

double sobolev_norm(const StochasticField& u, const ExponentField& p, const WeightField& w,
                    const ProductMeasureGrid& m) {
  const double nu = luxemburg_norm(u, p, w, m).value;
  Field grad_mag = gradient(u, m).magnitude();
  const double ng = luxemburg_norm(grad_mag, p.data, w.data, m).value;
  return nu + ng;
}

double w0_seminorm(const StochasticField& u, const ExponentField& p, const WeightField& w,
                   const ProductMeasureGrid& m) {
  Field grad_mag = gradient(u, m).magnitude();
  return luxemburg_norm(grad_mag, p.data, w.data, m).value;
}

Prop2Report check_prop2(const StochasticField& u, const ExponentField& p, const WeightField& w,
                        const ProductMeasureGrid& m) {
  Prop2Report rep;
  rep.mod = modular(u, p, w, m);
  rep.norm = luxemburg_norm(u, p, w, m).value;
  if (rep.norm == 0.0) {
    rep.lower = rep.upper = 0.0;
    rep.slack = 0.0;
    rep.pass = rep.mod == 0.0;
    return rep;
  }
  const double npm = std::pow(rep.norm, p.p_minus);
  const double npp = std::pow(rep.norm, p.p_plus);
  if (rep.norm >= 1.0) {
    rep.lower = npm;
    rep.upper = npp;
  } else {
    rep.lower = npp;
    rep.upper = npm;
  }
  const double s1 = normalized_slack(rep.lower, rep.mod);
  const double s2 = normalized_slack(rep.mod, rep.upper);
  rep.slack = std::min(s1, s2);
  rep.pass = rep.slack >= -1e-9;
  return rep;
}

}  // namespace varex
