#include "varex/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace varex {

namespace {

void require_shape(const Field& f, const ProductMeasureGrid& m, const char* what) {
  if (!f.same_shape(m))
    throw GridError(std::string(what) + ": field shape " + std::to_string(f.n_nodes) + "x" +
                    std::to_string(f.n_samples) + " does not match grid " +
                    std::to_string(m.n_nodes()) + "x" + std::to_string(m.n_samples()));
}

}  // namespace

double Field::min_value() const {
  double v = std::numeric_limits<double>::infinity();
  for (double x : values) v = std::min(v, x);
  return v;
}

double Field::max_value() const {
  double v = -std::numeric_limits<double>::infinity();
  for (double x : values) v = std::max(v, x);
  return v;
}

Field constant_field(const ProductMeasureGrid& m, double c) {
  return Field(m.n_nodes(), m.n_samples(), c);
}

Field field_from_fn(const ProductMeasureGrid& m, const SpaceSampleFn& fn) {
  Field f(m.n_nodes(), m.n_samples());
  for (int j = 0; j < m.n_samples(); ++j) {
    const double t = m.omega.samples[j];
    for (int node = 0; node < m.n_nodes(); ++node) {
      auto xy = m.grid.coords(node);
      f.at(node, j) = fn(xy[0], xy[1], t);
    }
  }
  return f;
}

StochasticField make_stochastic_field(const ProductMeasureGrid& m, Field values,
                                      bool zero_boundary) {
  require_shape(values, m, "stochastic field");
  if (zero_boundary) {
    for (int j = 0; j < m.n_samples(); ++j)
      for (int node = 0; node < m.n_nodes(); ++node)
        if (m.grid.is_boundary(node) && values.at(node, j) != 0.0)
          throw DomainError("zero_boundary field has nonzero value on a boundary node");
  }
  return StochasticField{std::move(values), zero_boundary};
}

StochasticField make_stochastic_field(const ProductMeasureGrid& m, const SpaceSampleFn& fn,
                                      bool zero_boundary) {
  return make_stochastic_field(m, field_from_fn(m, fn), zero_boundary);
}

StochasticField apply_zero_boundary(const ProductMeasureGrid& m, Field values) {
  require_shape(values, m, "stochastic field");
  for (int j = 0; j < m.n_samples(); ++j)
    for (int node = 0; node < m.n_nodes(); ++node)
      if (m.grid.is_boundary(node)) values.at(node, j) = 0.0;
  return StochasticField{std::move(values), true};
}

ExponentField make_exponent_field(const ProductMeasureGrid& m, Field values) {
  require_shape(values, m, "exponent field");
  double lo = values.min_value();
  double hi = values.max_value();
  if (!(lo > 1.0))
    throw DomainError("exponent field must satisfy p > 1 everywhere (min " + std::to_string(lo) +
                      ")");
  if (!std::isfinite(hi)) throw DomainError("exponent field must be finite");
  ExponentField p;
  p.data = std::move(values);
  p.p_minus = lo;
  p.p_plus = hi;
  return p;
}

ExponentField make_exponent_field(const ProductMeasureGrid& m, const SpaceSampleFn& fn) {
  return make_exponent_field(m, field_from_fn(m, fn));
}

ExponentField make_constant_exponent(const ProductMeasureGrid& m, double p) {
  return make_exponent_field(m, constant_field(m, p));
}

AuxExponentField make_aux_exponent_field(const ProductMeasureGrid& m, Field values) {
  require_shape(values, m, "aux exponent field");
  double lo = values.min_value();
  if (!(lo > 0.0)) throw DomainError("auxiliary exponent s must be strictly positive");
  AuxExponentField s;
  s.s_minus = lo;
  s.s_plus = values.max_value();
  s.data = std::move(values);
  return s;
}

AuxExponentField make_aux_exponent_field(const ProductMeasureGrid& m, const SpaceSampleFn& fn) {
  return make_aux_exponent_field(m, field_from_fn(m, fn));
}

WeightField make_weight_field(const ProductMeasureGrid& m, Field values) {
  require_shape(values, m, "weight field");
  double lo = values.min_value();
  if (!(lo >= kWeightFloor))
    throw DomainError("weight must be >= 1e-300 everywhere (min " + std::to_string(lo) + ")");
  WeightField w;
  w.data = std::move(values);
  return w;
}

WeightField make_weight_field(const ProductMeasureGrid& m, const SpaceSampleFn& fn) {
  return make_weight_field(m, field_from_fn(m, fn));
}

WeightField unit_weight(const ProductMeasureGrid& m) {
  WeightField w;
  w.data = constant_field(m, 1.0);
  w.h1_ok = true;
  w.h2_ok = true;
  return w;
}

Field VectorField::magnitude() const {
  Field out = comp[0];
  if (dim == 2) {
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] = std::hypot(comp[0].values[i], comp[1].values[i]);
  } else {
    for (double& v : out.values) v = std::abs(v);
  }
  return out;
}

double integrate(const Field& f, const ProductMeasureGrid& m) {
  require_shape(f, m, "integrate");
  double total = 0.0;
  for (int j = 0; j < m.n_samples(); ++j) {
    double inner = 0.0;
    auto slice = f.sample_slice(j);
    const auto& w = m.grid.quad_weights;
    for (int node = 0; node < m.n_nodes(); ++node) inner += w[node] * slice[node];
    total += m.omega.probs[j] * inner;
  }
  return total;
}

double integrate(const StochasticField& f, const ProductMeasureGrid& m) {
  return integrate(f.data, m);
}

std::pair<double, double> ess_bounds(const ExponentField& p) {
  return {p.p_minus, p.p_plus};
}

ExponentField conjugate_exponent(const ExponentField& p) {
  ExponentField q;
  q.data = Field(p.data.n_nodes, p.data.n_samples);
  for (std::size_t i = 0; i < p.data.values.size(); ++i) {
    const double pv = p.data.values[i];
    if (!(pv > 1.0)) throw DomainError("conjugate exponent requires p > 1");
    q.data.values[i] = pv / (pv - 1.0);
  }
  q.p_minus = q.data.min_value();
  q.p_plus = q.data.max_value();
  return q;
}

WeightField conjugate_weight(const WeightField& w, const ExponentField& p) {
  WeightField out;
  out.data = Field(w.data.n_nodes, w.data.n_samples);
  for (std::size_t i = 0; i < w.data.values.size(); ++i) {
    const double pv = p.data.values[i];
    const double q = pv / (pv - 1.0);
    out.data.values[i] = std::pow(w.data.values[i], 1.0 - q);
  }
  return out;
}

namespace {

// d/dx along one strided line: central inside, second-order one-sided
// at the two ends. Exact on quadratics.
void line_derivative(const double* src, double* dst, int count, int stride, double h) {
  const double inv2h = 1.0 / (2.0 * h);
  auto s = [&](int i) { return src[static_cast<std::size_t>(i) * stride]; };
  dst[0] = (-3.0 * s(0) + 4.0 * s(1) - s(2)) * inv2h;
  for (int i = 1; i < count - 1; ++i)
    dst[static_cast<std::size_t>(i) * stride] = (s(i + 1) - s(i - 1)) * inv2h;
  dst[static_cast<std::size_t>(count - 1) * stride] =
      (3.0 * s(count - 1) - 4.0 * s(count - 2) + s(count - 3)) * inv2h;
}

}  // namespace

VectorField gradient(const Field& u, const ProductMeasureGrid& m) {
  require_shape(u, m, "gradient");
  const auto& g = m.grid;
  VectorField out;
  out.dim = g.dim;
  out.comp[0] = Field(u.n_nodes, u.n_samples);
  if (g.dim == 2) out.comp[1] = Field(u.n_nodes, u.n_samples);

  for (int j = 0; j < u.n_samples; ++j) {
    auto slice = u.sample_slice(j);
    if (g.dim == 1) {
      line_derivative(slice.data(), out.comp[0].sample_slice(j).data(), g.nx(), 1, g.h[0]);
    } else {
      auto dx = out.comp[0].sample_slice(j);
      auto dy = out.comp[1].sample_slice(j);
      for (int iy = 0; iy < g.ny(); ++iy)
        line_derivative(slice.data() + iy, dx.data() + iy, g.nx(), g.ny(), g.h[0]);
      for (int ix = 0; ix < g.nx(); ++ix)
        line_derivative(slice.data() + static_cast<std::size_t>(ix) * g.ny(),
                        dy.data() + static_cast<std::size_t>(ix) * g.ny(), g.ny(), 1, g.h[1]);
    }
  }
  return out;
}

VectorField gradient(const StochasticField& u, const ProductMeasureGrid& m) {
  return gradient(u.data, m);
}

namespace {

// Midpoint-rule integral of fn over the grid box at a refinement level:
// level 0 uses one cell per grid cell, level k subdivides each axis 2^k
// times. Midpoints avoid evaluating boundary singularities head-on.
double midpoint_integral(const SpaceSampleFn& fn, const ProductMeasureGrid& m, int level) {
  const auto& g = m.grid;
  const int rx = (g.nx() - 1) << level;
  const int ry = g.dim == 2 ? (g.ny() - 1) << level : 1;
  const double hx = (g.bounds[0].second - g.bounds[0].first) / rx;
  const double hy = g.dim == 2 ? (g.bounds[1].second - g.bounds[1].first) / ry : 1.0;
  double total = 0.0;
  for (int j = 0; j < m.n_samples(); ++j) {
    const double t = m.omega.samples[j];
    double inner = 0.0;
    for (int ix = 0; ix < rx; ++ix) {
      const double x = g.bounds[0].first + (ix + 0.5) * hx;
      if (g.dim == 1) {
        inner += hx * fn(x, 0.0, t);
      } else {
        for (int iy = 0; iy < ry; ++iy) {
          const double y = g.bounds[1].first + (iy + 0.5) * hy;
          inner += hx * hy * fn(x, y, t);
        }
      }
    }
    total += m.omega.probs[j] * inner;
  }
  return total;
}

// Grows by more than 10% per refinement, or already non-finite.
bool divergent(double coarse, double fine) {
  if (!std::isfinite(coarse) || !std::isfinite(fine)) return true;
  const double scale = std::max(std::abs(coarse), 1e-30);
  return (fine - coarse) / scale > 0.10;
}

}  // namespace

WeightValidationReport validate_weight(const SpaceSampleFn& theta, const SpaceSampleFn& p,
                                       const SpaceSampleFn& s, const ProductMeasureGrid& m) {
  auto h1_integrand = [&](double x, double y, double t) {
    const double th = theta(x, y, t);
    if (!(th > 0.0)) throw DomainError("weight must be positive for validation");
    return std::pow(th, -1.0 / (p(x, y, t) - 1.0));
  };
  auto h2_integrand = [&](double x, double y, double t) {
    const double th = theta(x, y, t);
    if (!(th > 0.0)) throw DomainError("weight must be positive for validation");
    return std::pow(th, -s(x, y, t));
  };
  auto theta_only = [&](double x, double y, double t) {
    const double th = theta(x, y, t);
    if (!(th > 0.0)) throw DomainError("weight must be positive for validation");
    return th;
  };

  WeightValidationReport rep;
  for (int level = 0; level < 3; ++level) {
    WeightIntegralRow row;
    row.integral_theta = midpoint_integral(theta_only, m, level);
    row.integral_h1 = midpoint_integral(h1_integrand, m, level);
    row.integral_h2 = midpoint_integral(h2_integrand, m, level);
    rep.levels.push_back(row);
  }
  const auto& a = rep.levels[rep.levels.size() - 2];
  const auto& b = rep.levels.back();
  rep.theta_finite = !divergent(a.integral_theta, b.integral_theta);
  rep.h1_ok = rep.theta_finite && !divergent(a.integral_h1, b.integral_h1);
  rep.h2_ok = !divergent(a.integral_h2, b.integral_h2);
  return rep;
}

WeightValidationReport validate_weight(const WeightField& w, const ExponentField& p,
                                       const AuxExponentField& s, const ProductMeasureGrid& m) {
  Field h1(w.data.n_nodes, w.data.n_samples);
  Field h2(w.data.n_nodes, w.data.n_samples);
  for (std::size_t i = 0; i < w.data.values.size(); ++i) {
    const double th = w.data.values[i];
    if (!(th > 0.0)) throw DomainError("weight must be positive for validation");
    h1.values[i] = std::pow(th, -1.0 / (p.data.values[i] - 1.0));
    h2.values[i] = std::pow(th, -s.data.values[i]);
  }
  WeightValidationReport rep;
  WeightIntegralRow row;
  row.integral_theta = integrate(w.data, m);
  row.integral_h1 = integrate(h1, m);
  row.integral_h2 = integrate(h2, m);
  rep.levels.push_back(row);
  rep.theta_finite = std::isfinite(row.integral_theta);
  rep.h1_ok = rep.theta_finite && std::isfinite(row.integral_h1);
  rep.h2_ok = std::isfinite(row.integral_h2);
  return rep;
}

Field restrict_field(const Field& f, const SpatialGrid& g, const SubBox& k, int n_samples) {
  const int knx = k.hi[0] - k.lo[0] + 1;
  const int kny = g.dim == 2 ? k.hi[1] - k.lo[1] + 1 : 1;
  Field out(knx * kny, n_samples);
  for (int j = 0; j < n_samples; ++j) {
    for (int ix = 0; ix < knx; ++ix) {
      for (int iy = 0; iy < kny; ++iy) {
        const int src = g.index(k.lo[0] + ix, g.dim == 2 ? k.lo[1] + iy : 0);
        out.at(ix * kny + iy, j) = f.at(src, j);
      }
    }
  }
  return out;
}

}  // namespace varex
