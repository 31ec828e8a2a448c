#pragma once

#include <utility>

#include "varex/field.hpp"

namespace varex {

/// Luxemburg-norm evaluation record. For nonzero u the modular at
/// u/value is 1 up to the bisection tolerance; value is 0 iff u == 0.
struct NormResult {
  double value = 0.0;
  double modular_at_unit = 0.0;
  int iterations = 0;
  std::pair<double, double> bracket{0.0, 0.0};
};

struct NormOptions {
  double tol = 1e-10;            // |modular(u/lambda) - 1| target
  int max_scalings = 200;        // bracket search doublings/halvings
  double min_rel_width = 1e-14;  // bracket width floor, relative to lambda
};

/// Weighted modular: integral of |u|^p * theta. Nonnegative; returns
/// +inf when the integrand overflows (the field is outside the space at
/// this scale).
double modular(const Field& u, const Field& p, const Field& theta, const ProductMeasureGrid& m);
double modular(const StochasticField& u, const ExponentField& p, const WeightField& w,
               const ProductMeasureGrid& m);

/// Luxemburg norm by bisection on the strictly decreasing map
/// lambda -> modular(u/lambda). Raw variant accepts any positive
/// exponent field (the embedding chain needs exponents below 1).
NormResult luxemburg_norm(const Field& u, const Field& p, const Field& theta,
                          const ProductMeasureGrid& m, const NormOptions& opts = {});
NormResult luxemburg_norm(const StochasticField& u, const ExponentField& p, const WeightField& w,
                          const ProductMeasureGrid& m, const NormOptions& opts = {});

/// Full Sobolev norm ||u|| + || |grad u| || and the zero-trace seminorm
/// || |grad u| || alone.
double sobolev_norm(const StochasticField& u, const ExponentField& p, const WeightField& w,
                    const ProductMeasureGrid& m);
double w0_seminorm(const StochasticField& u, const ExponentField& p, const WeightField& w,
                   const ProductMeasureGrid& m);

/// Norm--modular inequality check. Evaluates the chain for the side of
/// 1 the norm falls on; `slack` is the normalized margin by which the
/// weaker inequality holds (negative = violation). Tolerance 1e-9.
struct Prop2Report {
  double norm = 0.0;
  double mod = 0.0;
  double lower = 0.0;  // norm^p_minus / norm^p_plus per case
  double upper = 0.0;
  double slack = 0.0;
  bool pass = false;
};

Prop2Report check_prop2(const StochasticField& u, const ExponentField& p, const WeightField& w,
                        const ProductMeasureGrid& m);

/// (b - a) / max(1, |a|, |b|): the scale-normalized slack used by the
/// inequality suites; float-exact absolute slacks are meaningless at
/// modular magnitudes ~1e8.
inline double normalized_slack(double lhs, double rhs) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return (rhs - lhs) / scale;
}

}  // namespace varex
