#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "varex/modular.hpp"

namespace varex {

/// Point data handed to a flux / lower-order kernel.
struct KernelArgs {
  double x = 0.0, y = 0.0;
  double t = 0.0;      // sample label
  double s = 0.0;      // solution value u(x,t)
  std::array<double, 2> xi{{0.0, 0.0}};
  double theta = 0.0;  // weight at the point
  double p = 0.0;      // exponent at the point
  int dim = 1;
};

using FluxFn = std::function<std::array<double, 2>(const KernelArgs&)>;
using LowerOrderFn = std::function<double(const KernelArgs&)>;
using ScalarFn = std::function<double(double)>;

enum class ModelKind { p_laplacian_with_g, custom };

/// Data of the degenerate elliptic problem: flux A, lower-order A0,
/// right-hand side density f, the L1 factor g, the comparison fields
/// gamma and k of the growth conditions, and the ellipticity constants.
struct ProblemSpec {
  ModelKind kind = ModelKind::p_laplacian_with_g;
  FluxFn A;
  LowerOrderFn A0;
  StochasticField f;
  ScalarFn g;              // continuous, integrable on the line
  StochasticField gamma_fn;
  StochasticField k_fn;
  double alpha_c = 1.0;
  double beta_c = 1.0;
};

/// Model kernel A = theta |xi|^{p-2} xi, A0 = theta g(s) |xi|^{p-1}.
ProblemSpec make_p_laplacian_spec(const ProductMeasureGrid& m, StochasticField f, ScalarFn g,
                                  StochasticField gamma_fn, StochasticField k_fn,
                                  double alpha_c = 1.0, double beta_c = 1.0);

/// Pairing <Gamma(u), phi> split into its flux and lower-order parts.
/// The flux part is a staggered-face quadrature (axis differences at
/// faces, transverse components averaged from the nodal gradient); the
/// lower-order part is nodal trapezoid quadrature.
struct OperatorPairing {
  double gamma1_part = 0.0;
  double gamma2_part = 0.0;
  double total = 0.0;
};

OperatorPairing pairing(const StochasticField& u, const StochasticField& phi,
                        const ProblemSpec& spec, const ExponentField& p, const WeightField& w,
                        const ProductMeasureGrid& m);

/// Sampled verification of the growth conditions at random
/// (node, sample, s, xi, mu) tuples.
struct GrowthCondition {
  double worst_slack = 0.0;   // normalized; negative = violation
  std::string witness;        // location/arguments of the worst tuple
  long checked = 0;
  long skipped = 0;           // H4 tuples with xi == mu
  bool pass = false;
};

struct GrowthReport {
  GrowthCondition h3, h4, h5, eq10;
  bool pass = false;
};

GrowthReport check_growth(const ProblemSpec& spec, const ExponentField& p, const WeightField& w,
                          const ProductMeasureGrid& m, long n_draws, std::uint64_t seed);

/// Scaling probe for coercivity: ratios <Gamma(c u0), c u0> / ||grad(c u0)||
/// against the scale list, with the growth exponent fitted in log-log.
struct CoercivityRow {
  double scale = 0.0;
  double seminorm = 0.0;
  double pairing_value = 0.0;
  double ratio = 0.0;
};

struct CoercivityReport {
  std::vector<CoercivityRow> rows;
  double fitted_r = 0.0;
  bool ratio_increasing = false;
  bool pass = false;
};

CoercivityReport coercivity_probe(const ProblemSpec& spec, const ExponentField& p,
                                  const WeightField& w, const ProductMeasureGrid& m,
                                  const StochasticField& u0, const std::vector<double>& scales);

/// E int [A(x,t,u1,grad u1) - A(x,t,u1,grad u2)] . grad(u1 - u2);
/// positive when the gradients differ, by the strict monotonicity
/// condition. Nodal quadrature with nodal gradients.
double monotonicity_bracket(const ProblemSpec& spec, const StochasticField& u1,
                            const StochasticField& u2, const ExponentField& p,
                            const WeightField& w, const ProductMeasureGrid& m);

/// Boundedness probe: |<Gamma_1(u), phi>| against the explicit bound
/// C_H [M (C1 + rho_{p,theta}(grad u))]^theta ||grad phi||_{p,theta}
/// with the norm-case exponent theta in {1/q^-, 1/q^+}.
struct BoundednessReport {
  double lhs = 0.0;
  double bound = 0.0;
  double theta_exponent = 0.0;
  bool pass = false;
};

BoundednessReport boundedness_probe(const StochasticField& u, const StochasticField& phi,
                                    const ProblemSpec& spec, const ExponentField& p,
                                    const WeightField& w, const ProductMeasureGrid& m);

}  // namespace varex
