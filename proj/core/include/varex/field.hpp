#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "varex/grid.hpp"

namespace varex {

/// Scalar callable over (x, y, t); the t slot receives the sample label.
using SpaceSampleFn = std::function<double(double, double, double)>;

/// Dense node x sample array. Storage is sample-major so each sample is
/// a contiguous node block: idx = sample * n_nodes + node.
struct Field {
  std::vector<double> values;
  int n_nodes = 0;
  int n_samples = 0;

  Field() = default;
  Field(int nodes, int samples, double fill = 0.0)
      : values(static_cast<std::size_t>(nodes) * samples, fill),
        n_nodes(nodes),
        n_samples(samples) {}

  double& at(int node, int sample) {
    return values[static_cast<std::size_t>(sample) * n_nodes + node];
  }
  double at(int node, int sample) const {
    return values[static_cast<std::size_t>(sample) * n_nodes + node];
  }

  std::span<double> sample_slice(int sample) {
    return {values.data() + static_cast<std::size_t>(sample) * n_nodes,
            static_cast<std::size_t>(n_nodes)};
  }
  std::span<const double> sample_slice(int sample) const {
    return {values.data() + static_cast<std::size_t>(sample) * n_nodes,
            static_cast<std::size_t>(n_nodes)};
  }

  bool same_shape(const ProductMeasureGrid& m) const {
    return n_nodes == m.n_nodes() && n_samples == m.n_samples();
  }

  double min_value() const;
  double max_value() const;
};

Field constant_field(const ProductMeasureGrid& m, double c);
Field field_from_fn(const ProductMeasureGrid& m, const SpaceSampleFn& fn);

/// A function u(x,t) on the grid. `zero_boundary` records (and the
/// factories verify) membership in the zero-trace class at grid level.
struct StochasticField {
  Field data;
  bool zero_boundary = false;
};

StochasticField make_stochastic_field(const ProductMeasureGrid& m, const SpaceSampleFn& fn,
                                      bool zero_boundary = false);
StochasticField make_stochastic_field(const ProductMeasureGrid& m, Field values,
                                      bool zero_boundary = false);
/// Forces zeros on boundary nodes and tags the result as zero-trace.
StochasticField apply_zero_boundary(const ProductMeasureGrid& m, Field values);

/// Variable exponent p(x,t) with cached essential bounds;
/// construction enforces 1 < p everywhere and p_plus finite.
struct ExponentField {
  Field data;
  double p_minus = 0.0;
  double p_plus = 0.0;
};

ExponentField make_exponent_field(const ProductMeasureGrid& m, const SpaceSampleFn& fn);
ExponentField make_exponent_field(const ProductMeasureGrid& m, Field values);
ExponentField make_constant_exponent(const ProductMeasureGrid& m, double p);

/// Auxiliary positive exponent s(x,t) from the integrability condition
/// on the negative weight power.
struct AuxExponentField {
  Field data;
  double s_minus = 0.0;
  double s_plus = 0.0;
};

AuxExponentField make_aux_exponent_field(const ProductMeasureGrid& m, const SpaceSampleFn& fn);
AuxExponentField make_aux_exponent_field(const ProductMeasureGrid& m, Field values);

/// Positive weight. h1_ok / h2_ok carry the most recent validator
/// verdict (single-grid finiteness when built from raw values).
struct WeightField {
  Field data;
  bool h1_ok = false;
  bool h2_ok = false;
};

// Weight values below this floor are rejected: conjugation raises the
// weight to 1 - q and would overflow.
inline constexpr double kWeightFloor = 1e-300;

WeightField make_weight_field(const ProductMeasureGrid& m, const SpaceSampleFn& fn);
WeightField make_weight_field(const ProductMeasureGrid& m, Field values);
WeightField unit_weight(const ProductMeasureGrid& m);

/// d-vector field; component count equals the grid dimension.
struct VectorField {
  std::array<Field, 2> comp;
  int dim = 1;

  /// Pointwise Euclidean magnitude |v|(x,t).
  Field magnitude() const;
};

/// Product-measure integral: sum over samples (outer) of the trapezoid
/// sum over nodes in row-major order, weighted by sample probabilities.
double integrate(const Field& f, const ProductMeasureGrid& m);
double integrate(const StochasticField& f, const ProductMeasureGrid& m);

/// essinf / esssup of the exponent over all nodes and samples.
std::pair<double, double> ess_bounds(const ExponentField& p);

/// Pointwise conjugate q = p / (p - 1).
ExponentField conjugate_exponent(const ExponentField& p);

/// Pointwise conjugate weight theta^(1 - q).
WeightField conjugate_weight(const WeightField& w, const ExponentField& p);

/// Central differences at interior nodes, second-order one-sided at
/// boundary nodes, independently per sample.
VectorField gradient(const StochasticField& u, const ProductMeasureGrid& m);
VectorField gradient(const Field& u, const ProductMeasureGrid& m);

/// One row of the weight-validation refinement study.
struct WeightIntegralRow {
  double integral_theta;      // integral of theta
  double integral_h1;         // integral of theta^(-1/(p-1))
  double integral_h2;         // integral of theta^(-s)
};

struct WeightValidationReport {
  std::vector<WeightIntegralRow> levels;  // midpoint quadrature at h, h/2, h/4
  bool theta_finite = false;
  bool h1_ok = false;
  bool h2_ok = false;
};

/// Refinement-study validator for the integrability conditions: the
/// three integrals are evaluated with midpoint quadrature at h, h/2 and
/// h/4 from the defining functions; an integral that is non-finite or
/// grows by more than 10% per refinement is declared divergent. No
/// finite grid proves integrability; this is the documented heuristic.
WeightValidationReport validate_weight(const SpaceSampleFn& theta, const SpaceSampleFn& p,
                                       const SpaceSampleFn& s, const ProductMeasureGrid& m);

/// Single-grid fallback for weights only known through node samples:
/// flags reflect finiteness of the three node-quadrature integrals.
WeightValidationReport validate_weight(const WeightField& w, const ExponentField& p,
                                       const AuxExponentField& s, const ProductMeasureGrid& m);

/// Copies the sub-box portion of a field onto the restricted grid
/// (samples unchanged).
Field restrict_field(const Field& f, const SpatialGrid& g, const SubBox& k, int n_samples);

}  // namespace varex
