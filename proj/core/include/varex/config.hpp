#pragma once

#include <map>
#include <optional>
#include <string>

#include "varex/expression.hpp"
#include "varex/solver.hpp"

namespace varex {

/// A scalar field definition from config: a constant or an expression
/// over x, y, t (g uses the single variable s).
struct FieldSpec {
  enum class Kind { constant, expr } kind = Kind::constant;
  double value = 0.0;
  std::string formula;
  std::optional<Expression> compiled;

  double operator()(double x, double y, double t) const {
    if (kind == Kind::constant) return value;
    const double vars[3] = {x, y, t};
    return compiled->eval(vars);
  }
};

struct GridSpec {
  int dim = 1;
  std::vector<std::pair<double, double>> bounds;
  std::vector<int> n;
  std::vector<double> samples;
  std::vector<double> probs;
};

/// Parsed run configuration; field specs are compiled at load time.
struct RunConfig {
  GridSpec grid;
  std::map<std::string, FieldSpec> fields;  // p, s, theta, u, f, gamma, k
  FieldSpec g;                              // over the variable s
  std::string model = "p_laplacian_with_g";
  double alpha_c = 1.0;
  double beta_c = 1.0;
  std::vector<std::string> custom_flux;     // expressions per component
  std::string custom_lower;                 // expression
  SolveConfig solver;
  long suite_draws = 1000;
  std::optional<FieldSpec> alpha_field;     // embedding weight exponent
  std::optional<FieldSpec> u_exact;         // refinement reference
  std::uint64_t seed = 42;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

/// Instantiations on the configured grid.
ProductMeasureGrid build_grid(const RunConfig& cfg);
ProductMeasureGrid build_grid_with_n(const RunConfig& cfg, const std::vector<int>& n);

ExponentField build_exponent(const RunConfig& cfg, const ProductMeasureGrid& m);
AuxExponentField build_aux_exponent(const RunConfig& cfg, const ProductMeasureGrid& m);
WeightField build_weight(const RunConfig& cfg, const ProductMeasureGrid& m);
StochasticField build_field(const RunConfig& cfg, const std::string& name,
                            const ProductMeasureGrid& m, bool zero_boundary = false);
ProblemSpec build_problem(const RunConfig& cfg, const ProductMeasureGrid& m);

/// The field spec by name, or a config error naming the key.
const FieldSpec& require_field(const RunConfig& cfg, const std::string& name);

}  // namespace varex
