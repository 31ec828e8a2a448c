#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varex/embedding.hpp"
#include "varex/operators.hpp"

namespace varex::suites {

struct SuiteRow {
  std::string suite;
  std::string case_id;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  std::string note;
};

struct SuiteReport {
  std::string name;
  std::vector<SuiteRow> rows;
  bool all_pass = true;

  void add(SuiteRow row) {
    all_pass = all_pass && row.pass;
    rows.push_back(std::move(row));
  }
};

/// Seeded random inputs for the inequality suites. Draw index fixes the
/// generator stream, so results are independent of evaluation order.
struct FieldDraw {
  StochasticField u;
  ExponentField p;
  WeightField w;
};

FieldDraw draw_norm_inputs(const ProductMeasureGrid& m, std::uint64_t seed, std::uint64_t index);
StochasticField draw_smooth_field(const ProductMeasureGrid& m, std::uint64_t seed,
                                  std::uint64_t index, bool zero_boundary);

/// Luxemburg-norm oracle suite: constant-exponent closed form
/// ||u|| = rho(u)^(1/p) on random fields, plus the two-valued exponent
/// case whose norm solves y^2 + y - 2 = 0 exactly.
SuiteReport run_norm_oracle_suite(const ProductMeasureGrid& m, int n_draws, std::uint64_t seed);

/// Norm--modular inequality chains plus the unit-modular identity on
/// seeded draws, including the ||u|| = 1 boundary case.
SuiteReport run_prop2_suite(const ProductMeasureGrid& m, int n_draws, std::uint64_t seed);

/// Generalized Hoelder inequality on seeded (f, g, p, theta) draws.
SuiteReport run_holder_suite(const ProductMeasureGrid& m, int n_draws, std::uint64_t seed);

/// Ratios ||u||/||grad u|| over the sine family sin(k pi x), k = 1..10:
/// values against the analytic 1/(k pi) and monotone decrease in k.
SuiteReport run_poincare_suite(const ProductMeasureGrid& m);

/// Embedding-chain suite: calibrates the four chain constants on a seed
/// family (random draws plus deterministic envelope extremes), validates
/// hold-out draws, and checks the critical-exponent formulas pointwise.
struct ChainSuiteOptions {
  int seed_fields = 100;
  int holdout_fields = 200;
  int envelope_cases = 12;  // part of seed_fields
};

SuiteReport run_chain_suite(const ProductMeasureGrid& m, std::uint64_t seed,
                            const ChainSuiteOptions& opts = {});

/// Weak-convergence panel suite: the monomial sequence x^n (passes, with
/// pairings against the analytic 1/(n+1)) and the oscillating sequence
/// sin(n pi x) (refused for violating the a.e.-convergence hypothesis).
SuiteReport run_weakconv_suite();

/// Growth-condition suite: the model kernel (equalities in H3/H5, all
/// positive H4 brackets) and a deliberately broken kernel whose claimed
/// beta is halved, which must fail H3 with a witness.
SuiteReport run_growth_suite(const ProductMeasureGrid& m, long n_draws, std::uint64_t seed);

/// Coercivity suite: fitted growth exponent r == p for constant-p model
/// kernels over a scale ladder.
SuiteReport run_coercivity_suite(const ProductMeasureGrid& m, const std::vector<double>& p_values,
                                 double tol);

/// Monotonicity suite: random field pairs under the model kernel give
/// strictly positive brackets.
SuiteReport run_monotone_suite(const ProductMeasureGrid& m, int n_pairs, std::uint64_t seed);

}  // namespace varex::suites
