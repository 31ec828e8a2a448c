#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "varex/operators.hpp"

namespace varex {

/// Controls for the regularized fixed-point solve. Zero values select
/// the exponent-dependent defaults: damping 1.0 for p within [1.8,2.5]
/// (else 0.5), outer_tol 1e-8 for p == 2 (else 1e-6).
struct SolveConfig {
  double eps_reg = 1e-6;
  int max_outer = 1000;
  double damping = 0.0;
  double lin_tol = 1e-12;
  double outer_tol = 0.0;
  int panel_modes = 4;  // sine modes per axis in the residual panel
  // The lower-order term vanishes (g == 0); enables the energy-descent
  // line search on the damping factor.
  bool g_zero = false;
};

/// One sample's solve: solution values over all nodes (zeros on the
/// boundary), iteration diagnostics, and a trailing window of iterates
/// for convergence forensics.
struct SampleSolve {
  std::vector<double> u;
  int outer_iterations = 0;
  int pcg_iterations_total = 0;
  double weak_residual = 0.0;  // sample-local, hat + sine panel
  std::vector<double> energy_history;
  std::vector<std::vector<double>> iterate_history;  // last few iterates, final included
  bool converged = false;
  std::string failure;
};

struct SolveReport {
  std::vector<SampleSolve> samples;
  StochasticField solution;  // all samples assembled
  Field mean;                // probability-weighted ensemble mean (1 sample column)
  Field stddev;
  double residual_max = 0.0;  // max sample-local residual
  double ensemble_residual = 0.0;  // weak_residual of the assembled field
  bool ok = false;
};

/// `initial_guess` (all-nodes vector, boundary entries ignored)
/// overrides the default start, the p = 2 solve with the same weight
/// and datum; the uniqueness probe relies on this hook.
SampleSolve solve_sample(const ProblemSpec& spec, const ExponentField& p, const WeightField& w,
                         const ProductMeasureGrid& m, int t_index, const SolveConfig& cfg,
                         const std::optional<std::vector<double>>& initial_guess = std::nullopt);

/// Normalized weak-form defect max over the test panel: discrete hats
/// at every interior node plus tensor sine modes (k <= panel_modes per
/// axis), each scaled by 1 + ||grad phi||_{p,theta}.
double weak_residual(const StochasticField& u, const ProblemSpec& spec, const ExponentField& p,
                     const WeightField& w, const ProductMeasureGrid& m, int panel_modes = 4);

/// Same defect against a caller-supplied panel of zero-trace fields.
double weak_residual(const StochasticField& u, const ProblemSpec& spec, const ExponentField& p,
                     const WeightField& w, const ProductMeasureGrid& m,
                     const std::vector<StochasticField>& panel);

SolveReport solve_ensemble(const ProblemSpec& spec, const ExponentField& p, const WeightField& w,
                           const ProductMeasureGrid& m, const SolveConfig& cfg);

/// Inputs rebuilt per refinement level by the caller.
struct SolveInputs {
  ProductMeasureGrid m;
  ExponentField p;
  WeightField w;
  ProblemSpec spec;
};

using LevelBuilder = std::function<SolveInputs(const std::vector<int>& n_per_axis)>;

struct RefineRow {
  std::vector<int> n;
  double diff_sup = 0.0;   // L-inf difference to the previous level on shared nodes
  double err_exact = 0.0;  // L-inf error against the analytic reference, if given
  double order = 0.0;      // log2 ratio of successive differences/errors
};

struct RefineStudy {
  std::vector<RefineRow> rows;
  double fitted_order = 0.0;
  bool exact_to_roundoff = false;  // differences at linear-solver noise level
};

RefineStudy refine_study(const LevelBuilder& build, const std::vector<int>& base_n, int levels,
                         const SolveConfig& cfg,
                         const std::optional<SpaceSampleFn>& exact = std::nullopt);

}  // namespace varex
