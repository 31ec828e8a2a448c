#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "varex/modular.hpp"

namespace varex {

/// Pointwise embedding exponents. p_star and p_s_star hold +inf where
/// the defining formula degenerates (p >= d, resp. p_s >= d). alpha and
/// r are populated only when a weight-integrability exponent alpha is
/// supplied (r = alpha/(alpha-1) * q_target).
struct EmbeddingExponents {
  Field p_star;
  Field p_s;
  Field p_s_star;
  std::optional<Field> alpha;
  std::optional<Field> r;
  // Case-selected scalars of the chain inequalities; NaN until a chain
  // evaluation fills them.
  double gamma1 = std::numeric_limits<double>::quiet_NaN();
  double gamma2 = std::numeric_limits<double>::quiet_NaN();
  double gamma3 = std::numeric_limits<double>::quiet_NaN();
  double gamma4 = std::numeric_limits<double>::quiet_NaN();
};

EmbeddingExponents critical_exponents(const ExponentField& p, const AuxExponentField& s, int d,
                                      const ProductMeasureGrid& m,
                                      const std::optional<Field>& alpha = std::nullopt,
                                      const std::optional<Field>& q_target = std::nullopt);

/// Generalized Hoelder inequality with the constant 1 + 1/p^- - 1/p^+.
struct HolderReport {
  double lhs = 0.0;       // integral of |f g|
  double norm_f = 0.0;    // ||f||_{p,theta}
  double norm_g = 0.0;    // ||g||_{q,theta*}
  double constant = 0.0;  // 1 + 1/p^- - 1/p^+
  double rhs = 0.0;       // constant * norm_f * norm_g
  double slack = 0.0;
  bool pass = false;
};

HolderReport check_holder(const StochasticField& f, const StochasticField& g,
                          const ExponentField& p, const WeightField& w,
                          const ProductMeasureGrid& m);

/// ||u|| / ||grad u|| for a zero-trace field; errors when grad u == 0.
double poincare_ratio(const StochasticField& u, const ExponentField& p, const WeightField& w,
                      const ProductMeasureGrid& m);

/// Both sides of one chain inequality: pass iff lhs <= C * base.
struct ChainInequality {
  double lhs = 0.0;
  double base = 0.0;     // right-hand side without its constant
  double ratio = 0.0;    // lhs / base
  double derived = 0.0;  // admissible constant from the two-sided bounds
};

/// Per-field evaluation of the four-inequality chain with the
/// case-selected gamma exponents.
struct ChainTerms {
  ChainInequality eq6, eq7, eq8, eq9;
  double gamma1 = 0.0, gamma2 = 0.0, gamma3 = 0.0, gamma4 = 0.0;
  double grad_norm_weighted = 0.0;  // ||grad u||_{p,theta}
  double grad_norm_ps = 0.0;        // ||grad u||_{p_s}
};

ChainTerms embedding_chain_terms(const StochasticField& u, const ExponentField& p,
                                 const AuxExponentField& s, const WeightField& w,
                                 const ProductMeasureGrid& m);

/// Chain constants calibrated as the max observed ratio per inequality
/// over a seed family. Validation accepts a fresh field when each lhs
/// stays below max(calibrated, derived-admissible) * base; the derived
/// constant makes the hold-out guarantee non-statistical.
struct ChainCalibration {
  double c6 = 0.0, c7 = 0.0, c8 = 0.0, c9 = 0.0;
  int family_size = 0;
};

ChainCalibration calibrate_chain(const std::vector<ChainTerms>& seed_family);

struct ChainValidation {
  bool pass = false;
  double worst_margin = 0.0;  // min over inequalities of C*base - lhs, normalized
};

ChainValidation validate_chain(const ChainTerms& terms, const ChainCalibration& cal);

/// Local integrability bound on a node-aligned compact sub-box:
/// integral_K |u| <= A_K ||u theta^{1/p}||_{p,K} ||theta^{-1/p}||_{q,K}.
struct LocalBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double a_k = 0.0;
  bool pass = false;
};

LocalBoundReport local_integrability_bound(const StochasticField& u, const ExponentField& p,
                                           const WeightField& w, const ProductMeasureGrid& m,
                                           const SubBox& k);

/// Weighted-modular bound behind the compact embedding: the weighted
/// q-modular of u is controlled by ||theta||_alpha ||  |u|^q ||_alpha0.
struct CompactBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

CompactBoundReport weighted_modular_bound(const StochasticField& u, const Field& q_target,
                                          const Field& alpha, const ExponentField& p,
                                          const WeightField& w, const ProductMeasureGrid& m);

/// Weak-convergence panel: checks the bounded-norm and a.e.-convergence
/// hypotheses, then reports the dual pairings per sequence index.
/// Pointwise convergence is detected per interior node (boundary nodes
/// carry zero continuum measure): a node converges when its final error
/// is below `ptwise_tol` or its error decreases over the last half of
/// the sequence. Sequences violating a hypothesis are refused.
struct WeakConvergenceOptions {
  double ptwise_tol = 1e-8;
  double pairing_tol = 1e-3;
  std::optional<double> norm_bound;  // refuse if any ||u_n|| exceeds it
};

struct WeakConvergencePanel {
  std::vector<std::vector<double>> pairings;  // [dual][n]
  std::vector<double> pairing_limit;          // [dual] pairing of u
  std::vector<double> norms;                  // ||u_n||_{p,theta}
  double sup_norm = 0.0;
  bool pass = false;
};

WeakConvergencePanel weak_convergence_panel(const std::vector<StochasticField>& seq,
                                            const StochasticField& u,
                                            const std::vector<StochasticField>& duals,
                                            const ExponentField& p, const WeightField& w,
                                            const ProductMeasureGrid& m,
                                            const WeakConvergenceOptions& opts = {});

}  // namespace varex
