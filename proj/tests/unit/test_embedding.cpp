#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"
#include "varex/embedding.hpp"
#include "varex/suites.hpp"

using namespace varex;
using testutil::kPi;

TEST_CASE("critical exponents: pointwise formulas") {
  auto m = testutil::unit_interval(21);
  auto s1 = make_aux_exponent_field(m, constant_field(m, 1.0));

  auto e3 = critical_exponents(make_constant_exponent(m, 2.0), s1, 3, m);
  CHECK(e3.p_star.at(5, 0) == doctest::Approx(6.0).epsilon(1e-14));

  auto e2 = critical_exponents(make_constant_exponent(m, 3.0), s1, 2, m);
  CHECK(std::isinf(e2.p_star.at(5, 0)));

  auto e = critical_exponents(make_constant_exponent(m, 2.0), s1, 2, m);
  CHECK(e.p_s.at(5, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.p_s_star.at(5, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::isnan(e.gamma1));
}

TEST_CASE("critical exponents: p_s < p pointwise and alpha/r fields") {
  auto m = testutil::unit_interval(31);
  auto p = make_exponent_field(m, [](double x, double, double) { return 2.0 + x; });
  auto s = make_aux_exponent_field(m, [](double x, double, double) { return 0.5 + x; });
  Field alpha = constant_field(m, 3.0);
  Field q_target = constant_field(m, 1.5);
  auto e = critical_exponents(p, s, 2, m, alpha, q_target);
  for (std::size_t i = 0; i < e.p_s.values.size(); ++i)
    CHECK(e.p_s.values[i] < p.data.values[i]);
  REQUIRE(e.r.has_value());
  CHECK(e.r->at(3, 0) == doctest::Approx(3.0 / 2.0 * 1.5).epsilon(1e-14));
}

TEST_CASE("Hoelder: trivial and analytic cases") {
  auto m = testutil::unit_interval(1001);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  auto one = make_stochastic_field(m, constant_field(m, 1.0));
  auto rep = check_holder(one, one, p, w, m);
  CHECK(rep.pass);
  CHECK(rep.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.constant >= 1.0);

  // f = x, g = 1: integral 1/2 against C * 3^{-1/2} * 1.
  auto fx = make_stochastic_field(m, [](double x, double, double) { return x; });
  auto rep2 = check_holder(fx, one, p, w, m);
  CHECK(rep2.pass);
  CHECK(rep2.lhs == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(rep2.norm_f == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
  CHECK(rep2.constant == doctest::Approx(1.0));
}

TEST_CASE("Hoelder holds on random draws") {
  auto m = testutil::unit_interval(101, {0.0, 1.0}, {0.5, 0.5});
  auto sr = suites::run_holder_suite(m, 200, 2024);
  CHECK(sr.all_pass);
}

TEST_CASE("poincare ratios") {
  auto m = testutil::unit_interval(401);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);

  auto us = apply_zero_boundary(
      m, field_from_fn(m, [](double x, double, double) { return std::sin(kPi * x); }));
  CHECK(poincare_ratio(us, p, w, m) == doctest::Approx(1.0 / kPi).epsilon(1e-4));

  auto ub = apply_zero_boundary(
      m, field_from_fn(m, [](double x, double, double) { return x * (1.0 - x); }));
  CHECK(poincare_ratio(ub, p, w, m) == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-4));

  // scaling invariance
  Field scaled = us.data;
  for (double& v : scaled.values) v *= 37.0;
  CHECK(poincare_ratio(StochasticField{scaled, true}, p, w, m) ==
        doctest::Approx(poincare_ratio(us, p, w, m)).epsilon(1e-10));

  auto zero = apply_zero_boundary(m, constant_field(m, 0.0));
  CHECK_THROWS_AS(poincare_ratio(zero, p, w, m), DomainError);
  auto not_zero_bdry = make_stochastic_field(m, constant_field(m, 1.0));
  CHECK_THROWS_AS(poincare_ratio(not_zero_bdry, p, w, m), DomainError);
}

TEST_CASE("embedding chain: case selection and validity") {
  auto m = testutil::unit_interval(201);
  auto s = make_aux_exponent_field(m, constant_field(m, 1.0));
  auto p = make_exponent_field(m, [](double x, double, double) { return x <= 0.5 ? 2.0 : 3.0; });
  auto w = unit_weight(m);

  // Large field: the weighted gradient norm is >= 1, so gamma4 = p+.
  auto big = make_stochastic_field(
      m, [](double x, double, double) { return 50.0 * std::sin(kPi * x); });
  auto tb = embedding_chain_terms(big, p, s, w, m);
  CHECK(tb.gamma4 == p.p_plus);
  CHECK(tb.grad_norm_weighted > 1.0);

  auto tiny = make_stochastic_field(
      m, [](double x, double, double) { return 1e-3 * std::sin(kPi * x); });
  auto tt = embedding_chain_terms(tiny, p, s, w, m);
  CHECK(tt.gamma4 == p.p_minus);

  // Each inequality holds with its derived admissible constant alone.
  for (const auto* t : {&tb, &tt}) {
    CHECK(t->eq6.lhs <= t->eq6.derived * t->eq6.base * (1.0 + 1e-9));
    CHECK(t->eq7.lhs <= t->eq7.derived * t->eq7.base * (1.0 + 1e-9));
    CHECK(t->eq8.lhs <= t->eq8.derived * t->eq8.base * (1.0 + 1e-9));
    CHECK(t->eq9.lhs <= t->eq9.derived * t->eq9.base * (1.0 + 1e-9));
  }
}

TEST_CASE("embedding chain: sin field with nonunit weight") {
  auto m = testutil::unit_interval(201);
  auto s = make_aux_exponent_field(m, constant_field(m, 1.0));
  auto p = make_constant_exponent(m, 2.0);
  auto w = make_weight_field(m, [](double x, double, double) { return 1.0 + x; });
  w.h1_ok = w.h2_ok = true;
  auto u = make_stochastic_field(m, [](double x, double, double) { return std::sin(kPi * x); });
  auto t = embedding_chain_terms(u, p, s, w, m);
  ChainCalibration cal = calibrate_chain({t});
  CHECK(validate_chain(t, cal).pass);
  CHECK(t.eq6.lhs <= t.eq6.derived * t.eq6.base * (1.0 + 1e-9));
  CHECK(t.eq9.lhs <= t.eq9.derived * t.eq9.base * (1.0 + 1e-9));
}

TEST_CASE("embedding chain refuses weights failing the integrability condition") {
  auto m = testutil::unit_interval(101);
  auto s = make_aux_exponent_field(m, constant_field(m, 1.0));
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  w.h2_ok = false;
  auto u = make_stochastic_field(m, [](double x, double, double) { return std::sin(kPi * x); });
  CHECK_THROWS_AS(embedding_chain_terms(u, p, s, w, m), HypothesisError);
}

TEST_CASE("chain suite calibrates and validates hold-outs") {
  auto m = testutil::unit_interval(101);
  suites::ChainSuiteOptions opts;
  opts.seed_fields = 40;
  opts.holdout_fields = 60;
  auto rep = suites::run_chain_suite(m, 4242, opts);
  CHECK(rep.all_pass);
}

TEST_CASE("local integrability bound on sub-boxes") {
  auto m = testutil::unit_interval(201);
  auto p = make_exponent_field(m, [](double x, double, double) { return 2.0 + x; });
  auto w = make_weight_field(m, [](double x, double, double) { return 0.5 + x * x; });
  auto u = make_stochastic_field(
      m, [](double x, double, double) { return std::cos(3.0 * x) + 0.5; });
  for (auto [lo, hi] : {std::pair{10, 120}, std::pair{50, 190}, std::pair{0, 200}}) {
    SubBox k;
    k.lo = {lo, 0};
    k.hi = {hi, 0};
    auto rep = local_integrability_bound(u, p, w, m, k);
    CHECK(rep.pass);
    CHECK(rep.a_k >= 1.0);
  }
}

TEST_CASE("weighted modular bound drives norm convergence") {
  // ||u_n||_r -> 0 forces the weighted q-modular to 0 through the
  // alpha-split bound; checked on the vanishing sequence x^n.
  auto m = testutil::unit_interval(401);
  auto p = make_constant_exponent(m, 3.0);
  auto w = make_weight_field(m, [](double x, double, double) { return 1.0 + x; });
  Field q_target = constant_field(m, 2.0);
  Field alpha = constant_field(m, 4.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {2, 4, 8, 16}) {
    auto un = make_stochastic_field(
        m, [n](double x, double, double) { return std::pow(x, static_cast<double>(n)); });
    auto rep = weighted_modular_bound(un, q_target, alpha, p, w, m);
    CHECK(rep.pass);
    CHECK(rep.rhs < prev);
    prev = rep.rhs;
  }
  CHECK(prev < 0.5);
}

TEST_CASE("weak convergence panel: monomials pass, pairings match 1/(n+1)") {
  auto m = testutil::unit_interval(2001);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  std::vector<StochasticField> seq;
  std::vector<int> powers = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  for (int n : powers)
    seq.push_back(make_stochastic_field(
        m, [n](double x, double, double) { return std::pow(x, static_cast<double>(n)); }));
  auto limit = make_stochastic_field(m, constant_field(m, 0.0));
  std::vector<StochasticField> duals{make_stochastic_field(m, constant_field(m, 1.0))};
  auto panel = weak_convergence_panel(seq, limit, duals, p, w, m);
  CHECK(panel.pass);
  CHECK(panel.sup_norm <= 1.0 + 1e-9);
  for (std::size_t k = 0; k < powers.size(); ++k)
    CHECK(panel.pairings[0][k] ==
          doctest::Approx(1.0 / (powers[k] + 1.0)).epsilon(2e-4));
}

TEST_CASE("weak convergence panel: stationary sequence passes") {
  auto m = testutil::unit_interval(101);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  auto u = make_stochastic_field(m, [](double x, double, double) { return std::sin(kPi * x); });
  std::vector<StochasticField> seq(6, u);
  std::vector<StochasticField> duals{make_stochastic_field(m, constant_field(m, 1.0))};
  auto panel = weak_convergence_panel(seq, u, duals, p, w, m);
  CHECK(panel.pass);
}

TEST_CASE("weak convergence panel: oscillating sequence is refused") {
  auto m = testutil::unit_interval(401);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  std::vector<StochasticField> seq;
  for (int n = 1; n <= 12; ++n)
    seq.push_back(make_stochastic_field(
        m, [n](double x, double, double) { return std::sin(n * kPi * x); }));
  auto limit = make_stochastic_field(m, constant_field(m, 0.0));
  std::vector<StochasticField> duals{
      make_stochastic_field(m, [](double x, double, double) { return x; })};
  CHECK_THROWS_AS(weak_convergence_panel(seq, limit, duals, p, w, m), HypothesisError);
}

TEST_CASE("weak convergence panel: norm bound violation is refused") {
  auto m = testutil::unit_interval(101);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  std::vector<StochasticField> seq;
  for (int n = 1; n <= 4; ++n)
    seq.push_back(make_stochastic_field(m, constant_field(m, static_cast<double>(n))));
  auto limit = make_stochastic_field(m, constant_field(m, 4.0));
  std::vector<StochasticField> duals{make_stochastic_field(m, constant_field(m, 1.0))};
  WeakConvergenceOptions opts;
  opts.norm_bound = 2.0;
  CHECK_THROWS_AS(weak_convergence_panel(seq, limit, duals, p, w, m, opts), HypothesisError);
}
