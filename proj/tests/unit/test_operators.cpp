#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"
#include "varex/operators.hpp"
#include "varex/suites.hpp"

using namespace varex;
using testutil::kPi;

namespace {

ProblemSpec model_spec(const ProductMeasureGrid& m, double alpha = 1.0, double beta = 1.0,
                       ScalarFn g = [](double) { return 0.0; }) {
  auto zero = make_stochastic_field(m, constant_field(m, 0.0));
  auto f = make_stochastic_field(m, constant_field(m, 1.0));
  return make_p_laplacian_spec(m, f, std::move(g), zero, zero, alpha, beta);
}

}  // namespace

TEST_CASE("pairing: Dirichlet form of sin(pi x)") {
  auto m = testutil::unit_interval(401);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  auto spec = model_spec(m);
  auto u = apply_zero_boundary(
      m, field_from_fn(m, [](double x, double, double) { return std::sin(kPi * x); }));
  auto pr = pairing(u, u, spec, p, w, m);
  CHECK(pr.gamma1_part == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-3));
  CHECK(pr.gamma2_part == 0.0);
  CHECK(pr.total == pr.gamma1_part + pr.gamma2_part);
}

TEST_CASE("pairing: zero field and zero test function") {
  auto m = testutil::unit_interval(101);
  auto p = make_constant_exponent(m, 3.0);
  auto w = unit_weight(m);
  auto spec = model_spec(m);
  auto zero = apply_zero_boundary(m, constant_field(m, 0.0));
  auto u = make_stochastic_field(m, [](double x, double, double) { return x * x; });
  CHECK(pairing(zero, zero, spec, p, w, m).total == 0.0);
  CHECK(pairing(u, zero, spec, p, w, m).total == 0.0);
}

TEST_CASE("pairing is linear in the test slot") {
  auto m = testutil::unit_interval(101);
  auto p = make_constant_exponent(m, 2.5);
  auto w = make_weight_field(m, [](double x, double, double) { return 1.0 + x; });
  auto spec = model_spec(m, 1.0, 1.0, [](double s) { return std::exp(-s * s); });
  auto u = make_stochastic_field(m, [](double x, double, double) { return std::sin(2 * x); });
  auto phi1 = apply_zero_boundary(
      m, field_from_fn(m, [](double x, double, double) { return std::sin(kPi * x); }));
  auto phi2 = apply_zero_boundary(
      m, field_from_fn(m, [](double x, double, double) { return x * (1 - x); }));
  const double a = 2.25, b = -0.75;
  Field combo(m.n_nodes(), 1);
  for (std::size_t i = 0; i < combo.values.size(); ++i)
    combo.values[i] = a * phi1.data.values[i] + b * phi2.data.values[i];
  const double lhs = pairing(u, StochasticField{combo, true}, spec, p, w, m).total;
  const double rhs = a * pairing(u, phi1, spec, p, w, m).total +
                     b * pairing(u, phi2, spec, p, w, m).total;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("pairing symmetry for the linear kernel") {
  auto m = testutil::unit_interval(101, {0.0, 1.0}, {0.5, 0.5});
  auto p = make_constant_exponent(m, 2.0);
  auto w = make_weight_field(m, [](double x, double, double t) { return 1.0 + x + t; });
  auto spec = model_spec(m);
  auto u = apply_zero_boundary(
      m, field_from_fn(m, [](double x, double, double) { return std::sin(kPi * x); }));
  auto v = apply_zero_boundary(
      m, field_from_fn(m, [](double x, double, double) { return x * (1 - x) * (2 + x); }));
  CHECK(pairing(u, v, spec, p, w, m).total ==
        doctest::Approx(pairing(v, u, spec, p, w, m).total).epsilon(1e-10));
}

TEST_CASE("growth conditions: model kernel equalities and broken beta") {
  auto m = testutil::unit_interval(201);
  auto rep = suites::run_growth_suite(m, 10000, 31337);
  CHECK(rep.all_pass);
}

TEST_CASE("growth conditions: H4 skips coincident pairs") {
  auto m = testutil::unit_interval(51);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  auto spec = model_spec(m);
  auto rep = check_growth(spec, p, w, m, 5000, 7);
  CHECK(rep.pass);
  CHECK(rep.h4.checked + rep.h4.skipped <= 5000);
  CHECK(rep.h4.worst_slack > 0.0);
}

TEST_CASE("coercivity probe: homogeneity gives r = p") {
  auto m = testutil::unit_interval(201);
  auto w = unit_weight(m);
  auto spec = model_spec(m);
  auto u0 = apply_zero_boundary(
      m, field_from_fn(m, [](double x, double, double) { return std::sin(kPi * x); }));
  for (double pv : {1.5, 2.0, 3.0}) {
    auto p = make_constant_exponent(m, pv);
    auto rep = coercivity_probe(spec, p, w, m, u0, {1.0, 2.0, 4.0, 8.0});
    CHECK(rep.pass);
    CHECK(rep.fitted_r == doctest::Approx(pv).epsilon(0.05 / pv));
  }
}

TEST_CASE("coercivity probe: ratio grows linearly in the scale for p = 2") {
  auto m = testutil::unit_interval(201);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  auto spec = model_spec(m);
  auto u0 = apply_zero_boundary(
      m, field_from_fn(m, [](double x, double, double) { return std::sin(kPi * x); }));
  auto rep = coercivity_probe(spec, p, w, m, u0, {1.0, 2.0, 4.0, 8.0});
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
    CHECK(rep.rows[i + 1].ratio == doctest::Approx(2.0 * rep.rows[i].ratio).epsilon(1e-9));
}

TEST_CASE("coercivity probe rejects degenerate input") {
  auto m = testutil::unit_interval(101);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  auto spec = model_spec(m);
  auto u0 = apply_zero_boundary(
      m, field_from_fn(m, [](double x, double, double) { return std::sin(kPi * x); }));
  CHECK_THROWS_AS(coercivity_probe(spec, p, w, m, u0, {1.0}), DomainError);
  auto zero = apply_zero_boundary(m, constant_field(m, 0.0));
  CHECK_THROWS_AS(coercivity_probe(spec, p, w, m, zero, {1.0, 2.0}), DomainError);
}

TEST_CASE("monotonicity bracket: identical fields and the sin oracle") {
  auto m = testutil::unit_interval(401);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  auto spec = model_spec(m);
  auto u = make_stochastic_field(m, [](double x, double, double) { return std::sin(kPi * x); });
  CHECK(monotonicity_bracket(spec, u, u, p, w, m) == 0.0);
  auto zero = make_stochastic_field(m, constant_field(m, 0.0));
  CHECK(monotonicity_bracket(spec, u, zero, p, w, m) ==
        doctest::Approx(kPi * kPi / 2.0).epsilon(1e-3));
}

TEST_CASE("monotonicity bracket positive on random pairs") {
  auto m = testutil::unit_interval(101);
  auto rep = suites::run_monotone_suite(m, 100, 404);
  CHECK(rep.all_pass);
}

TEST_CASE("boundedness probe: norm-case bound on random draws") {
  auto m = testutil::unit_interval(101);
  auto w = make_weight_field(m, [](double x, double, double) { return 1.0 + 0.5 * x; });
  auto k = make_stochastic_field(m, [](double x, double, double) { return 0.25 + 0.25 * x; });
  auto zero = make_stochastic_field(m, constant_field(m, 0.0));
  auto f = make_stochastic_field(m, constant_field(m, 1.0));
  auto spec = make_p_laplacian_spec(m, f, [](double) { return 0.0; }, zero, k, 1.0, 1.5);
  for (int i = 0; i < 20; ++i) {
    auto u = suites::draw_smooth_field(m, 616, 2 * i, false);
    auto phi_raw = suites::draw_smooth_field(m, 616, 2 * i + 1, true);
    auto p = make_exponent_field(m, [i](double x, double, double) {
      return 1.6 + 0.1 * (i % 5) + 0.4 * std::sin(3 * x);
    });
    auto rep = boundedness_probe(u, phi_raw, spec, p, w, m);
    CHECK(rep.pass);
    CHECK((rep.theta_exponent == 1.0 / conjugate_exponent(p).p_minus ||
           rep.theta_exponent == 1.0 / conjugate_exponent(p).p_plus));
  }
}

TEST_CASE("custom kernel path evaluates expressions") {
  auto m = testutil::unit_interval(51);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  ProblemSpec spec;
  spec.kind = ModelKind::custom;
  spec.A = [](const KernelArgs& a) -> std::array<double, 2> {
    return {a.theta * a.xi[0], 0.0};
  };
  spec.A0 = [](const KernelArgs&) { return 0.0; };
  spec.f = make_stochastic_field(m, constant_field(m, 1.0));
  spec.g = [](double) { return 0.0; };
  spec.gamma_fn = make_stochastic_field(m, constant_field(m, 0.0));
  spec.k_fn = make_stochastic_field(m, constant_field(m, 0.0));
  auto u = apply_zero_boundary(
      m, field_from_fn(m, [](double x, double, double) { return std::sin(kPi * x); }));
  // identical to the p = 2 model kernel
  auto model = model_spec(m);
  CHECK(pairing(u, u, spec, p, w, m).total ==
        doctest::Approx(pairing(u, u, model, p, w, m).total).epsilon(1e-14));
}
