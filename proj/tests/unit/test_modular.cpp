#include <doctest.h>

#include <cmath>
#include <random>

#include "test_helpers.hpp"
#include "varex/modular.hpp"
#include "varex/suites.hpp"
#include "varex/util.hpp"

using namespace varex;
using testutil::kPi;

TEST_CASE("modular: basic values") {
  auto m = testutil::unit_interval(101, {0.0, 1.0}, {0.5, 0.5});
  auto p = make_constant_exponent(m, 3.0);
  auto w = unit_weight(m);
  CHECK(modular(make_stochastic_field(m, constant_field(m, 0.0)), p, w, m) == 0.0);
  CHECK(modular(make_stochastic_field(m, constant_field(m, 1.0)), p, w, m) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("modular: integral of x^2 at n=2001") {
  auto m = testutil::unit_interval(2001);
  auto u = make_stochastic_field(m, [](double x, double, double) { return x; });
  auto p = make_constant_exponent(m, 2.0);
  CHECK(modular(u, p, unit_weight(m), m) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("modular overflow reports infinity") {
  auto m = testutil::unit_interval(11);
  auto u = make_stochastic_field(m, constant_field(m, 1e200));
  auto p = make_constant_exponent(m, 4.0);
  CHECK(std::isinf(modular(u, p, unit_weight(m), m)));
  CHECK_THROWS_AS(luxemburg_norm(u, p, unit_weight(m), m), DomainError);
}

TEST_CASE("luxemburg norm: constant field, constant exponent") {
  auto m = testutil::unit_interval(101);
  auto u = make_stochastic_field(m, constant_field(m, 2.0));
  auto p = make_constant_exponent(m, 2.0);
  auto r = luxemburg_norm(u, p, unit_weight(m), m);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.value == 0.0 ? true : std::abs(r.modular_at_unit - 1.0) <= 1e-8);
}

TEST_CASE("luxemburg norm: zero field short-circuits") {
  auto m = testutil::unit_interval(101);
  auto r = luxemburg_norm(make_stochastic_field(m, constant_field(m, 0.0)),
                          make_constant_exponent(m, 2.0), unit_weight(m), m);
  CHECK(r.value == 0.0);
  CHECK(r.iterations == 0);
}

TEST_CASE("luxemburg norm: two-valued exponent closed form") {
  // p = 2 left of 1/2 and 4 right of it, u == 2: with y = (2/lambda)^2
  // the unit-modular equation is w2 y + w4 y^2 = 1, w2 + w4 = 1, so
  // y = 1 and the norm is exactly 2 at every resolution.
  for (int n : {101, 256, 401}) {
    auto m = testutil::unit_interval(n);
    auto p = make_exponent_field(m, [](double x, double, double) { return x <= 0.5 ? 2.0 : 4.0; });
    auto u = make_stochastic_field(m, constant_field(m, 2.0));
    auto r = luxemburg_norm(u, p, unit_weight(m), m);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));

    // independent bisection oracle on the same discrete modular
    double w2 = 0.0, w4 = 0.0;
    for (int i = 0; i < m.n_nodes(); ++i)
      (m.grid.coords(i)[0] <= 0.5 ? w2 : w4) += m.grid.quad_weights[i];
    auto rho = [&](double lam) {
      return w2 * std::pow(2.0 / lam, 2.0) + w4 * std::pow(2.0 / lam, 4.0);
    };
    CHECK(r.value == doctest::Approx(testutil::reference_luxemburg(rho)).epsilon(1e-9));
  }
}

TEST_CASE("luxemburg norm: homogeneity") {
  auto m = testutil::unit_interval(101, {0.0, 2.0}, {0.25, 0.75});
  for (int i = 0; i < 5; ++i) {
    auto d = suites::draw_norm_inputs(m, 11, i);
    const double base = luxemburg_norm(d.u, d.p, d.w, m).value;
    for (double c : {1e-3, 0.5, 3.0, 1e3}) {
      Field scaled = d.u.data;
      for (double& v : scaled.values) v *= c;
      const double n2 = luxemburg_norm(StochasticField{scaled, false}, d.p, d.w, m).value;
      CHECK(n2 == doctest::Approx(c * base).epsilon(1e-10));
    }
  }
}

TEST_CASE("constant-exponent reduction ||u|| = rho^(1/p)") {
  auto m = testutil::unit_interval(201);
  auto rng = make_rng(5, 0);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (double pv : {1.5, 2.0, 3.0, 4.0}) {
    Field vals(m.n_nodes(), 1);
    for (auto& v : vals.values) v = d(rng);
    auto u = make_stochastic_field(m, std::move(vals));
    auto p = make_constant_exponent(m, pv);
    auto w = unit_weight(m);
    const double rho = modular(u, p, w, m);
    CHECK(luxemburg_norm(u, p, w, m).value ==
          doctest::Approx(std::pow(rho, 1.0 / pv)).epsilon(1e-10));
  }
}

TEST_CASE("sobolev norm: analytic cases") {
  auto m = testutil::unit_interval(2001);
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);

  CHECK(sobolev_norm(make_stochastic_field(m, constant_field(m, 0.0)), p, w, m) == 0.0);

  auto ux = make_stochastic_field(m, [](double x, double, double) { return x; });
  CHECK(sobolev_norm(ux, p, w, m) ==
        doctest::Approx(1.0 / std::sqrt(3.0) + 1.0).epsilon(1e-4));

  auto us = make_stochastic_field(m, [](double x, double, double) { return std::sin(kPi * x); });
  CHECK(sobolev_norm(us, p, w, m) ==
        doctest::Approx(1.0 / std::sqrt(2.0) + kPi / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(w0_seminorm(us, p, w, m) == doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-3));
}

TEST_CASE("norm-modular chains: unit boundary and hand-computed case") {
  auto m = testutil::unit_interval(101);
  auto w = unit_weight(m);

  // ||u|| = 1 boundary: both chains collapse to rho = 1.
  auto u1 = make_stochastic_field(m, constant_field(m, 1.0));
  auto p = make_constant_exponent(m, 2.7);
  auto rep = check_prop2(u1, p, w, m);
  CHECK(rep.pass);
  CHECK(rep.norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.mod == doctest::Approx(1.0).epsilon(1e-10));

  // u == 2 with the two-valued exponent: norm 2, modular w2*4 + w4*16,
  // and 2^{p-} <= rho <= 2^{p+}.
  auto p2 = make_exponent_field(m, [](double x, double, double) { return x <= 0.5 ? 2.0 : 4.0; });
  auto u2 = make_stochastic_field(m, constant_field(m, 2.0));
  auto rep2 = check_prop2(u2, p2, w, m);
  CHECK(rep2.pass);
  CHECK(rep2.norm == doctest::Approx(2.0).epsilon(1e-9));
  double w2 = 0.0, w4 = 0.0;
  for (int i = 0; i < m.n_nodes(); ++i)
    (m.grid.coords(i)[0] <= 0.5 ? w2 : w4) += m.grid.quad_weights[i];
  CHECK(rep2.mod == doctest::Approx(4.0 * w2 + 16.0 * w4).epsilon(1e-12));
  CHECK(rep2.lower <= rep2.mod + 1e-9);
  CHECK(rep2.mod <= rep2.upper + 1e-9);
}

TEST_CASE("prop2 random draws all pass") {
  auto m = testutil::unit_interval(101, {0.0, 1.0}, {0.4, 0.6});
  for (int i = 0; i < 100; ++i) {
    auto d = suites::draw_norm_inputs(m, 99, i);
    CHECK(check_prop2(d.u, d.p, d.w, m).pass);
  }
}

TEST_CASE("triangle inequality on random pairs") {
  auto m = testutil::unit_interval(101);
  for (int i = 0; i < 30; ++i) {
    auto d1 = suites::draw_norm_inputs(m, 123, 2 * i);
    auto d2 = suites::draw_norm_inputs(m, 123, 2 * i + 1);
    Field sum(m.n_nodes(), 1);
    for (std::size_t k = 0; k < sum.values.size(); ++k)
      sum.values[k] = d1.u.data.values[k] + d2.u.data.values[k];
    const double lhs = luxemburg_norm(StochasticField{sum, false}, d1.p, d1.w, m).value;
    const double rhs = luxemburg_norm(d1.u, d1.p, d1.w, m).value +
                       luxemburg_norm(d2.u, d1.p, d1.w, m).value;
    CHECK(normalized_slack(lhs, rhs) >= -1e-9);
  }
}

TEST_CASE("pointwise monotonicity of the norm") {
  auto m = testutil::unit_interval(101);
  for (int i = 0; i < 20; ++i) {
    auto d = suites::draw_norm_inputs(m, 321, i);
    Field bigger = d.u.data;
    auto rng = make_rng(77, i);
    std::uniform_real_distribution<double> extra(0.0, 1.0);
    for (double& v : bigger.values) v = std::abs(v) + extra(rng);
    const double nu = luxemburg_norm(d.u, d.p, d.w, m).value;
    const double nb = luxemburg_norm(StochasticField{bigger, false}, d.p, d.w, m).value;
    CHECK(nu <= nb + 1e-12);
  }
}

TEST_CASE("weighted norm equals unweighted norm of u theta^(1/p)") {
  auto m = testutil::unit_interval(101);
  for (int i = 0; i < 20; ++i) {
    auto d = suites::draw_norm_inputs(m, 555, i);
    Field scaled(m.n_nodes(), m.n_samples());
    for (std::size_t k = 0; k < scaled.values.size(); ++k)
      scaled.values[k] =
          d.u.data.values[k] * std::pow(d.w.data.values[k], 1.0 / d.p.data.values[k]);
    const double weighted = luxemburg_norm(d.u, d.p, d.w, m).value;
    const double unweighted =
        luxemburg_norm(scaled, d.p.data, constant_field(m, 1.0), m).value;
    CHECK(weighted == doctest::Approx(unweighted).epsilon(1e-10));
  }
}

TEST_CASE("unit-modular identity across random draws") {
  auto m = testutil::unit_interval(101);
  for (int i = 0; i < 50; ++i) {
    auto d = suites::draw_norm_inputs(m, 888, i);
    auto r = luxemburg_norm(d.u, d.p, d.w, m);
    if (r.value > 0.0) CHECK(std::abs(r.modular_at_unit - 1.0) <= 1e-8);
  }
}
