#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"
#include "varex/solver.hpp"

using namespace varex;
using testutil::kPi;

namespace {

struct Problem1D {
  ProductMeasureGrid m;
  ExponentField p;
  WeightField w;
  ProblemSpec spec;
};

Problem1D poisson_like(int n, double p_value, const SpaceSampleFn& f_fn,
                       const SpaceSampleFn& theta_fn = [](double, double, double) { return 1.0; },
                       std::vector<double> samples = {0.0}, std::vector<double> probs = {1.0}) {
  Problem1D pr{build_grid(1, {{0.0, 1.0}}, {n}, std::move(samples), std::move(probs)),
               {}, {}, {}};
  pr.p = make_constant_exponent(pr.m, p_value);
  pr.w = make_weight_field(pr.m, theta_fn);
  pr.w.h1_ok = pr.w.h2_ok = true;
  auto zero = make_stochastic_field(pr.m, constant_field(pr.m, 0.0));
  pr.spec = make_p_laplacian_spec(pr.m, make_stochastic_field(pr.m, f_fn),
                                  [](double) { return 0.0; }, zero, zero, 1.0, 1.0);
  return pr;
}

SolveConfig quiet_cfg() {
  SolveConfig cfg;
  cfg.g_zero = true;
  return cfg;
}

}  // namespace

TEST_CASE("p=2 Poisson with unit datum is nodally exact") {
  auto pr = poisson_like(101, 2.0, [](double, double, double) { return 1.0; });
  auto s = solve_sample(pr.spec, pr.p, pr.w, pr.m, 0, quiet_cfg());
  REQUIRE(s.converged);
  double err = 0.0, umax = 0.0;
  for (int i = 0; i < pr.m.n_nodes(); ++i) {
    const double x = pr.m.grid.coords(i)[0];
    err = std::max(err, std::abs(s.u[i] - 0.5 * x * (1.0 - x)));
    umax = std::max(umax, s.u[i]);
  }
  const double h = pr.m.grid.h[0];
  CHECK(err <= 2.0 * h * h);
  CHECK(err <= 1e-10);  // the 3-point stencil is exact on quadratics
  CHECK(umax == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(s.weak_residual <= 1e-10);
}

TEST_CASE("zero datum returns the zero solution immediately") {
  auto pr = poisson_like(101, 2.0, [](double, double, double) { return 0.0; });
  auto s = solve_sample(pr.spec, pr.p, pr.w, pr.m, 0, quiet_cfg());
  REQUIRE(s.converged);
  CHECK(s.outer_iterations == 1);
  for (double v : s.u) CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(s.weak_residual <= 1e-14);
}

TEST_CASE("p=4 closed form: max value and residual") {
  auto pr = poisson_like(401, 4.0, [](double, double, double) { return 1.0; });
  auto s = solve_sample(pr.spec, pr.p, pr.w, pr.m, 0, quiet_cfg());
  REQUIRE(s.converged);
  double umax = 0.0;
  for (double v : s.u) umax = std::max(umax, v);
  const double exact = 0.75 * std::pow(0.5, 4.0 / 3.0);
  CHECK(umax == doctest::Approx(exact).epsilon(5e-3 / exact));
  CHECK(s.weak_residual <= 1e-6);

  // pointwise profile of the closed form
  double err = 0.0;
  for (int i = 0; i < pr.m.n_nodes(); ++i) {
    const double x = pr.m.grid.coords(i)[0];
    const double uex = 0.75 * (std::pow(0.5, 4.0 / 3.0) - std::pow(std::abs(0.5 - x), 4.0 / 3.0));
    err = std::max(err, std::abs(s.u[i] - uex));
  }
  CHECK(err <= 5e-3);
}

TEST_CASE("energy descent along accepted iterates (g = 0)") {
  auto pr = poisson_like(201, 4.0, [](double, double, double) { return 1.0; });
  auto s = solve_sample(pr.spec, pr.p, pr.w, pr.m, 0, quiet_cfg());
  REQUIRE(s.converged);
  for (std::size_t i = 1; i < s.energy_history.size(); ++i)
    CHECK(s.energy_history[i] <=
          s.energy_history[i - 1] + 1e-12 * std::max(1.0, std::abs(s.energy_history[i - 1])));
}

TEST_CASE("weak residual: consistency, perturbation, zero case") {
  auto pr = poisson_like(201, 2.0, [](double, double, double) { return 1.0; });
  auto s = solve_sample(pr.spec, pr.p, pr.w, pr.m, 0, quiet_cfg());
  REQUIRE(s.converged);
  Field vals(pr.m.n_nodes(), 1);
  for (int i = 0; i < pr.m.n_nodes(); ++i) vals.at(i, 0) = s.u[i];
  auto u = StochasticField{vals, true};
  CHECK(weak_residual(u, pr.spec, pr.p, pr.w, pr.m) <= 1e-10);

  Field pert = vals;
  for (int i = 0; i < pr.m.n_nodes(); ++i)
    pert.at(i, 0) += 0.1 * std::sin(kPi * pr.m.grid.coords(i)[0]);
  const double r = weak_residual(StochasticField{pert, true}, pr.spec, pr.p, pr.w, pr.m);
  // perturbation defect ~ 0.1 pi^2/2 against denominator 1 + pi/sqrt(2)
  CHECK(r >= 0.05);

  auto pr0 = poisson_like(201, 2.0, [](double, double, double) { return 0.0; });
  auto zero = apply_zero_boundary(pr0.m, constant_field(pr0.m, 0.0));
  CHECK(weak_residual(zero, pr0.spec, pr0.p, pr0.w, pr0.m) == 0.0);

  CHECK_THROWS_AS(weak_residual(u, pr.spec, pr.p, pr.w, pr.m, std::vector<StochasticField>{}),
                  DomainError);
}

TEST_CASE("ensemble: theta = 1+t reproduces the weighted mean") {
  auto pr = poisson_like(401, 2.0, [](double, double, double) { return 1.0; },
                         [](double, double, double t) { return 1.0 + t; }, {0.0, 1.0},
                         {0.5, 0.5});
  auto rep = solve_ensemble(pr.spec, pr.p, pr.w, pr.m, quiet_cfg());
  REQUIRE(rep.ok);
  double mean_max = 0.0;
  for (int i = 0; i < pr.m.n_nodes(); ++i) mean_max = std::max(mean_max, rep.mean.at(i, 0));
  const double h = pr.m.grid.h[0];
  CHECK(mean_max == doctest::Approx(3.0 / 32.0).epsilon(2.0 * h * h));
  // per-sample solutions are x(1-x)/(2(1+t))
  for (int j = 0; j < 2; ++j) {
    const double t = pr.m.omega.samples[j];
    double err = 0.0;
    for (int i = 0; i < pr.m.n_nodes(); ++i) {
      const double x = pr.m.grid.coords(i)[0];
      err = std::max(err, std::abs(rep.samples[j].u[i] - x * (1 - x) / (2 * (1 + t))));
    }
    CHECK(err <= 2.0 * h * h);
  }
  CHECK(rep.ensemble_residual <= 1e-8);
}

TEST_CASE("ensemble: degenerate sample sets have zero spread") {
  auto pr1 = poisson_like(101, 2.0, [](double, double, double) { return 1.0; });
  auto rep1 = solve_ensemble(pr1.spec, pr1.p, pr1.w, pr1.m, quiet_cfg());
  REQUIRE(rep1.ok);
  for (int i = 0; i < pr1.m.n_nodes(); ++i) {
    CHECK(rep1.stddev.at(i, 0) == 0.0);
    CHECK(rep1.mean.at(i, 0) == doctest::Approx(rep1.samples[0].u[i]));
  }

  auto pr2 = poisson_like(101, 2.0, [](double, double, double) { return 1.0; },
                          [](double, double, double) { return 1.0; }, {0.5, 0.5}, {0.5, 0.5});
  auto rep2 = solve_ensemble(pr2.spec, pr2.p, pr2.w, pr2.m, quiet_cfg());
  REQUIRE(rep2.ok);
  for (int i = 0; i < pr2.m.n_nodes(); ++i) CHECK(rep2.stddev.at(i, 0) <= 1e-12);
}

TEST_CASE("monotone datum comparison at p = 2") {
  auto pr = poisson_like(101, 2.0, [](double x, double, double) { return 1.0 + std::sin(3 * x); });
  auto pr2 = poisson_like(101, 2.0,
                          [](double x, double, double) { return 1.5 + std::sin(3 * x); });
  auto s1 = solve_sample(pr.spec, pr.p, pr.w, pr.m, 0, quiet_cfg());
  auto s2 = solve_sample(pr2.spec, pr2.p, pr2.w, pr2.m, 0, quiet_cfg());
  REQUIRE(s1.converged);
  REQUIRE(s2.converged);
  for (int i = 0; i < pr.m.n_nodes(); ++i) CHECK(s1.u[i] <= s2.u[i] + 1e-10);
}

TEST_CASE("uniqueness probe: solutions agree from different starts") {
  auto pr = poisson_like(201, 4.0, [](double, double, double) { return 1.0; });
  SolveConfig cfg = quiet_cfg();
  std::vector<double> guess_a(pr.m.n_nodes()), guess_b(pr.m.n_nodes());
  for (int i = 0; i < pr.m.n_nodes(); ++i) {
    const double x = pr.m.grid.coords(i)[0];
    guess_a[i] = 0.2 * std::sin(kPi * x);
    guess_b[i] = 0.4 * x * (1.0 - x);
  }
  auto sa = solve_sample(pr.spec, pr.p, pr.w, pr.m, 0, cfg, guess_a);
  auto sb = solve_sample(pr.spec, pr.p, pr.w, pr.m, 0, cfg, guess_b);
  REQUIRE(sa.converged);
  REQUIRE(sb.converged);
  double diff = 0.0;
  for (int i = 0; i < pr.m.n_nodes(); ++i) diff = std::max(diff, std::abs(sa.u[i] - sb.u[i]));
  CHECK(diff <= 10.0 * 1e-6);
}

TEST_CASE("fixed-point diagnostics shrink jointly near convergence") {
  auto pr = poisson_like(201, 4.0, [](double, double, double) { return 1.0; });
  auto s = solve_sample(pr.spec, pr.p, pr.w, pr.m, 0, quiet_cfg());
  REQUIRE(s.converged);
  REQUIRE(s.iterate_history.size() >= 6);
  const auto& final_u = s.iterate_history.back();
  auto to_field = [&](const std::vector<double>& v) {
    Field f(pr.m.n_nodes(), 1);
    for (int i = 0; i < pr.m.n_nodes(); ++i) f.at(i, 0) = v[i];
    return StochasticField{f, true};
  };
  auto uf = to_field(final_u);
  std::vector<double> brackets, dists;
  for (std::size_t k = s.iterate_history.size() - 6; k + 1 < s.iterate_history.size(); ++k) {
    auto uk = to_field(s.iterate_history[k]);
    brackets.push_back(monotonicity_bracket(pr.spec, uk, uf, pr.p, pr.w, pr.m));
    Field d(pr.m.n_nodes(), 1);
    for (int i = 0; i < pr.m.n_nodes(); ++i) d.at(i, 0) = uk.data.at(i, 0) - uf.data.at(i, 0);
    dists.push_back(sobolev_norm(StochasticField{d, true}, pr.p, pr.w, pr.m));
  }
  for (std::size_t k = 0; k + 1 < brackets.size(); ++k) {
    CHECK(brackets[k + 1] <= brackets[k] * 1.05 + 1e-14);
    CHECK(dists[k + 1] <= dists[k] * 1.05 + 1e-14);
  }
  CHECK(brackets.back() <= brackets.front());
  CHECK(dists.back() <= dists.front());
}

TEST_CASE("refine study: second order on the sine oracle") {
  LevelBuilder build = [](const std::vector<int>& n) {
    SolveInputs in;
    auto pr = poisson_like(n[0], 2.0, [](double x, double, double) {
      return kPi * kPi * std::sin(kPi * x);
    });
    in.m = pr.m;
    in.p = pr.p;
    in.w = pr.w;
    in.spec = pr.spec;
    return in;
  };
  SpaceSampleFn exact = [](double x, double, double) { return std::sin(kPi * x); };
  auto study = refine_study(build, {101}, 3, quiet_cfg(), exact);
  CHECK(study.fitted_order >= 1.9);
  for (const auto& row : study.rows) {
    const double h = 1.0 / (row.n[0] - 1);
    CHECK(row.err_exact <= 2.0 * h * h);
  }
}

TEST_CASE("refine study: p=4 self-convergence") {
  SolveConfig cfg = quiet_cfg();
  LevelBuilder build = [](const std::vector<int>& n) {
    SolveInputs in;
    auto pr = poisson_like(n[0], 4.0, [](double, double, double) { return 1.0; });
    in.m = pr.m;
    in.p = pr.p;
    in.w = pr.w;
    in.spec = pr.spec;
    return in;
  };
  auto study = refine_study(build, {51}, 3, cfg);
  REQUIRE(study.rows.size() == 3);
  CHECK(study.rows[1].diff_sup > study.rows[2].diff_sup);
}

TEST_CASE("refine study rejects a single level") {
  LevelBuilder build = [](const std::vector<int>&) { return SolveInputs{}; };
  CHECK_THROWS_AS(refine_study(build, {51}, 1, quiet_cfg()), DomainError);
}

TEST_CASE("custom kernels are probe-only") {
  auto pr = poisson_like(51, 2.0, [](double, double, double) { return 1.0; });
  pr.spec.kind = ModelKind::custom;
  CHECK_THROWS_AS(solve_sample(pr.spec, pr.p, pr.w, pr.m, 0, quiet_cfg()), SolveError);
}

TEST_CASE("2-D manufactured solution at second order") {
  auto m = build_grid(2, {{0.0, 1.0}, {0.0, 1.0}}, {41, 41}, {0.0}, {1.0});
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  auto zero = make_stochastic_field(m, constant_field(m, 0.0));
  auto f = make_stochastic_field(m, [](double x, double y, double) {
    return 2.0 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y);
  });
  auto spec = make_p_laplacian_spec(m, f, [](double) { return 0.0; }, zero, zero, 1.0, 1.0);
  auto s = solve_sample(spec, p, w, m, 0, quiet_cfg());
  REQUIRE(s.converged);
  double err = 0.0;
  for (int node = 0; node < m.n_nodes(); ++node) {
    const auto c = m.grid.coords(node);
    err = std::max(err, std::abs(s.u[node] - std::sin(kPi * c[0]) * std::sin(kPi * c[1])));
  }
  const double h = m.grid.h[0];
  CHECK(err <= 2.0 * h * h);
  CHECK(s.weak_residual <= 1e-8);
}

TEST_CASE("nonzero g: lagged lower-order term still converges") {
  auto m = build_grid(1, {{0.0, 1.0}}, {201}, {0.0}, {1.0});
  auto p = make_constant_exponent(m, 2.0);
  auto w = unit_weight(m);
  auto zero = make_stochastic_field(m, constant_field(m, 0.0));
  auto f = make_stochastic_field(m, constant_field(m, 1.0));
  auto spec = make_p_laplacian_spec(
      m, f, [](double s) { return std::exp(-s * s); }, zero, zero, 1.0, 1.0);
  SolveConfig cfg;  // g != 0: no energy line search
  auto s = solve_sample(spec, p, w, m, 0, cfg);
  REQUIRE(s.converged);
  CHECK(s.weak_residual <= 1e-8);
  // the lower-order term pulls the solution below the pure Poisson one
  auto pr0 = poisson_like(201, 2.0, [](double, double, double) { return 1.0; });
  auto s0 = solve_sample(pr0.spec, pr0.p, pr0.w, pr0.m, 0, quiet_cfg());
  double umax = 0.0, u0max = 0.0;
  for (int i = 0; i < m.n_nodes(); ++i) {
    umax = std::max(umax, s.u[i]);
    u0max = std::max(u0max, s0.u[i]);
  }
  CHECK(umax < u0max);
}
