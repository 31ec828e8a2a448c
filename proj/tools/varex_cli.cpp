// Command-line front end: norm evaluation, inequality suites, operator
// probes, ensemble solves, and refinement studies over JSON configs.
// Reports are deterministic for a fixed config and seed (no timestamps,
// 17-significant-digit floats) and written atomically.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "varex/config.hpp"
#include "varex/report.hpp"
#include "varex/suites.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
};

varex::RunConfig load(const CommonArgs& args) {
  varex::RunConfig cfg = varex::load_config(args.config_path);
  if (args.seed_set) cfg.seed = args.seed;
  return cfg;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  return (fs::path(args.out_dir) / name).string();
}

int run_norm(const CommonArgs& args) {
  varex::RunConfig cfg = load(args);
  auto m = varex::build_grid(cfg);
  auto p = varex::build_exponent(cfg, m);
  auto w = varex::build_weight(cfg, m);
  auto u = varex::build_field(cfg, "u", m);

  const varex::NormResult r = varex::luxemburg_norm(u, p, w, m);
  json j;
  j["value"] = r.value;
  j["modular_at_unit"] = r.modular_at_unit;
  j["iterations"] = r.iterations;
  const std::string text = j.dump(2) + "\n";
  varex::write_text_atomic(out_path(args, "norm.json"), text);
  std::cout << text;
  return 0;
}

int run_check(const CommonArgs& args, const std::string& suite) {
  varex::RunConfig cfg = load(args);
  varex::suites::SuiteReport rep;
  if (suite == "prop2") {
    auto m = varex::build_grid(cfg);
    rep = varex::suites::run_prop2_suite(m, static_cast<int>(cfg.suite_draws), cfg.seed);
  } else if (suite == "holder") {
    auto m = varex::build_grid(cfg);
    rep = varex::suites::run_holder_suite(m, static_cast<int>(cfg.suite_draws), cfg.seed);
  } else if (suite == "poincare") {
    auto m = varex::build_grid(cfg);
    rep = varex::suites::run_poincare_suite(m);
  } else if (suite == "chain") {
    auto m = varex::build_grid(cfg);
    rep = varex::suites::run_chain_suite(m, cfg.seed);
  } else if (suite == "weakconv") {
    rep = varex::suites::run_weakconv_suite();
  } else if (suite == "norm") {
    auto m = varex::build_grid(cfg);
    rep = varex::suites::run_norm_oracle_suite(m, static_cast<int>(cfg.suite_draws), cfg.seed);
  } else {
    throw varex::ConfigError("--suite", "unknown suite '" + suite + "'");
  }
  varex::write_text_atomic(out_path(args, "check_" + suite + ".csv"),
                           varex::suite_rows_csv(rep.rows));
  int passed = 0;
  for (const auto& r : rep.rows) passed += r.pass;
  std::cout << rep.name << ": " << passed << "/" << rep.rows.size() << " checks passed\n";
  return rep.all_pass ? 0 : 1;
}

json growth_condition_json(const varex::GrowthCondition& c) {
  json j;
  j["worst_slack"] = c.worst_slack;
  j["witness"] = c.witness;
  j["checked"] = c.checked;
  j["skipped"] = c.skipped;
  j["pass"] = c.pass;
  return j;
}

int run_probe(const CommonArgs& args, const std::string& check) {
  varex::RunConfig cfg = load(args);
  auto m = varex::build_grid(cfg);
  auto p = varex::build_exponent(cfg, m);
  auto w = varex::build_weight(cfg, m);
  auto spec = varex::build_problem(cfg, m);

  json j;
  bool pass = false;
  if (check == "growth") {
    const auto rep = varex::check_growth(spec, p, w, m, cfg.suite_draws, cfg.seed);
    j["h3"] = growth_condition_json(rep.h3);
    j["h4"] = growth_condition_json(rep.h4);
    j["h5"] = growth_condition_json(rep.h5);
    j["eq10"] = growth_condition_json(rep.eq10);
    pass = rep.pass;
  } else if (check == "coercivity") {
    auto u0 = varex::build_field(cfg, "u", m, /*zero_boundary=*/true);
    const auto rep = varex::coercivity_probe(spec, p, w, m, u0, {1.0, 2.0, 4.0, 8.0});
    json rows = json::array();
    for (const auto& r : rep.rows) {
      rows.push_back({{"scale", r.scale},
                      {"seminorm", r.seminorm},
                      {"pairing", r.pairing_value},
                      {"ratio", r.ratio}});
    }
    j["rows"] = rows;
    j["fitted_r"] = rep.fitted_r;
    j["ratio_increasing"] = rep.ratio_increasing;
    pass = rep.pass;
  } else if (check == "monotone") {
    const auto rep =
        varex::suites::run_monotone_suite(m, static_cast<int>(cfg.suite_draws), cfg.seed);
    json rows = json::array();
    for (const auto& r : rep.rows)
      rows.push_back({{"case", r.case_id}, {"bracket", r.lhs}, {"pass", r.pass}});
    j["pairs"] = rows;
    pass = rep.all_pass;
  } else {
    throw varex::ConfigError("--check", "unknown probe '" + check + "'");
  }
  j["pass"] = pass;
  varex::write_text_atomic(out_path(args, "probe_" + check + ".json"), j.dump(2) + "\n");
  std::cout << "probe " << check << (pass ? ": pass" : ": FAIL") << "\n";
  return pass ? 0 : 1;
}

int run_solve(const CommonArgs& args) {
  varex::RunConfig cfg = load(args);
  auto m = varex::build_grid(cfg);
  auto p = varex::build_exponent(cfg, m);
  auto w = varex::build_weight(cfg, m);
  auto spec = varex::build_problem(cfg, m);

  const varex::SolveReport rep = varex::solve_ensemble(spec, p, w, m, cfg.solver);

  for (int j = 0; j < m.n_samples(); ++j) {
    std::ostringstream os;
    os << (m.grid.dim == 2 ? "x,y,value\n" : "x,value\n");
    for (int node = 0; node < m.n_nodes(); ++node) {
      const auto c = m.grid.coords(node);
      os << varex::format_double(c[0]) << ',';
      if (m.grid.dim == 2) os << varex::format_double(c[1]) << ',';
      os << varex::format_double(rep.samples[j].u[node]) << '\n';
    }
    varex::write_text_atomic(out_path(args, "solve_sample_" + std::to_string(j) + ".csv"),
                             os.str());
  }
  {
    std::ostringstream os;
    os << "node,mean,std\n";
    for (int node = 0; node < m.n_nodes(); ++node) {
      os << node << ',' << varex::format_double(rep.mean.at(node, 0)) << ','
         << varex::format_double(rep.stddev.at(node, 0)) << '\n';
    }
    varex::write_text_atomic(out_path(args, "solve_ensemble.csv"), os.str());
  }
  json diag;
  diag["converged"] = rep.ok;
  diag["residual_max"] = rep.residual_max;
  diag["ensemble_residual"] = rep.ensemble_residual;
  diag["eps_reg"] = cfg.solver.eps_reg;
  json samples = json::array();
  for (const auto& s : rep.samples) {
    json js;
    js["outer_iterations"] = s.outer_iterations;
    js["pcg_iterations_total"] = s.pcg_iterations_total;
    js["weak_residual"] = s.weak_residual;
    js["energy_history"] = s.energy_history;
    js["converged"] = s.converged;
    if (!s.failure.empty()) js["failure"] = s.failure;
    samples.push_back(std::move(js));
  }
  diag["samples"] = std::move(samples);
  varex::write_text_atomic(out_path(args, "solve_diag.json"), diag.dump(2) + "\n");
  std::cout << "solve: " << (rep.ok ? "converged" : "FAILED") << ", max residual "
            << varex::format_double(rep.residual_max) << "\n";
  return rep.ok ? 0 : 1;
}

int run_refine(const CommonArgs& args, int levels) {
  varex::RunConfig cfg = load(args);
  varex::LevelBuilder builder = [&cfg](const std::vector<int>& n) {
    varex::SolveInputs in;
    in.m = varex::build_grid_with_n(cfg, n);
    in.p = varex::build_exponent(cfg, in.m);
    in.w = varex::build_weight(cfg, in.m);
    in.spec = varex::build_problem(cfg, in.m);
    return in;
  };
  std::optional<varex::SpaceSampleFn> exact;
  if (cfg.u_exact) {
    const varex::FieldSpec fe = *cfg.u_exact;
    exact = [fe](double x, double y, double t) { return fe(x, y, t); };
  }
  const varex::RefineStudy study = varex::refine_study(builder, cfg.grid.n, levels, cfg.solver,
                                                       exact);
  std::ostringstream os;
  os << "n,diff_sup,err_exact,order\n";
  for (const auto& row : study.rows) {
    os << row.n[0];
    for (std::size_t a = 1; a < row.n.size(); ++a) os << 'x' << row.n[a];
    os << ',' << varex::format_double(row.diff_sup) << ',' << varex::format_double(row.err_exact)
       << ',' << varex::format_double(row.order) << '\n';
  }
  os << "fitted_order," << varex::format_double(study.fitted_order) << ",,\n";
  varex::write_text_atomic(out_path(args, "refine.csv"), os.str());
  std::cout << "refine: fitted order " << varex::format_double(study.fitted_order)
            << (study.exact_to_roundoff ? " (exact to roundoff)" : "") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted variable-exponent space toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string suite = "prop2";
  std::string probe_check = "growth";
  int levels = 3;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "JSON problem config")->required();
    cmd->add_option("--out", args.out_dir, "report directory");
    auto* s = cmd->add_option("--seed", args.seed, "override the config seed");
    s->each([&](const std::string&) { args.seed_set = true; });
  };

  auto* norm_cmd = app.add_subcommand("norm", "Luxemburg norm of fields.u");
  add_common(norm_cmd);
  auto* check_cmd = app.add_subcommand("check", "inequality suites");
  add_common(check_cmd);
  check_cmd->add_option("--suite", suite, "holder|prop2|poincare|chain|weakconv|norm");
  auto* probe_cmd = app.add_subcommand("probe", "operator probes");
  add_common(probe_cmd);
  probe_cmd->add_option("--check", probe_check, "growth|coercivity|monotone");
  auto* solve_cmd = app.add_subcommand("solve", "ensemble solve of the elliptic problem");
  add_common(solve_cmd);
  auto* refine_cmd = app.add_subcommand("refine", "refinement study");
  add_common(refine_cmd);
  refine_cmd->add_option("--levels", levels, "number of refinement levels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (norm_cmd->parsed()) return run_norm(args);
    if (check_cmd->parsed()) return run_check(args, suite);
    if (probe_cmd->parsed()) return run_probe(args, probe_check);
    if (solve_cmd->parsed()) return run_solve(args);
    if (refine_cmd->parsed()) return run_refine(args, levels);
  } catch (const varex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const varex::SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
