#include "varex/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace varex {

namespace {

using nlohmann::json;

FieldSpec parse_field_spec(const json& j, const std::string& key,
                           const std::vector<std::string>& vars) {
  FieldSpec fs;
  if (j.is_number()) {
    fs.kind = FieldSpec::Kind::constant;
    fs.value = j.get<double>();
    return fs;
  }
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError(key, "expected a number or an object with a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    if (!j.contains("value")) throw ConfigError(key, "constant spec needs 'value'");
    fs.kind = FieldSpec::Kind::constant;
    fs.value = j.at("value").get<double>();
  } else if (kind == "expr") {
    if (!j.contains("formula")) throw ConfigError(key, "expr spec needs 'formula'");
    fs.kind = FieldSpec::Kind::expr;
    fs.formula = j.at("formula").get<std::string>();
    try {
      fs.compiled = Expression::parse(fs.formula, vars);
    } catch (const ExprError& e) {
      throw ConfigError(key, e.what());
    }
  } else {
    throw ConfigError(key, "unknown field kind '" + kind + "'");
  }
  return fs;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }

  RunConfig cfg;
  if (!j.contains("grid")) throw ConfigError("grid", "missing");
  const json& jg = j.at("grid");
  try {
    cfg.grid.dim = jg.at("dim").get<int>();
    for (const auto& b : jg.at("bounds"))
      cfg.grid.bounds.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
    cfg.grid.n = jg.at("n").get<std::vector<int>>();
    const json& jo = jg.at("omega");
    cfg.grid.samples = jo.at("samples").get<std::vector<double>>();
    cfg.grid.probs = jo.at("probs").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ConfigError("grid", e.what());
  }

  const std::vector<std::string> xyt = {"x", "y", "t"};
  if (j.contains("fields")) {
    for (const auto& [name, spec] : j.at("fields").items()) {
      if (name == "g")
        cfg.g = parse_field_spec(spec, "fields.g", {"s"});
      else
        cfg.fields[name] = parse_field_spec(spec, "fields." + name, xyt);
    }
  }

  if (j.contains("problem")) {
    const json& jp = j.at("problem");
    if (jp.contains("model")) cfg.model = jp.at("model").get<std::string>();
    if (jp.contains("alpha")) cfg.alpha_c = jp.at("alpha").get<double>();
    if (jp.contains("beta")) cfg.beta_c = jp.at("beta").get<double>();
    if (jp.contains("A")) cfg.custom_flux = jp.at("A").get<std::vector<std::string>>();
    if (jp.contains("A0")) cfg.custom_lower = jp.at("A0").get<std::string>();
    if (cfg.model != "p_laplacian_with_g" && cfg.model != "custom")
      throw ConfigError("problem.model", "unknown model '" + cfg.model + "'");
  }

  if (j.contains("solver")) {
    const json& js = j.at("solver");
    if (js.contains("eps_reg")) cfg.solver.eps_reg = js.at("eps_reg").get<double>();
    if (js.contains("max_outer")) cfg.solver.max_outer = js.at("max_outer").get<int>();
    if (js.contains("damping")) cfg.solver.damping = js.at("damping").get<double>();
    if (js.contains("lin_tol")) cfg.solver.lin_tol = js.at("lin_tol").get<double>();
    if (js.contains("outer_tol")) cfg.solver.outer_tol = js.at("outer_tol").get<double>();
    if (js.contains("panel_modes")) cfg.solver.panel_modes = js.at("panel_modes").get<int>();
    if (!(cfg.solver.eps_reg > 0.0)) throw ConfigError("solver.eps_reg", "must be positive");
    if (cfg.solver.damping < 0.0 || cfg.solver.damping > 1.0)
      throw ConfigError("solver.damping", "must lie in (0, 1] (0 selects the default)");
  }

  if (j.contains("suite") && j.at("suite").contains("draws"))
    cfg.suite_draws = j.at("suite").at("draws").get<long>();
  if (j.contains("alpha_field"))
    cfg.alpha_field = parse_field_spec(j.at("alpha_field"), "alpha_field", xyt);
  if (j.contains("u_exact")) cfg.u_exact = parse_field_spec(j.at("u_exact"), "u_exact", xyt);
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();

  // g == 0 constant enables the energy-descent line search.
  cfg.solver.g_zero = cfg.g.kind == FieldSpec::Kind::constant && cfg.g.value == 0.0;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<config>", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ProductMeasureGrid build_grid(const RunConfig& cfg) {
  return build_grid_with_n(cfg, cfg.grid.n);
}

ProductMeasureGrid build_grid_with_n(const RunConfig& cfg, const std::vector<int>& n) {
  try {
    return varex::build_grid(cfg.grid.dim, cfg.grid.bounds, n, cfg.grid.samples, cfg.grid.probs);
  } catch (const GridError& e) {
    throw ConfigError("grid", e.what());
  }
}

const FieldSpec& require_field(const RunConfig& cfg, const std::string& name) {
  auto it = cfg.fields.find(name);
  if (it == cfg.fields.end()) throw ConfigError("fields." + name, "missing");
  return it->second;
}

namespace {

SpaceSampleFn as_fn(const FieldSpec& fs) {
  return [fs](double x, double y, double t) { return fs(x, y, t); };
}

}  // namespace

ExponentField build_exponent(const RunConfig& cfg, const ProductMeasureGrid& m) {
  try {
    return make_exponent_field(m, as_fn(require_field(cfg, "p")));
  } catch (const DomainError& e) {
    throw ConfigError("fields.p", e.what());
  }
}

AuxExponentField build_aux_exponent(const RunConfig& cfg, const ProductMeasureGrid& m) {
  try {
    return make_aux_exponent_field(m, as_fn(require_field(cfg, "s")));
  } catch (const DomainError& e) {
    throw ConfigError("fields.s", e.what());
  }
}

WeightField build_weight(const RunConfig& cfg, const ProductMeasureGrid& m) {
  WeightField w;
  try {
    w = make_weight_field(m, as_fn(require_field(cfg, "theta")));
  } catch (const DomainError& e) {
    throw ConfigError("fields.theta", e.what());
  }
  // Run the refinement-study validator whenever p and s are present.
  if (cfg.fields.count("p") && cfg.fields.count("s")) {
    const auto rep = validate_weight(as_fn(require_field(cfg, "theta")),
                                     as_fn(require_field(cfg, "p")),
                                     as_fn(require_field(cfg, "s")), m);
    w.h1_ok = rep.h1_ok;
    w.h2_ok = rep.h2_ok;
  }
  return w;
}

StochasticField build_field(const RunConfig& cfg, const std::string& name,
                            const ProductMeasureGrid& m, bool zero_boundary) {
  const FieldSpec& fs = require_field(cfg, name);
  if (zero_boundary) return apply_zero_boundary(m, field_from_fn(m, as_fn(fs)));
  return make_stochastic_field(m, as_fn(fs));
}

ProblemSpec build_problem(const RunConfig& cfg, const ProductMeasureGrid& m) {
  StochasticField f = build_field(cfg, "f", m);
  StochasticField gamma = cfg.fields.count("gamma")
                              ? build_field(cfg, "gamma", m)
                              : make_stochastic_field(m, constant_field(m, 0.0));
  StochasticField k = cfg.fields.count("k") ? build_field(cfg, "k", m)
                                            : make_stochastic_field(m, constant_field(m, 0.0));
  const FieldSpec g = cfg.g;
  ScalarFn g_fn = [g](double s) { return g(s, 0.0, 0.0); };

  if (cfg.model == "p_laplacian_with_g")
    return make_p_laplacian_spec(m, std::move(f), g_fn, std::move(gamma), std::move(k),
                                 cfg.alpha_c, cfg.beta_c);

  // Custom kernels: expression per flux component plus a scalar
  // lower-order expression, over (x, y, t, s, xi1, xi2, theta, p).
  const std::vector<std::string> vars = {"x", "y", "t", "s", "xi1", "xi2", "theta", "p"};
  if (static_cast<int>(cfg.custom_flux.size()) != m.grid.dim)
    throw ConfigError("problem.A", "need one flux expression per dimension");
  std::vector<Expression> flux;
  for (const auto& src : cfg.custom_flux) {
    try {
      flux.push_back(Expression::parse(src, vars));
    } catch (const ExprError& e) {
      throw ConfigError("problem.A", e.what());
    }
  }
  Expression lower = [&] {
    try {
      return Expression::parse(cfg.custom_lower.empty() ? std::string("0") : cfg.custom_lower,
                               vars);
    } catch (const ExprError& e) {
      throw ConfigError("problem.A0", e.what());
    }
  }();

  ProblemSpec spec;
  spec.kind = ModelKind::custom;
  spec.A = [flux](const KernelArgs& a) -> std::array<double, 2> {
    const double vals[8] = {a.x, a.y, a.t, a.s, a.xi[0], a.xi[1], a.theta, a.p};
    std::array<double, 2> out{0.0, 0.0};
    for (std::size_t c = 0; c < flux.size(); ++c) out[c] = flux[c].eval(vals);
    return out;
  };
  spec.A0 = [lower](const KernelArgs& a) {
    const double vals[8] = {a.x, a.y, a.t, a.s, a.xi[0], a.xi[1], a.theta, a.p};
    return lower.eval(vals);
  };
  spec.f = std::move(f);
  spec.g = g_fn;
  spec.gamma_fn = std::move(gamma);
  spec.k_fn = std::move(k);
  spec.alpha_c = cfg.alpha_c;
  spec.beta_c = cfg.beta_c;
  return spec;
}

}  // namespace varex
