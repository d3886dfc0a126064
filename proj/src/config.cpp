#include "equicontrol/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace equicontrol {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Config, where + ": " + what);
}

void allow_keys(const json& node, const std::string& where, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : node.items())
    if (!allowed.count(item.key())) fail(where, "unknown key '" + item.key() + "'");
}

const json& object_at(const json& node, const std::string& where) {
  if (!node.is_object()) fail(where, "expected an object");
  return node;
}

double number(const json& node, const std::string& where) {
  if (!node.is_number()) fail(where, "expected a number");
  const double v = node.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

double number_or(const json& parent, const char* key, double fallback, const std::string& where) {
  return parent.contains(key) ? number(parent[key], where + "." + key) : fallback;
}

long long integer(const json& node, const std::string& where) {
  if (!node.is_number_integer() && !node.is_number_unsigned()) fail(where, "expected an integer");
  return node.get<long long>();
}

bool boolean_or(const json& parent, const char* key, bool fallback, const std::string& where) {
  if (!parent.contains(key)) return fallback;
  if (!parent[key].is_boolean()) fail(where + "." + key, "expected true or false");
  return parent[key].get<bool>();
}

std::vector<double> numbers(const json& node, const std::string& where) {
  if (!node.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(number(node[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Eigen::ArrayXd array(const json& node, const std::string& where) {
  const auto v = numbers(node, where);
  return Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> numbers_or(const json& parent, const char* key, std::vector<double> fallback,
                               const std::string& where) {
  return parent.contains(key) ? numbers(parent[key], where + "." + key) : fallback;
}

ScalarPath parse_path(const json& node, double horizon, const std::string& where) {
  if (node.is_number()) return ScalarPath::constant(number(node, where));
  object_at(node, where);
  if (!node.contains("type") || !node["type"].is_string()) fail(where, "missing string 'type'");
  const std::string type = node["type"];
  if (type == "constant") {
    allow_keys(node, where, {"type", "value"});
    return ScalarPath::constant(number_or(node, "value", 0.0, where));
  }
  if (type == "polynomial") {
    allow_keys(node, where, {"type", "coefficients"});
    if (!node.contains("coefficients")) fail(where, "polynomial needs 'coefficients'");
    return ScalarPath::polynomial(numbers(node["coefficients"], where + ".coefficients"));
  }
  if (type == "exponential") {
    allow_keys(node, where, {"type", "scale", "rate"});
    return ScalarPath::exponential(number_or(node, "scale", 1.0, where), number_or(node, "rate", 0.0, where));
  }
  if (type == "sampled") {
    allow_keys(node, where, {"type", "values"});
    if (!node.contains("values")) fail(where, "sampled path needs 'values'");
    const Eigen::ArrayXd values = array(node["values"], where + ".values");
    if (values.size() < 2) fail(where, "sampled path needs at least two values");
    return ScalarPath::sampled(horizon, values);
  }
  fail(where, "unknown path type '" + type + "'");
}

/// {"2": 2.0, "4": 1.0} -> kappas indexed by order
Eigen::VectorXd parse_weights(const json& node, int order, const std::string& where) {
  object_at(node, where);
  int top = order;
  std::vector<std::pair<int, double>> entries;
  for (const auto& item : node.items()) {
    int j = 0;
    try {
      std::size_t used = 0;
      j = std::stoi(item.key(), &used);
      if (used != item.key().size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(where, "weight keys must be integer orders, got '" + item.key() + "'");
    }
    if (j < 2 || j > 32) fail(where, "weight orders must lie in 2..32");
    entries.emplace_back(j, number(item.value(), where + "." + item.key()));
    top = std::max(top, j);
  }
  if (top < 2) fail(where, "no weights given");
  Eigen::VectorXd kappas = Eigen::VectorXd::Zero(top + 1);
  for (const auto& [j, w] : entries) kappas[j] = w;
  return kappas;
}

FourierDensity parse_density(const json& node, const std::string& where) {
  allow_keys(node, where, {"type", "kappa", "h_max", "density", "atom"});
  const double atom = number_or(node, "atom", 0.0, where);
  if (!node.contains("density")) fail(where, "fourier penalty needs 'density'");
  const json& density = node["density"];
  if (density.is_array()) {
    if (!node.contains("h_max")) fail(where, "sampled density needs 'h_max'");
    return FourierDensity(number(node["h_max"], where + ".h_max"), array(density, where + ".density"), atom);
  }
  // {"normal": {"weight": w, "sd": s, "samples": M}}: sigma(h) = w * N(0, s^2) density
  const std::string dw = where + ".density";
  object_at(density, dw);
  allow_keys(density, dw, {"weight", "sd", "samples"});
  const double weight = number_or(density, "weight", 1.0, dw);
  const double sd = number_or(density, "sd", 1.0, dw);
  if (!(sd > 0.0)) fail(dw, "sd must be positive");
  const long long m = density.contains("samples") ? integer(density["samples"], dw + ".samples") : 1201;
  if (m < 3 || m % 2 == 0) fail(dw, "samples must be odd and >= 3");
  const double h_max = number_or(node, "h_max", 12.0 * sd, where);
  Eigen::ArrayXd samples(m);
  for (long long i = 0; i < m; ++i) {
    const double h = -h_max + 2.0 * h_max * static_cast<double>(i) / static_cast<double>(m - 1);
    samples[i] = weight * std::exp(-0.5 * h * h / (sd * sd)) / (sd * std::sqrt(2.0 * std::numbers::pi));
  }
  return FourierDensity(h_max, samples, atom);
}

ObjectiveSpec parse_objective(const json& node, const std::string& where) {
  object_at(node, where);
  if (!node.contains("type") || !node["type"].is_string()) fail(where, "missing string 'type'");
  const std::string type = node["type"];
  const double kappa = number_or(node, "kappa", 1.0, where);
  if (type == "mean_variance") {
    allow_keys(node, where, {"type", "kappa", "kappa_2"});
    return mean_variance(kappa, number_or(node, "kappa_2", 2.0, where));
  }
  if (type == "moment_combo" || type == "standardized_moments") {
    allow_keys(node, where, {"type", "kappa", "coefficients", "order"});
    if (!node.contains("coefficients")) fail(where, type + " needs 'coefficients'");
    const int order = node.contains("order") ? static_cast<int>(integer(node["order"], where + ".order")) : 0;
    Eigen::VectorXd kappas = parse_weights(node["coefficients"], order, where + ".coefficients");
    if (type == "moment_combo") return ObjectiveSpec(kappa, objective::MomentCombo{std::move(kappas)});
    return ObjectiveSpec(kappa, objective::StandardizedMoments{std::move(kappas)});
  }
  if (type == "exp_penalty" || type == "cosh_penalty" || type == "cos_penalty") {
    allow_keys(node, where, {"type", "kappa", "c"});
    const double c = number_or(node, "c", 1.0, where);
    if (type == "exp_penalty") return ObjectiveSpec(kappa, objective::ExpPenalty{c});
    if (type == "cosh_penalty") return ObjectiveSpec(kappa, objective::CoshPenalty{c});
    return ObjectiveSpec(kappa, objective::CosPenalty{c});
  }
  if (type == "ambiguous_cos") {
    allow_keys(node, where, {"type", "kappa", "support", "weights"});
    if (!node.contains("support")) fail(where, "ambiguous_cos needs 'support'");
    const Eigen::ArrayXd support = array(node["support"], where + ".support");
    Eigen::ArrayXd weights = node.contains("weights")
                                 ? array(node["weights"], where + ".weights")
                                 : Eigen::ArrayXd::Constant(support.size(), 1.0 / std::max<Eigen::Index>(1, support.size()));
    return ObjectiveSpec(kappa, objective::AmbiguousCos{DiscreteLaw(support, weights)});
  }
  if (type == "fourier_even_penalty") return ObjectiveSpec(kappa, objective::FourierEvenPenalty{parse_density(node, where)});
  fail(where, "unknown objective type '" + type + "'");
}

void parse_tolerances(const json& node, ProblemConfig& cfg) {
  const std::string where = "tolerances";
  VerifyOptions& v = cfg.verify;
  if (node.is_number()) {
    const double tol = number(node, where);
    if (tol < 0.0) fail(where, "tolerances must be >= 0");
    v.residual_tolerance = v.self_consistency_tolerance = v.evf_tolerance = v.fbsde_tolerance = v.pde_tolerance = tol;
    v.spike_options.sign_tolerance = v.spike_options.match_tolerance = tol;
    return;
  }
  object_at(node, where);
  allow_keys(node, where,
             {"ode", "residual", "self_consistency", "evf", "spike_sign", "spike_match", "fbsde", "pde"});
  cfg.solver_options.ode_tolerance = number_or(node, "ode", cfg.solver_options.ode_tolerance, where);
  v.residual_tolerance = number_or(node, "residual", v.residual_tolerance, where);
  v.self_consistency_tolerance = number_or(node, "self_consistency", v.self_consistency_tolerance, where);
  v.evf_tolerance = number_or(node, "evf", v.evf_tolerance, where);
  v.spike_options.sign_tolerance = number_or(node, "spike_sign", v.spike_options.sign_tolerance, where);
  v.spike_options.match_tolerance = number_or(node, "spike_match", v.spike_options.match_tolerance, where);
  v.fbsde_tolerance = number_or(node, "fbsde", v.fbsde_tolerance, where);
  v.pde_tolerance = number_or(node, "pde", v.pde_tolerance, where);
  for (double t : {cfg.solver_options.ode_tolerance, v.residual_tolerance, v.self_consistency_tolerance,
                   v.evf_tolerance, v.spike_options.sign_tolerance, v.spike_options.match_tolerance,
                   v.fbsde_tolerance, v.pde_tolerance})
    if (t < 0.0) fail(where, "tolerances must be >= 0");
  if (!(cfg.solver_options.ode_tolerance > 0.0)) fail(where + ".ode", "must be positive");
}

void check_fractions(const std::vector<double>& values, const std::string& where, bool allow_one) {
  for (double f : values)
    if (f < 0.0 || f > 1.0 || (!allow_one && f == 1.0)) fail(where, "time fractions must lie in [0, 1)");
}

void parse_verify(const json& node, ProblemConfig& cfg) {
  const std::string where = "verify";
  object_at(node, where);
  allow_keys(node, where, {"evf", "spike", "fbsde", "pde", "monte_carlo"});
  VerifyOptions& v = cfg.verify;
  if (node.contains("evf")) {
    const json& n = object_at(node["evf"], where + ".evf");
    allow_keys(n, where + ".evf", {"enabled", "times", "states"});
    v.evf = boolean_or(n, "enabled", v.evf, where + ".evf");
    v.evf_times = numbers_or(n, "times", v.evf_times, where + ".evf");
    v.evf_states = numbers_or(n, "states", v.evf_states, where + ".evf");
    check_fractions(v.evf_times, where + ".evf.times", true);
  }
  if (node.contains("spike")) {
    const json& n = object_at(node["spike"], where + ".spike");
    allow_keys(n, where + ".spike", {"enabled", "times", "zetas", "epsilon_fractions"});
    v.spike = boolean_or(n, "enabled", v.spike, where + ".spike");
    v.spike_times = numbers_or(n, "times", v.spike_times, where + ".spike");
    v.spike_zetas = numbers_or(n, "zetas", v.spike_zetas, where + ".spike");
    v.spike_options.epsilon_fractions =
        numbers_or(n, "epsilon_fractions", v.spike_options.epsilon_fractions, where + ".spike");
    check_fractions(v.spike_times, where + ".spike.times", false);
    const auto& eps = v.spike_options.epsilon_fractions;
    for (std::size_t i = 0; i < eps.size(); ++i)
      if (!(eps[i] > 0.0 && eps[i] <= 1.0) || (i > 0 && !(eps[i] < eps[i - 1])))
        fail(where + ".spike.epsilon_fractions", "must be strictly decreasing values in (0, 1]");
  }
  if (node.contains("fbsde")) {
    const json& n = object_at(node["fbsde"], where + ".fbsde");
    allow_keys(n, where + ".fbsde", {"enabled"});
    v.fbsde = boolean_or(n, "enabled", v.fbsde, where + ".fbsde");
  }
  if (node.contains("pde")) {
    const json& n = object_at(node["pde"], where + ".pde");
    allow_keys(n, where + ".pde", {"enabled", "max_order", "times", "states"});
    v.pde = boolean_or(n, "enabled", v.pde, where + ".pde");
    if (n.contains("max_order")) v.pde_max_order = static_cast<int>(integer(n["max_order"], where + ".pde.max_order"));
    if (v.pde_max_order < 1 || v.pde_max_order > 12) fail(where + ".pde.max_order", "must lie in 1..12");
    v.pde_times = numbers_or(n, "times", v.pde_times, where + ".pde");
    v.pde_states = numbers_or(n, "states", v.pde_states, where + ".pde");
    check_fractions(v.pde_times, where + ".pde.times", false);
  }
  if (node.contains("monte_carlo")) {
    const std::string w = where + ".monte_carlo";
    const json& n = object_at(node["monte_carlo"], w);
    allow_keys(n, w, {"enabled", "seed", "paths", "steps", "max_order", "threads"});
    v.monte_carlo = boolean_or(n, "enabled", v.monte_carlo, w);
    if (n.contains("seed")) {
      if (!n["seed"].is_number_unsigned() && !(n["seed"].is_number_integer() && n["seed"].get<long long>() >= 0))
        fail(w + ".seed", "expected a non-negative integer");
      v.mc.seed = n["seed"].get<std::uint64_t>();
    }
    if (n.contains("paths")) v.mc.num_paths = integer(n["paths"], w + ".paths");
    if (n.contains("steps")) v.mc.num_steps = static_cast<int>(integer(n["steps"], w + ".steps"));
    if (n.contains("max_order")) v.mc.max_order = static_cast<int>(integer(n["max_order"], w + ".max_order"));
    if (n.contains("threads")) v.mc.threads = static_cast<int>(integer(n["threads"], w + ".threads"));
    if (v.mc.num_paths < 10'000) fail(w + ".paths", "must be at least 10000");
    if (v.mc.num_steps < 1) fail(w + ".steps", "must be positive");
    if (v.mc.max_order < 2 || v.mc.max_order > 12) fail(w + ".max_order", "must lie in 2..12");
    if (v.mc.threads < 0) fail(w + ".threads", "must be >= 0");
  }
}

ProblemConfig build(const json& root) {
  object_at(root, "config");
  allow_keys(root, "config",
             {"horizon", "grid", "x0", "d_min", "coefficients", "objective", "solver", "tolerances", "verify", "output"});
  ProblemConfig cfg;
  cfg.horizon = number_or(root, "horizon", 1.0, "config");
  if (!(cfg.horizon > 0.0)) fail("horizon", "must be positive");
  if (root.contains("grid")) {
    const long long g = integer(root["grid"], "grid");
    if (g < 2 || g > 10'000'000) fail("grid", "must lie in 2..10^7");
    cfg.grid = static_cast<int>(g);
  }
  cfg.x0 = number_or(root, "x0", 0.0, "config");
  cfg.d_min = number_or(root, "d_min", cfg.d_min, "config");
  if (!(cfg.d_min > 0.0)) fail("d_min", "must be positive");

  if (!root.contains("coefficients")) fail("config", "missing 'coefficients'");
  const json& coeffs = object_at(root["coefficients"], "coefficients");
  allow_keys(coeffs, "coefficients", {"A", "B", "C", "D", "F"});
  const auto path = [&](const char* key, double fallback) {
    return coeffs.contains(key) ? parse_path(coeffs[key], cfg.horizon, std::string("coefficients.") + key)
                                : ScalarPath::constant(fallback);
  };
  if (!coeffs.contains("B") || !coeffs.contains("D")) fail("coefficients", "B and D are required");
  cfg.paths = ModelPaths{path("A", 0.0), path("B", 0.0), path("C", 0.0), path("D", 1.0), path("F", 0.0)};

  if (!root.contains("objective")) fail("config", "missing 'objective'");
  cfg.objective = parse_objective(root["objective"], "objective");

  if (root.contains("solver")) {
    if (!root["solver"].is_string()) fail("solver", "expected a string");
    cfg.solver = parse_solver_kind(root["solver"].get<std::string>());
  }
  if (root.contains("tolerances")) parse_tolerances(root["tolerances"], cfg);
  if (root.contains("verify")) parse_verify(root["verify"], cfg);
  if (root.contains("output")) {
    if (!root["output"].is_string()) fail("output", "expected a string");
    cfg.output = root["output"];
  }
  cfg.verify.x0 = cfg.x0;
  cfg.canonical = root.dump(2);
  return cfg;
}

}  // namespace

ProblemConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("malformed config: ") + e.what());
  }
  if (root.is_object() && root.contains("config") && root.contains("config_hash")) root = root["config"];
  if (overrides.grid) root["grid"] = *overrides.grid;
  if (overrides.solver) root["solver"] = *overrides.solver;
  if (overrides.seed) root["verify"]["monte_carlo"]["seed"] = *overrides.seed;
  try {
    return build(root);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    throw Error(ErrorKind::Config, e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, e.what());
  }
}

ProblemConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

std::string with_parameter(const std::string& canonical, const std::string& parameter, double value) {
  json root = json::parse(canonical);
  if (parameter == "kappa") {
    root["objective"]["kappa"] = value;
  } else if (parameter == "c") {
    root["objective"]["c"] = value;
  } else if (parameter == "kappa_2" || parameter == "kappa_4") {
    json& objective = root["objective"];
    if (objective.value("type", "") == "mean_variance" && parameter == "kappa_2")
      objective["kappa_2"] = value;
    else
      objective["coefficients"][parameter.substr(6)] = value;
  } else if (parameter == "T") {
    root["horizon"] = value;
  } else {
    throw Error(ErrorKind::Config, "unknown sweep parameter '" + parameter + "' (expected kappa, c, kappa_2, kappa_4 or T)");
  }
  return root.dump(2);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace equicontrol
