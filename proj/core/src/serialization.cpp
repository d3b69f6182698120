#include "proxctl/serialization.hpp"

#include <fstream>
#include <set>

namespace proxctl {

namespace {

Json vector_to_json(const Vector& v) { return Json(std::vector<double>(v.begin(), v.end())); }

Vector vector_from_json(const Json& j, const char* field) {
  if (!j.is_array()) throw ValidationError(field, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError(field, "non-numeric entry at " + std::to_string(i));
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

template <class T>
T get_field(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(where + key, e.what());
  }
}

template <class T>
void read_optional(const Json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (j.contains(key) && !j.at(key).is_null()) out = get_field<T>(j, key, where);
}

template <class T>
void put_optional(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

}  // namespace

Json instance_to_json(const ProblemInstance& p) {
  Json j;
  j["m"] = p.rows();
  j["n"] = p.cols();
  std::vector<double> flat(p.a().data(), p.a().data() + p.a().size());
  j["A"] = std::move(flat);
  j["y"] = vector_to_json(p.y());
  if (p.x_true()) j["x_true"] = vector_to_json(*p.x_true());
  if (p.seed()) j["seed"] = *p.seed();
  return j;
}

ProblemInstance instance_from_json(const Json& j) {
  const auto m = get_field<Index>(j, "m", "");
  const auto n = get_field<Index>(j, "n", "");
  if (m <= 0) throw ValidationError("m", "must be positive");
  if (n <= 0) throw ValidationError("n", "must be positive");
  Vector flat = vector_from_json(j.at("A"), "A");
  if (flat.size() != m * n) throw ValidationError("A", "expected m*n entries");
  Matrix a = Eigen::Map<const Matrix>(flat.data(), m, n);
  Vector y = vector_from_json(j.at("y"), "y");
  if (y.size() != m) throw ValidationError("y", "expected m entries");
  std::optional<Vector> x_true;
  if (j.contains("x_true") && !j["x_true"].is_null()) {
    x_true = vector_from_json(j["x_true"], "x_true");
    if (x_true->size() != n) throw ValidationError("x_true", "expected n entries");
  }
  std::optional<std::uint64_t> seed;
  read_optional(j, "seed", seed, "");
  return ProblemInstance::make(std::move(a), std::move(y), std::move(x_true), seed);
}

Json recipe_to_json(const SolverRecipe& r) {
  Json j;
  j["algorithm"] = std::string(to_string(r.algorithm));
  put_optional(j, "tau", r.tau);
  put_optional(j, "lambda", r.lambda);
  put_optional(j, "lambda_init_fraction", r.lambda_init_fraction);
  put_optional(j, "ki", r.ki);
  put_optional(j, "alpha", r.alpha);
  put_optional(j, "epsilon", r.epsilon);
  put_optional(j, "stop_tol", r.stop_tol);
  put_optional(j, "max_iters", r.max_iters);
  if (r.lambda_mode) j["lambda_mode"] = std::string(to_string(*r.lambda_mode));
  put_optional(j, "support_threshold", r.support_threshold);
  return j;
}

SolverRecipe recipe_from_json(const Json& j, const std::string& where) {
  static const std::set<std::string> known = {
      "algorithm", "tau",       "lambda",      "lambda_init_fraction", "ki",
      "alpha",     "epsilon",   "stop_tol",    "max_iters",            "lambda_mode",
      "support_threshold"};
  if (j.is_string()) return recipe_from_json(Json{{"algorithm", j}}, where);
  if (!j.is_object()) throw ValidationError(where, "expected an object or algorithm name");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ValidationError(where + key, "unknown field");
  }
  SolverRecipe r;
  const auto name = get_field<std::string>(j, "algorithm", where);
  const auto algo = parse_algorithm(name);
  if (!algo) {
    throw ValidationError(where + "algorithm",
                          "unknown algorithm '" + name + "' (valid: " + algorithm_names() + ")");
  }
  r.algorithm = *algo;
  read_optional(j, "tau", r.tau, where);
  read_optional(j, "lambda", r.lambda, where);
  read_optional(j, "lambda_init_fraction", r.lambda_init_fraction, where);
  read_optional(j, "ki", r.ki, where);
  read_optional(j, "alpha", r.alpha, where);
  read_optional(j, "epsilon", r.epsilon, where);
  read_optional(j, "stop_tol", r.stop_tol, where);
  read_optional(j, "max_iters", r.max_iters, where);
  read_optional(j, "support_threshold", r.support_threshold, where);
  if (j.contains("lambda_mode")) {
    const auto mode = parse_lambda_mode(get_field<std::string>(j, "lambda_mode", where));
    if (!mode) {
      throw ValidationError(where + "lambda_mode", "expected ABS_GRADIENT or CLAMP_NONNEGATIVE");
    }
    r.lambda_mode = mode;
  }
  if (r.lambda && *r.lambda < 0.0) throw ValidationError(where + "lambda", "must be nonnegative");
  return r;
}

Json spec_to_json(const ExperimentSpec& spec) {
  Json j;
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["sparsity"] = spec.sparsity;
  j["magnitude_range"] = {spec.magnitude_low, spec.magnitude_high};
  j["num_runs"] = spec.num_runs;
  j["base_seed"] = spec.base_seed;
  j["signs"] = spec.signs == SignPolicy::Random ? "random" : "all_positive";
  Json solvers = Json::array();
  for (const SolverRecipe& r : effective_solvers(spec)) solvers.push_back(recipe_to_json(r));
  j["solver_configs"] = std::move(solvers);
  j["write_instances"] = spec.write_instances;
  j["write_traces"] = spec.write_traces;
  return j;
}

ExperimentSpec spec_from_json(const Json& j) {
  static const std::set<std::string> known = {"n",         "m",         "sparsity",
                                              "magnitude_range", "num_runs", "base_seed",
                                              "signs",     "solver_configs", "write_instances",
                                              "write_traces"};
  if (!j.is_object()) throw ValidationError("spec", "expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ValidationError(key, "unknown field");
  }
  ExperimentSpec s;
  auto count = [&](const char* key, std::size_t& out) {
    if (!j.contains(key)) return;
    const Json& v = j[key];
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ValidationError(key, "expected a nonnegative integer");
    }
    out = v.get<std::size_t>();
  };
  count("n", s.n);
  count("m", s.m);
  count("sparsity", s.sparsity);
  count("num_runs", s.num_runs);
  if (j.contains("base_seed")) s.base_seed = get_field<std::uint64_t>(j, "base_seed", "");
  if (j.contains("magnitude_range")) {
    const Json& r = j["magnitude_range"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      throw ValidationError("magnitude_range", "expected [low, high]");
    }
    s.magnitude_low = r[0].get<double>();
    s.magnitude_high = r[1].get<double>();
  }
  if (j.contains("signs")) {
    const auto v = get_field<std::string>(j, "signs", "");
    if (v == "random") {
      s.signs = SignPolicy::Random;
    } else if (v == "all_positive") {
      s.signs = SignPolicy::AllPositive;
    } else {
      throw ValidationError("signs", "expected \"random\" or \"all_positive\"");
    }
  }
  if (j.contains("solver_configs")) {
    const Json& arr = j["solver_configs"];
    if (!arr.is_array()) throw ValidationError("solver_configs", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      s.solvers.push_back(recipe_from_json(arr[i], "solver_configs[" + std::to_string(i) + "]."));
    }
  }
  if (j.contains("write_instances")) s.write_instances = get_field<bool>(j, "write_instances", "");
  if (j.contains("write_traces")) s.write_traces = get_field<bool>(j, "write_traces", "");
  validate(s);
  return s;
}

Json config_to_json(const SolverConfig& c) {
  Json j;
  j["algorithm"] = std::string(to_string(c.algorithm));
  j["tau"] = c.tau;
  j["lambda0"] = vector_to_json(c.lambda0);
  j["ki"] = c.ki;
  j["alpha"] = c.alpha;
  j["epsilon"] = c.epsilon;
  j["stop_tol"] = c.stop_tol;
  j["max_iters"] = c.max_iters;
  j["lambda_mode"] = std::string(to_string(c.lambda_mode));
  j["support_threshold"] = c.support_threshold;
  return j;
}

namespace {

Json row_to_json(const TraceRow& r) {
  Json j;
  j["k"] = r.k;
  j["residual"] = r.residual;
  j["rel_error"] = r.rel_error ? Json(*r.rel_error) : Json(nullptr);
  j["l1"] = r.l1;
  j["l0"] = r.l0;
  j["support_error"] = r.support_error ? Json(*r.support_error) : Json(nullptr);
  j["lambda_l1"] = r.lambda_l1;
  j["step_norm"] = r.step_norm;
  return j;
}

TraceRow row_from_json(const Json& j) {
  TraceRow r;
  r.k = j.at("k").get<std::size_t>();
  r.residual = j.at("residual").get<double>();
  if (!j.at("rel_error").is_null()) r.rel_error = j["rel_error"].get<double>();
  r.l1 = j.at("l1").get<double>();
  r.l0 = j.at("l0").get<std::size_t>();
  if (!j.at("support_error").is_null()) r.support_error = j["support_error"].get<std::size_t>();
  r.lambda_l1 = j.at("lambda_l1").get<double>();
  r.step_norm = j.at("step_norm").get<double>();
  return r;
}

template <class T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json summary_to_json(const RunSummary& s) {
  Json j;
  j["iterations"] = s.iterations;
  j["converged"] = s.converged;
  j["diverged"] = s.diverged;
  j["convergence_iter"] = opt(s.convergence_iter);
  j["support_stab_iter"] = opt(s.support_stab_iter);
  j["final"] = s.final_row ? row_to_json(*s.final_row) : Json(nullptr);
  return j;
}

RunSummary summary_from_json(const Json& j) {
  RunSummary s;
  s.iterations = j.at("iterations").get<std::size_t>();
  s.converged = j.at("converged").get<bool>();
  s.diverged = j.at("diverged").get<bool>();
  if (!j.at("convergence_iter").is_null()) s.convergence_iter = j["convergence_iter"].get<std::size_t>();
  if (!j.at("support_stab_iter").is_null()) s.support_stab_iter = j["support_stab_iter"].get<std::size_t>();
  if (!j.at("final").is_null()) s.final_row = row_from_json(j["final"]);
  return s;
}

Json stats_to_json(const AggregateStats& a) {
  Json j;
  j["runs"] = a.runs;
  j["conv_mean"] = opt(a.conv_mean);
  j["conv_mean_capped"] = opt(a.conv_mean_capped);
  j["supp_stab_mean"] = opt(a.supp_stab_mean);
  j["final_rel_error_mean"] = opt(a.final_rel_error_mean);
  j["defined_counts"] = {{"conv", a.conv_defined},
                         {"supp_stab", a.supp_stab_defined},
                         {"final_rel_error", a.final_rel_error_defined}};
  j["non_converged"] = a.non_converged;
  j["divergent"] = a.divergent;
  return j;
}

Json certificate_to_json(const ContractionCertificate& c) {
  return Json{{"sigma_sq", c.sigma_sq},
              {"xi_sq", c.xi_sq},
              {"contraction_factor", c.contraction_factor},
              {"sufficient_condition_holds", c.sufficient_condition_holds},
              {"lemma1_precondition", c.lemma1_precondition}};
}

Json report_to_json(const EquilibriumReport& r) {
  return Json{{"grad_inf_norm", r.grad_inf_norm},
              {"lambda_inf_norm", r.lambda_inf_norm},
              {"is_unbiased", r.is_unbiased},
              {"support_matches_truth", opt(r.support_matches_truth)}};
}

void apply_override(Json& target, std::string_view dotted_path, std::string_view value) {
  if (dotted_path.empty()) throw ValidationError("--set", "empty key");
  Json parsed = Json::parse(value.begin(), value.end(), nullptr, false);
  if (parsed.is_discarded()) parsed = std::string(value);

  Json* node = &target;
  std::string_view rest = dotted_path;
  for (;;) {
    const auto dot = rest.find('.');
    const std::string key(rest.substr(0, dot));
    const bool is_index = !key.empty() && key.find_first_not_of("0123456789") == std::string::npos;
    if (is_index && node->is_array()) {
      const auto idx = std::stoul(key);
      if (idx >= node->size()) {
        throw ValidationError(std::string(dotted_path), "index out of range");
      }
      node = &(*node)[idx];
    } else {
      if (!node->is_object() && !node->is_null()) {
        throw ValidationError(std::string(dotted_path), "cannot descend into a non-object");
      }
      node = &(*node)[key];
    }
    if (dot == std::string_view::npos) break;
    rest.remove_prefix(dot + 1);
  }
  *node = std::move(parsed);
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace proxctl
