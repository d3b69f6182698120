#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "proxctl/analysis.hpp"
#include "proxctl/experiment.hpp"
#include "proxctl/serialization.hpp"

namespace proxctl::cli {

namespace fs = std::filesystem;

namespace {

std::pair<std::string, std::string> split_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("--set", "expected key=value, got '" + kv + "'");
  }
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

Json base_spec_json(const std::optional<fs::path>& config) {
  if (config) return read_json(*config);
  return spec_to_json(ExperimentSpec{});
}

ExperimentSpec resolve_spec(const std::optional<fs::path>& config, std::optional<std::size_t> m,
                            std::optional<std::size_t> runs, std::optional<std::uint64_t> seed,
                            const Overrides& overrides) {
  Json j = base_spec_json(config);
  if (m) j["m"] = *m;
  if (runs) j["num_runs"] = *runs;
  if (seed) j["base_seed"] = *seed;
  for (const std::string& kv : overrides) {
    const auto [key, value] = split_override(kv);
    apply_override(j, key, value);
  }
  return spec_from_json(j);
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& log) {
  for (const std::string& w : warnings) log << "warning: " << w << '\n';
}

template <class Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    log << "error: invalid " << e.what() << '\n';
    return kUsage;
  } catch (const DivergenceError& e) {
    log << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace

fs::path default_output_dir(const std::string& subcommand) {
  if (const char* root = std::getenv("PROXCTL_OUTPUT_ROOT"); root && *root) {
    return fs::path(root) / subcommand;
  }
  return fs::path("proxctl-out") / subcommand;
}

int cmd_generate(const GenerateArgs& args, std::ostream& log) {
  return guarded(log, [&] {
    ExperimentSpec spec = resolve_spec(args.config, args.m, args.runs, args.seed, args.overrides);
    const fs::path dir = args.out / "instances";
    fs::create_directories(dir);
    const fs::path spec_path = args.out / "spec.json";
    if (fs::exists(spec_path) && !args.force) {
      throw std::runtime_error(spec_path.string() + " exists; pass --force to overwrite");
    }
    write_json(spec_path, spec_to_json(spec));
    for (std::size_t i = 0; i < spec.num_runs; ++i) {
      const ProblemInstance p = generate_instance(spec, i);
      for (const std::string& bad : check_invariants(p)) {
        throw std::runtime_error("run " + std::to_string(i) + ": " + bad);
      }
      write_json(dir / ("run_" + std::to_string(i) + ".json"), instance_to_json(p));
    }
    log << "wrote " << spec.num_runs << " instance(s) to " << dir.string() << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_solve(const SolveArgs& args, std::ostream& log) {
  return guarded(log, [&] {
    if (!parse_algorithm(args.algo)) {
      log << "error: unknown algorithm '" << args.algo << "'; valid names: " << algorithm_names()
          << '\n';
      return static_cast<int>(kUsage);
    }
    Json recipe_json{{"algorithm", args.algo}};
    for (const std::string& kv : args.overrides) {
      const auto [key, value] = split_override(kv);
      apply_override(recipe_json, key, value);
    }
    const SolverRecipe recipe = recipe_from_json(recipe_json, "");
    const ProblemInstance p = instance_from_json(read_json(args.instance));
    const Vector x0 = Vector::Zero(p.cols());
    const SolverConfig c = default_solver_config(recipe, p, x0);
    const auto warnings = validate(c, p.cols());
    print_warnings(warnings, log);

    const RunResult r = run(p, c, x0);
    const RunSummary s = summarize(r.trace, c.stop_tol, static_cast<std::size_t>(p.cols()));

    const std::string algo(to_string(c.algorithm));
    fs::create_directories(args.out / "traces" / algo);
    fs::create_directories(args.out / "summaries" / algo);
    write_trace(r.trace, args.out / "traces" / algo / "run_0.csv");
    write_json(args.out / "summaries" / algo / "run_0.json", summary_to_json(s));

    Json report{{"algorithm", algo},
                {"instance", args.instance.string()},
                {"config", config_to_json(c)},
                {"summary", summary_to_json(s)},
                {"equilibrium", report_to_json(equilibrium_report(p, r, 1e-6, c.support_threshold))},
                {"warnings", warnings}};
    write_json(args.out / ("solve_" + algo + ".json"), report);
    log << algo << ": " << r.iterations << " iterations, "
        << (r.converged ? "converged" : "hit the iteration cap");
    if (s.final_row && s.final_row->rel_error) log << ", rel_error " << *s.final_row->rel_error;
    log << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_bench(const BenchArgs& args, std::ostream& log) {
  return guarded(log, [&] {
    std::vector<std::optional<std::size_t>> ms;
    if (args.m.empty()) {
      ms.emplace_back(std::nullopt);
    } else {
      for (std::size_t m : args.m) ms.emplace_back(m);
    }
    for (const auto& m : ms) {
      const ExperimentSpec spec = resolve_spec(args.config, m, args.runs, args.seed, args.overrides);
      CampaignOptions opts;
      opts.output_dir = ms.size() > 1 ? args.out / ("m" + std::to_string(spec.m)) : args.out;
      opts.threads = args.threads;
      opts.force = args.force;
      opts.resume = args.resume;
      const CampaignResult res = run_campaign(spec, opts);
      log << "m=" << spec.m << ", " << spec.num_runs << " run(s)";
      if (!res.resumed_runs.empty()) log << " (" << res.resumed_runs.size() << " resumed)";
      log << " -> " << opts.output_dir->string() << '\n';
      for (const AlgorithmOutcome& o : res.outcomes) {
        log << "  " << to_string(o.algorithm) << ": conv "
            << (o.stats.conv_mean ? std::to_string(*o.stats.conv_mean) : "--") << ", supp. stab. "
            << (o.stats.supp_stab_mean ? std::to_string(*o.stats.supp_stab_mean) : "--");
        if (o.stats.non_converged) log << ", " << o.stats.non_converged << " at cap";
        if (o.stats.divergent) log << ", " << o.stats.divergent << " divergent";
        log << '\n';
      }
    }
    return static_cast<int>(kOk);
  });
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    double tol = 1e-6;
    double fp_tol = 1e-14;
    std::size_t fp_iters = 1'000'000;
    Json recipe_json{{"algorithm", "I-ISTA"}};
    for (const std::string& kv : args.overrides) {
      const auto [key, value] = split_override(kv);
      if (key == "tol") {
        tol = std::stod(value);
      } else if (key == "fixed_point_tol") {
        fp_tol = std::stod(value);
      } else if (key == "fixed_point_max_iters") {
        fp_iters = std::stoul(value);
      } else {
        apply_override(recipe_json, key, value);
      }
    }
    const SolverRecipe recipe = recipe_from_json(recipe_json, "");
    if (recipe.algorithm != Algorithm::IIsta) {
      throw ValidationError("algorithm", "verify only applies to I-ISTA");
    }

    std::optional<ProblemInstance> problem;
    SolverConfig c;
    if (args.instance == "engineered") {
      EngineeredCase ec = engineered_case();
      c = ec.config;
      if (recipe.tau) c.tau = *recipe.tau;
      if (recipe.ki) c.ki = *recipe.ki;
      if (recipe.alpha) c.alpha = *recipe.alpha;
      if (recipe.lambda) c.lambda0.setConstant(*recipe.lambda);
      if (recipe.lambda_mode) c.lambda_mode = *recipe.lambda_mode;
      if (recipe.stop_tol) c.stop_tol = *recipe.stop_tol;
      if (recipe.max_iters) c.max_iters = *recipe.max_iters;
      problem.emplace(std::move(ec.problem));
    } else {
      problem.emplace(instance_from_json(read_json(args.instance)));
      c = default_solver_config(recipe, *problem, Vector::Zero(problem->cols()));
    }
    const ProblemInstance& p = *problem;
    const Vector x0 = Vector::Zero(p.cols());
    c.record_trace = false;
    const auto warnings = validate(c, p.cols());
    print_warnings(warnings, log);

    const ContractionCertificate cert = certificate(p, c);
    const RunResult r = run(p, c, x0);
    const EquilibriumReport eq = equilibrium_report(p, r, tol, c.support_threshold);
    const FixedPoint fp = solve_fixed_point(p, c, x0, fp_tol, fp_iters);
    const ContractionMonitor mon = monitor_contraction(collect_states(p, c, x0), fp);

    const double bound = cert.contraction_factor + 1e-9;
    const bool violated = cert.sufficient_condition_holds && mon.max_ratio && *mon.max_ratio > bound;
    Json report{
        {"instance", args.instance},
        {"config", config_to_json(c)},
        {"certificate", certificate_to_json(cert)},
        {"equilibrium", report_to_json(eq)},
        {"run", {{"iterations", r.iterations}, {"converged", r.converged}}},
        {"contraction",
         {{"max_ratio", mon.max_ratio ? Json(*mon.max_ratio) : Json(nullptr)},
          {"steps", mon.ratios.size()},
          {"bound", bound},
          {"violated", violated}}},
        {"warnings", warnings}};
    out << report.dump(2) << '\n';
    if (args.out) {
      fs::create_directories(*args.out);
      write_json(*args.out / "verify.json", report);
    }
    if (violated) {
      log << "error: certificate holds but observed ratio " << *mon.max_ratio << " exceeds "
          << bound << '\n';
      return static_cast<int>(kCertificateViolated);
    }
    return static_cast<int>(kOk);
  });
}

}  // namespace proxctl::cli
