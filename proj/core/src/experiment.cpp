#include "proxctl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "proxctl/rng.hpp"
#include "proxctl/serialization.hpp"

namespace proxctl {

namespace fs = std::filesystem;

void validate(const ExperimentSpec& spec) {
  if (spec.n == 0) throw ValidationError("n", "must be positive");
  if (spec.m == 0) throw ValidationError("m", "must be positive");
  if (spec.sparsity > spec.n) {
    throw ValidationError("sparsity", "must not exceed n (" + std::to_string(spec.n) + ")");
  }
  if (!(spec.magnitude_low < spec.magnitude_high)) {
    throw ValidationError("magnitude_range", "low must be below high");
  }
  if (spec.magnitude_low < 0.0) throw ValidationError("magnitude_range", "low must be nonnegative");
  if (spec.num_runs == 0) throw ValidationError("num_runs", "must be at least 1");
  std::set<Algorithm> seen;
  for (const SolverRecipe& r : spec.solvers) {
    if (!seen.insert(r.algorithm).second) {
      throw ValidationError("solver_configs",
                            "duplicate algorithm " + std::string(to_string(r.algorithm)));
    }
  }
}

std::vector<SolverRecipe> effective_solvers(const ExperimentSpec& spec) {
  if (!spec.solvers.empty()) return spec.solvers;
  std::vector<SolverRecipe> all;
  for (Algorithm a : kAllAlgorithms) {
    SolverRecipe r;
    r.algorithm = a;
    all.push_back(r);
  }
  return all;
}

ProblemInstance generate_instance(const ExperimentSpec& spec, std::size_t run_index) {
  validate(spec);
  const auto m = static_cast<Index>(spec.m);
  const auto n = static_cast<Index>(spec.n);
  Rng rng = Rng::for_run(spec.base_seed, run_index);

  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.m));
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = scale * rng.normal();
  }

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Vector x_true = Vector::Zero(n);
  for (std::size_t i = 0; i < spec.sparsity; ++i) {
    const auto j = i + rng.below(static_cast<std::uint64_t>(n) - i);
    std::swap(perm[i], perm[j]);
    double v = rng.uniform(spec.magnitude_low, spec.magnitude_high);
    if (spec.signs == SignPolicy::Random && rng.uniform_open() < 0.5) v = -v;
    x_true[perm[i]] = v;
  }
  Vector y = a * x_true;
  const std::uint64_t seed = splitmix64(spec.base_seed ^ splitmix64(run_index));
  return ProblemInstance::make(std::move(a), std::move(y), std::move(x_true), seed);
}

std::optional<double> default_alpha(std::size_t m) {
  if (m == 210) return 0.05;
  if (m == 150) return 0.02;
  return std::nullopt;
}

SolverConfig default_solver_config(const SolverRecipe& recipe, const ProblemInstance& p,
                                   const Vector& x0) {
  const Index n = p.cols();
  SolverConfig c;
  c.algorithm = recipe.algorithm;
  c.tau = recipe.tau.value_or(1.0 / (p.spec_norm() * p.spec_norm()));
  c.stop_tol = recipe.stop_tol.value_or(1e-10);
  c.max_iters = recipe.max_iters.value_or(50'000);
  c.ki = recipe.ki.value_or(1e-3);
  c.epsilon = recipe.epsilon.value_or(1e-2);
  c.lambda_mode = recipe.lambda_mode.value_or(LambdaMode::AbsGradient);
  c.alpha = recipe.alpha.value_or(0.05);

  double threshold = 0.0;
  switch (recipe.algorithm) {
    case Algorithm::Grad:
      c.lambda0 = Vector::Zero(n);
      threshold = 1e-6;
      break;
    case Algorithm::Ista:
    case Algorithm::Fista:
      c.lambda0 = Vector::Constant(n, recipe.lambda.value_or(1e-3));
      break;
    case Algorithm::AdIsta:
    case Algorithm::AdFista:
      c.lambda0 = Vector::Constant(n, recipe.lambda.value_or(3e-3));
      break;
    case Algorithm::IIsta: {
      if (recipe.alpha) {
        c.alpha = *recipe.alpha;
      } else if (auto a = default_alpha(static_cast<std::size_t>(p.rows()))) {
        c.alpha = *a;
      } else {
        throw ValidationError("alpha", "no default for m = " + std::to_string(p.rows()) +
                                           "; set alpha explicitly");
      }
      if (recipe.lambda) {
        c.lambda0 = Vector::Constant(n, *recipe.lambda);
      } else {
        const double frac = recipe.lambda_init_fraction.value_or(0.5);
        if (frac < 0.0) throw ValidationError("lambda_init_fraction", "must be nonnegative");
        c.lambda0 = Vector::Constant(n, frac * p.gradient(x0).lpNorm<Eigen::Infinity>());
      }
      threshold = 1e-6;
      break;
    }
  }
  c.support_threshold = recipe.support_threshold.value_or(threshold);
  return c;
}

std::string trace_dir_name(Algorithm a) { return std::string(to_string(a)); }

namespace {

std::string run_file(std::size_t i, const char* ext) {
  return "run_" + std::to_string(i) + ext;
}

struct RunOutput {
  std::vector<RunSummary> summaries;  // one per recipe
};

RunOutput execute_run(const ExperimentSpec& spec, const std::vector<SolverRecipe>& recipes,
                      std::size_t index, const std::optional<fs::path>& dir) {
  ProblemInstance p = generate_instance(spec, index);
  if (dir && spec.write_instances) {
    write_json(*dir / "instances" / run_file(index, ".json"), instance_to_json(p));
  }
  const Vector x0 = Vector::Zero(p.cols());
  RunOutput out;
  for (const SolverRecipe& recipe : recipes) {
    SolverConfig c = default_solver_config(recipe, p, x0);
    const fs::path algo_dir = trace_dir_name(recipe.algorithm);
    RunSummary s;
    try {
      RunResult r = run(p, c, x0);
      s = summarize(r.trace, c.stop_tol, static_cast<std::size_t>(p.cols()));
      if (dir && spec.write_traces) {
        write_trace(r.trace, *dir / "traces" / algo_dir / run_file(index, ".csv"));
      }
    } catch (const DivergenceError& e) {
      s = diverged_summary(e.iteration());
    }
    if (dir) {
      write_json(*dir / "summaries" / algo_dir / run_file(index, ".json"), summary_to_json(s));
    }
    out.summaries.push_back(std::move(s));
  }
  return out;
}

void write_manifest(const fs::path& dir, const std::vector<bool>& done) {
  Json completed = Json::array();
  for (std::size_t i = 0; i < done.size(); ++i) {
    if (done[i]) completed.push_back(i);
  }
  write_json(dir / "manifest.json", Json{{"completed", completed}, {"num_runs", done.size()}});
}

}  // namespace

CampaignResult run_campaign(const ExperimentSpec& spec, const CampaignOptions& options) {
  validate(spec);
  const std::vector<SolverRecipe> recipes = effective_solvers(spec);
  const std::size_t runs = spec.num_runs;
  const auto& dir = options.output_dir;

  std::vector<std::optional<RunOutput>> slots(runs);
  std::vector<bool> done(runs, false);
  CampaignResult result;

  if (dir) {
    if (fs::exists(*dir / "aggregate.json") && !options.force && !options.resume) {
      throw std::runtime_error((*dir / "aggregate.json").string() +
                               " exists; pass --force to overwrite");
    }
    fs::create_directories(*dir);
    for (const char* sub : {"traces", "summaries"}) {
      for (const SolverRecipe& r : recipes) fs::create_directories(*dir / sub / trace_dir_name(r.algorithm));
    }
    if (spec.write_instances) fs::create_directories(*dir / "instances");

    const Json spec_json = spec_to_json(spec);
    if (options.resume && fs::exists(*dir / "manifest.json")) {
      if (!fs::exists(*dir / "spec.json") || read_json(*dir / "spec.json") != spec_json) {
        throw std::runtime_error("cannot resume: spec.json differs from the requested spec");
      }
      const Json manifest = read_json(*dir / "manifest.json");
      for (const Json& v : manifest.at("completed")) {
        const auto i = v.get<std::size_t>();
        if (i >= runs) continue;
        RunOutput out;
        for (const SolverRecipe& r : recipes) {
          out.summaries.push_back(summary_from_json(read_json(
              *dir / "summaries" / trace_dir_name(r.algorithm) / run_file(i, ".json"))));
        }
        slots[i] = std::move(out);
        done[i] = true;
        result.resumed_runs.push_back(i);
      }
    }
    write_json(*dir / "spec.json", spec_json);
    write_manifest(*dir, done);
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < runs; ++i) {
    if (!done[i]) pending.push_back(i);
  }

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= pending.size()) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      const std::size_t i = pending[slot];
      try {
        RunOutput out = execute_run(spec, recipes, i, dir);
        std::lock_guard lock(mu);
        slots[i] = std::move(out);
        done[i] = true;
        if (dir) write_manifest(*dir, done);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads,
                                                           static_cast<unsigned>(pending.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t r = 0; r < recipes.size(); ++r) {
    AlgorithmOutcome o;
    o.algorithm = recipes[r].algorithm;
    o.iteration_cap = recipes[r].max_iters.value_or(50'000);
    for (std::size_t i = 0; i < runs; ++i) o.runs.push_back(slots[i]->summaries[r]);
    o.stats = aggregate(o.runs, o.iteration_cap);
    result.outcomes.push_back(std::move(o));
  }

  if (dir) {
    Json agg = Json::object();
    for (const AlgorithmOutcome& o : result.outcomes) {
      agg[std::string(to_string(o.algorithm))] = stats_to_json(o.stats);
    }
    write_json(*dir / "aggregate.json", agg);
  }
  return result;
}

}  // namespace proxctl
