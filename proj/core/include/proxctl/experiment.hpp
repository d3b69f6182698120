#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "proxctl/metrics.hpp"
#include "proxctl/problem.hpp"
#include "proxctl/solvers.hpp"

namespace proxctl {

/// Raised for invalid user-supplied settings; names the offending field.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class SignPolicy { Random, AllPositive };

/// Per-algorithm overrides on top of the campaign defaults. Unset fields take
/// the defaults from default_solver_config().
struct SolverRecipe {
  Algorithm algorithm = Algorithm::Ista;
  std::optional<double> tau;                   // default ‖A‖₂⁻²
  std::optional<double> lambda;                // uniform λ (λ₀ for AD-*, λ(0) for I-ISTA)
  std::optional<double> lambda_init_fraction;  // I-ISTA: λ(0) = fraction·‖∇f(x0)‖∞
  std::optional<double> ki;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  std::optional<double> stop_tol;
  std::optional<std::size_t> max_iters;
  std::optional<LambdaMode> lambda_mode;
  std::optional<double> support_threshold;
};

struct ExperimentSpec {
  std::size_t n = 200;
  std::size_t m = 210;
  std::size_t sparsity = 10;
  double magnitude_low = 1.0;
  double magnitude_high = 2.0;
  std::size_t num_runs = 100;
  std::uint64_t base_seed = 20240601;
  SignPolicy signs = SignPolicy::Random;
  std::vector<SolverRecipe> solvers;  // empty means all six algorithms
  bool write_instances = false;
  bool write_traces = true;
};

/// Throws ValidationError naming the first bad field.
void validate(const ExperimentSpec& spec);

std::vector<SolverRecipe> effective_solvers(const ExperimentSpec& spec);

/// A ~ N(0, 1/m) i.i.d. (row-major draw order), then `sparsity` support
/// positions by partial Fisher–Yates, then for each position a magnitude in
/// (low, high) followed by a ±1 sign draw (skipped under AllPositive);
/// y = A·x̃. Stream: Rng::for_run(base_seed, run_index).
ProblemInstance generate_instance(const ExperimentSpec& spec, std::size_t run_index);

/// Leakage α keyed to m: 0.05 for m = 210, 0.02 for m = 150.
std::optional<double> default_alpha(std::size_t m);

/// Hyperparameters used for one instance: τ = ‖A‖₂⁻², ISTA/FISTA λ = 10⁻³,
/// AD-* λ₀ = 3·10⁻³ with ε = 10⁻², I-ISTA k_i = 10⁻³, α by m, and
/// λ(0) = ½‖∇f(x0)‖∞. Support threshold 10⁻⁶ for GRAD and I-ISTA, 0 otherwise.
/// Throws ValidationError when I-ISTA needs an α that m does not determine.
SolverConfig default_solver_config(const SolverRecipe& recipe, const ProblemInstance& p,
                                   const Vector& x0);

struct CampaignOptions {
  std::optional<std::filesystem::path> output_dir;
  unsigned threads = 1;
  bool resume = false;
  bool force = false;
};

struct AlgorithmOutcome {
  Algorithm algorithm = Algorithm::Ista;
  std::size_t iteration_cap = 0;
  std::vector<RunSummary> runs;  // indexed by run index
  AggregateStats stats;
};

struct CampaignResult {
  std::vector<AlgorithmOutcome> outcomes;  // in recipe order
  std::vector<std::size_t> resumed_runs;   // indices loaded from a manifest
};

/// For each run index: generate the instance, run every configured solver from
/// x(0) = 0, summarize. With an output directory the layout is
///   spec.json, manifest.json, instances/run_<i>.json (optional),
///   traces/<algo>/run_<i>.csv, summaries/<algo>/run_<i>.json, aggregate.json
/// Results never depend on the thread count or completion order.
CampaignResult run_campaign(const ExperimentSpec& spec, const CampaignOptions& options = {});

std::string trace_dir_name(Algorithm a);

}  // namespace proxctl
