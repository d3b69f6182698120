#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "proxctl/linalg.hpp"
#include "proxctl/metrics.hpp"
#include "proxctl/problem.hpp"

namespace proxctl {

enum class Algorithm { Grad, Ista, Fista, AdIsta, AdFista, IIsta };

inline constexpr std::array<Algorithm, 6> kAllAlgorithms = {
    Algorithm::Grad,   Algorithm::Ista,    Algorithm::Fista,
    Algorithm::AdIsta, Algorithm::AdFista, Algorithm::IIsta};

/// "GRAD", "ISTA", "FISTA", "AD-ISTA", "AD-FISTA", "I-ISTA".
std::string_view to_string(Algorithm a);
/// Accepts the canonical names case-insensitively, with '-' or '_'.
std::optional<Algorithm> parse_algorithm(std::string_view name);
std::string algorithm_names();

/// How I-ISTA keeps λ(k+1) nonnegative.
enum class LambdaMode {
  AbsGradient,       // integrate |∇f| elementwise
  ClampNonnegative,  // integrate ∇f, then max(·, 0)
};

std::string_view to_string(LambdaMode m);
std::optional<LambdaMode> parse_lambda_mode(std::string_view name);

struct SolverConfig {
  Algorithm algorithm = Algorithm::Ista;
  double tau = 1.0;
  // Fixed weights for ISTA/FISTA, base weights λ₀ for AD-*, λ(0) for I-ISTA.
  Vector lambda0;
  double ki = 1e-3;
  double alpha = 0.05;
  double epsilon = 1e-2;
  double stop_tol = 1e-10;
  std::size_t max_iters = 50'000;
  LambdaMode lambda_mode = LambdaMode::AbsGradient;
  double support_threshold = 0.0;
  double divergence_bound = 1e12;
  bool record_trace = true;
};

/// Throws std::invalid_argument for unusable settings; returns warnings for
/// settings that void a guarantee (e.g. α ≤ |k_i| for I-ISTA).
std::vector<std::string> validate(const SolverConfig& c, Index n);

struct IterateState {
  std::size_t k = 0;
  Vector x;
  Vector lambda;
  Vector momentum_x;  // FISTA extrapolation point v(k)
  double momentum_t = 1.0;
  double last_step_norm = 0.0;
};

struct RunResult {
  Vector final_x;
  Vector final_lambda;
  std::size_t iterations = 0;
  bool converged = false;
  IterationTrace trace;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(Algorithm algo, std::size_t iteration);
  Algorithm algorithm() const noexcept { return algo_; }
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  Algorithm algo_;
  std::size_t iteration_;
};

using Observer = std::function<void(const IterateState&)>;

IterateState initial_state(const SolverConfig& c, const Vector& x0, const Vector& lambda_init);

IterateState step_grad(const SmoothObjective& f, const IterateState& s, const SolverConfig& c);
IterateState step_ista(const SmoothObjective& f, const IterateState& s, const SolverConfig& c);
IterateState step_fista(const SmoothObjective& f, const IterateState& s, const SolverConfig& c);
IterateState step_ad_ista(const SmoothObjective& f, const IterateState& s, const SolverConfig& c);
IterateState step_ad_fista(const SmoothObjective& f, const IterateState& s, const SolverConfig& c);
IterateState step_i_ista(const SmoothObjective& f, const IterateState& s, const SolverConfig& c);

/// Dispatches on c.algorithm.
IterateState step(const SmoothObjective& f, const IterateState& s, const SolverConfig& c);

/// λᵢ = λ₀ᵢ·ε/(ε + |xᵢ|), the reweighting of the log penalty λ₀·log(1 + |x|/ε).
Vector log_penalty_weights(const Vector& lambda0, const Vector& x, double epsilon);

/// Iterates until ‖x(k+1) − x(k)‖₂ < stop_tol or k == max_iters. The observer
/// sees every post-step state. Throws DivergenceError on non-finite iterates or
/// ‖x‖₂ above the divergence bound.
RunResult run(const ProblemInstance& p, const SolverConfig& c, const Vector& x0,
              const Vector& lambda_init, const Observer& observer = {});

/// Same, with λ(0) = c.lambda0.
RunResult run(const ProblemInstance& p, const SolverConfig& c, const Vector& x0,
              const Observer& observer = {});

/// Trace-free iteration over a generic objective.
RunResult iterate(const SmoothObjective& f, const SolverConfig& c, const Vector& x0,
                  const Vector& lambda_init, const Observer& observer = {});

}  // namespace proxctl
