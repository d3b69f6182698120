#include "proxctl/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "proxctl/prox.hpp"

namespace proxctl {

namespace {

constexpr std::array<std::string_view, 6> kNames = {"GRAD",    "ISTA",     "FISTA",
                                                     "AD-ISTA", "AD-FISTA", "I-ISTA"};

std::string canonical(std::string_view s) {
  std::string out;
  for (char ch : s) {
    out.push_back(ch == '_' ? '-' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  }
  return out;
}

}  // namespace

std::string_view to_string(Algorithm a) { return kNames[static_cast<std::size_t>(a)]; }

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  const std::string key = canonical(name);
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (key == kNames[i]) return static_cast<Algorithm>(i);
  }
  return std::nullopt;
}

std::string algorithm_names() {
  std::string out;
  for (std::string_view n : kNames) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

std::string_view to_string(LambdaMode m) {
  return m == LambdaMode::AbsGradient ? "ABS_GRADIENT" : "CLAMP_NONNEGATIVE";
}

std::optional<LambdaMode> parse_lambda_mode(std::string_view name) {
  std::string key = canonical(name);
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "ABS_GRADIENT") return LambdaMode::AbsGradient;
  if (key == "CLAMP_NONNEGATIVE") return LambdaMode::ClampNonnegative;
  return std::nullopt;
}

std::vector<std::string> validate(const SolverConfig& c, Index n) {
  if (!(c.tau > 0.0) || !std::isfinite(c.tau)) throw std::invalid_argument("tau must be positive");
  if (!(c.stop_tol > 0.0)) throw std::invalid_argument("stop_tol must be positive");
  if (c.support_threshold < 0.0) throw std::invalid_argument("support_threshold must be nonnegative");
  require_dim(c.lambda0.size(), n, "SolverConfig.lambda0");
  if (!all_finite(c.lambda0) || (c.lambda0.array() < 0.0).any()) {
    throw std::invalid_argument("lambda0 entries must be finite and nonnegative");
  }
  std::vector<std::string> warnings;
  if (c.algorithm == Algorithm::AdIsta || c.algorithm == Algorithm::AdFista) {
    if (!(c.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  }
  if (c.algorithm == Algorithm::IIsta) {
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (!(c.alpha > std::abs(c.ki))) {
      warnings.emplace_back("alpha <= |ki|: the equilibrium is not guaranteed to be unbiased");
    }
  }
  return warnings;
}

DivergenceError::DivergenceError(Algorithm algo, std::size_t iteration)
    : std::runtime_error(std::string(to_string(algo)) + " diverged at iteration " +
                         std::to_string(iteration)),
      algo_(algo),
      iteration_(iteration) {}

IterateState initial_state(const SolverConfig& c, const Vector& x0, const Vector& lambda_init) {
  require_dim(lambda_init.size(), x0.size(), "initial_state: lambda");
  IterateState s;
  s.k = 0;
  s.x = x0;
  s.momentum_x = x0;
  s.momentum_t = 1.0;
  s.last_step_norm = 0.0;
  switch (c.algorithm) {
    case Algorithm::AdIsta:
    case Algorithm::AdFista:
      s.lambda = log_penalty_weights(c.lambda0, x0, c.epsilon);
      break;
    default:
      s.lambda = lambda_init;
  }
  return s;
}

Vector log_penalty_weights(const Vector& lambda0, const Vector& x, double epsilon) {
  require_dim(lambda0.size(), x.size(), "log_penalty_weights");
  return (lambda0.array() * (epsilon / (epsilon + x.array().abs()))).matrix();
}

namespace {

IterateState advance(const IterateState& s, Vector x_next) {
  IterateState out;
  out.k = s.k + 1;
  out.last_step_norm = (x_next - s.x).norm();
  out.x = std::move(x_next);
  return out;
}

// x(k+1) = S_{τλ}(point − τ∇f(point)), shared by every proximal variant.
Vector forward_backward(const SmoothObjective& f, const Vector& point, const Vector& lambda,
                        double tau, Vector* grad_out = nullptr) {
  Vector g = f.gradient(point);
  Vector z = point - tau * g;
  Vector x;
  soft_threshold_into(z, tau * lambda, x);
  if (grad_out) *grad_out = std::move(g);
  return x;
}

IterateState accelerate(const IterateState& s, Vector x_next, Vector lambda_used) {
  const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s.momentum_t * s.momentum_t));
  IterateState out = advance(s, std::move(x_next));
  out.momentum_x = out.x + ((s.momentum_t - 1.0) / t_next) * (out.x - s.x);
  out.momentum_t = t_next;
  out.lambda = std::move(lambda_used);
  return out;
}

}  // namespace

IterateState step_grad(const SmoothObjective& f, const IterateState& s, const SolverConfig& c) {
  require_dim(s.x.size(), f.dim(), "step_grad");
  Vector g = f.gradient(s.x);
  IterateState out = advance(s, s.x - c.tau * g);
  out.lambda = s.lambda;
  out.momentum_x = out.x;
  return out;
}

IterateState step_ista(const SmoothObjective& f, const IterateState& s, const SolverConfig& c) {
  require_dim(s.x.size(), f.dim(), "step_ista");
  IterateState out = advance(s, forward_backward(f, s.x, s.lambda, c.tau));
  out.lambda = s.lambda;
  out.momentum_x = out.x;
  return out;
}

IterateState step_fista(const SmoothObjective& f, const IterateState& s, const SolverConfig& c) {
  require_dim(s.momentum_x.size(), f.dim(), "step_fista");
  return accelerate(s, forward_backward(f, s.momentum_x, s.lambda, c.tau), s.lambda);
}

IterateState step_ad_ista(const SmoothObjective& f, const IterateState& s, const SolverConfig& c) {
  require_dim(s.x.size(), f.dim(), "step_ad_ista");
  Vector lambda = log_penalty_weights(c.lambda0, s.x, c.epsilon);
  IterateState out = advance(s, forward_backward(f, s.x, lambda, c.tau));
  out.lambda = log_penalty_weights(c.lambda0, out.x, c.epsilon);
  out.momentum_x = out.x;
  return out;
}

IterateState step_ad_fista(const SmoothObjective& f, const IterateState& s, const SolverConfig& c) {
  require_dim(s.momentum_x.size(), f.dim(), "step_ad_fista");
  Vector lambda = log_penalty_weights(c.lambda0, s.momentum_x, c.epsilon);
  Vector x_next = forward_backward(f, s.momentum_x, lambda, c.tau);
  return accelerate(s, std::move(x_next), std::move(lambda));
}

IterateState step_i_ista(const SmoothObjective& f, const IterateState& s, const SolverConfig& c) {
  require_dim(s.x.size(), f.dim(), "step_i_ista");
  Vector g;
  IterateState out = advance(s, forward_backward(f, s.x, s.lambda, c.tau, &g));
  if (c.lambda_mode == LambdaMode::AbsGradient) {
    out.lambda = ((1.0 - c.alpha) * s.lambda + c.ki * g.cwiseAbs()).cwiseMax(0.0);
  } else {
    out.lambda = ((1.0 - c.alpha) * s.lambda + c.ki * g).cwiseMax(0.0);
  }
  out.momentum_x = out.x;
  return out;
}

IterateState step(const SmoothObjective& f, const IterateState& s, const SolverConfig& c) {
  switch (c.algorithm) {
    case Algorithm::Grad: return step_grad(f, s, c);
    case Algorithm::Ista: return step_ista(f, s, c);
    case Algorithm::Fista: return step_fista(f, s, c);
    case Algorithm::AdIsta: return step_ad_ista(f, s, c);
    case Algorithm::AdFista: return step_ad_fista(f, s, c);
    case Algorithm::IIsta: return step_i_ista(f, s, c);
  }
  throw std::invalid_argument("unknown algorithm");
}

namespace {

template <class OnState>
RunResult drive(const SmoothObjective& f, const SolverConfig& c, const Vector& x0,
                const Vector& lambda_init, const Observer& observer, OnState&& on_state) {
  require_dim(x0.size(), f.dim(), "run: x0");
  validate(c, f.dim());
  IterateState state = initial_state(c, x0, lambda_init);
  on_state(state);

  RunResult result;
  while (state.k < c.max_iters) {
    state = step(f, state, c);
    if (!state.x.allFinite() || state.x.norm() > c.divergence_bound) {
      throw DivergenceError(c.algorithm, state.k);
    }
    on_state(state);
    if (observer) observer(state);
    if (state.last_step_norm < c.stop_tol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = state.k;
  result.final_x = std::move(state.x);
  result.final_lambda = std::move(state.lambda);
  return result;
}

}  // namespace

RunResult run(const ProblemInstance& p, const SolverConfig& c, const Vector& x0,
              const Vector& lambda_init, const Observer& observer) {
  IterationTrace trace;
  RunResult r = drive(p, c, x0, lambda_init, observer, [&](const IterateState& s) {
    if (c.record_trace) {
      trace.push_back(measure(p, s.k, s.x, s.lambda, s.last_step_norm, c.support_threshold));
    }
  });
  r.trace = std::move(trace);
  return r;
}

RunResult run(const ProblemInstance& p, const SolverConfig& c, const Vector& x0,
              const Observer& observer) {
  return run(p, c, x0, c.lambda0, observer);
}

RunResult iterate(const SmoothObjective& f, const SolverConfig& c, const Vector& x0,
                  const Vector& lambda_init, const Observer& observer) {
  return drive(f, c, x0, lambda_init, observer, [](const IterateState&) {});
}

}  // namespace proxctl
