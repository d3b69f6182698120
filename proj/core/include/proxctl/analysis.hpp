#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "proxctl/linalg.hpp"
#include "proxctl/problem.hpp"
#include "proxctl/solvers.hpp"

namespace proxctl {

/// Joint (x, λ) contraction bound for I-ISTA.
///   σ² = max{(1 − τμ)², (1 − τβ)²}
///   ξ² = max{σ² + k_i²β², τ² + (1 − α)²}
/// The map is certified contractive with factor 2ξ² when ξ² < ½ and τ < 2/β.
struct ContractionCertificate {
  double sigma_sq = 0.0;
  double xi_sq = 0.0;
  double contraction_factor = 0.0;  // 2ξ²
  bool sufficient_condition_holds = false;
  bool lemma1_precondition = false;  // α > |k_i|
};

ContractionCertificate certificate(double mu, double beta, double tau, double ki, double alpha);
ContractionCertificate certificate(const ProblemInstance& p, const SolverConfig& c);

struct FixedPoint {
  Vector x;
  Vector lambda;
};

struct ContractionMonitor {
  // ρ(k) = D(k+1)/D(k), D(k) = ‖x(k) − x⋆‖² + ‖λ(k) − λ⋆‖²; stops at D = 0.
  std::vector<double> ratios;
  std::optional<double> max_ratio;
};

ContractionMonitor monitor_contraction(const std::vector<FixedPoint>& states,
                                       const FixedPoint& fixed_point);

/// Runs I-ISTA with stop_tol 1e-14 and a 10⁶ cap (overridable) to obtain
/// (x⋆, λ⋆). The caller's trace recording setting is ignored.
FixedPoint solve_fixed_point(const ProblemInstance& p, SolverConfig c, const Vector& x0,
                             double stop_tol = 1e-14, std::size_t max_iters = 1'000'000);

/// Every (x(k), λ(k)) of an I-ISTA run, starting with k = 0.
std::vector<FixedPoint> collect_states(const ProblemInstance& p, const SolverConfig& c,
                                       const Vector& x0);

struct EquilibriumReport {
  double grad_inf_norm = 0.0;
  double lambda_inf_norm = 0.0;
  bool is_unbiased = false;
  std::optional<bool> support_matches_truth;
};

EquilibriumReport equilibrium_report(const ProblemInstance& p, const RunResult& result, double tol,
                                     double support_threshold = 0.0);

struct EngineeredCase {
  ProblemInstance problem;
  SolverConfig config;
};

/// A = scale·I (n×n), τ = 1/β so σ = 0, α = 0.9, k_i = 0.01, and a sparse
/// ground truth with alternating-sign unit magnitudes on every `stride`-th
/// coordinate. ξ² = τ² + 0.01 < ½ for scale² > √(1/0.49).
EngineeredCase engineered_case(Index n = 20, double scale = 2.0, Index stride = 4);

}  // namespace proxctl
