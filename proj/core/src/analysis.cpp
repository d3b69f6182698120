#include "proxctl/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace proxctl {

ContractionCertificate certificate(double mu, double beta, double tau, double ki, double alpha) {
  ContractionCertificate c;
  const double a = 1.0 - tau * mu;
  const double b = 1.0 - tau * beta;
  c.sigma_sq = std::max(a * a, b * b);
  const double leak = 1.0 - alpha;
  c.xi_sq = std::max(c.sigma_sq + ki * ki * beta * beta, tau * tau + leak * leak);
  c.contraction_factor = 2.0 * c.xi_sq;
  c.sufficient_condition_holds = c.xi_sq < 0.5 && tau < 2.0 / beta;
  c.lemma1_precondition = alpha > std::abs(ki);
  return c;
}

ContractionCertificate certificate(const ProblemInstance& p, const SolverConfig& c) {
  if (c.algorithm != Algorithm::IIsta) {
    throw std::invalid_argument("certificate: only defined for I-ISTA");
  }
  return certificate(p.mu(), p.beta(), c.tau, c.ki, c.alpha);
}

ContractionMonitor monitor_contraction(const std::vector<FixedPoint>& states,
                                       const FixedPoint& fixed_point) {
  ContractionMonitor m;
  auto dist = [&](const FixedPoint& s) {
    return (s.x - fixed_point.x).squaredNorm() + (s.lambda - fixed_point.lambda).squaredNorm();
  };
  if (states.empty()) return m;
  double prev = dist(states.front());
  for (std::size_t k = 1; k < states.size() && prev > 0.0; ++k) {
    const double next = dist(states[k]);
    m.ratios.push_back(next / prev);
    prev = next;
  }
  if (!m.ratios.empty()) m.max_ratio = *std::max_element(m.ratios.begin(), m.ratios.end());
  return m;
}

FixedPoint solve_fixed_point(const ProblemInstance& p, SolverConfig c, const Vector& x0,
                             double stop_tol, std::size_t max_iters) {
  c.stop_tol = stop_tol;
  c.max_iters = max_iters;
  RunResult r = iterate(p, c, x0, c.lambda0);
  return {std::move(r.final_x), std::move(r.final_lambda)};
}

std::vector<FixedPoint> collect_states(const ProblemInstance& p, const SolverConfig& c,
                                       const Vector& x0) {
  std::vector<FixedPoint> states;
  states.push_back({x0, c.lambda0});
  iterate(p, c, x0, c.lambda0, [&](const IterateState& s) { states.push_back({s.x, s.lambda}); });
  return states;
}

EquilibriumReport equilibrium_report(const ProblemInstance& p, const RunResult& result, double tol,
                                     double support_threshold) {
  if (!(tol > 0.0)) throw std::invalid_argument("equilibrium_report: tol must be positive");
  EquilibriumReport r;
  r.grad_inf_norm = p.gradient(result.final_x).lpNorm<Eigen::Infinity>();
  r.lambda_inf_norm =
      result.final_lambda.size() ? result.final_lambda.lpNorm<Eigen::Infinity>() : 0.0;
  r.is_unbiased = r.grad_inf_norm <= tol && r.lambda_inf_norm <= tol;
  if (const auto& xt = p.x_true()) {
    r.support_matches_truth = support_error(result.final_x, *xt, support_threshold) == 0;
  }
  return r;
}

EngineeredCase engineered_case(Index n, double scale, Index stride) {
  if (n <= 0 || stride <= 0) throw std::invalid_argument("engineered_case: bad size");
  Matrix a = scale * identity(n);
  Vector x_true = Vector::Zero(n);
  double sign = 1.0;
  for (Index i = 0; i < n; i += stride) {
    x_true[i] = sign;
    sign = -sign;
  }
  Vector y = a * x_true;
  ProblemInstance p = ProblemInstance::make(std::move(a), std::move(y), std::move(x_true));

  SolverConfig c;
  c.algorithm = Algorithm::IIsta;
  c.tau = 1.0 / p.beta();
  c.alpha = 0.9;
  c.ki = 0.01;
  c.lambda0 = Vector::Constant(n, 0.1);
  c.support_threshold = 1e-6;
  return {std::move(p), std::move(c)};
}

}  // namespace proxctl
