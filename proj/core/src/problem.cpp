#include "proxctl/problem.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace proxctl {

ProblemInstance ProblemInstance::make(Matrix a, Vector y, std::optional<Vector> x_true,
                                      std::optional<std::uint64_t> seed) {
  if (a.rows() == 0 || a.cols() == 0) throw DimensionError("ProblemInstance: empty matrix");
  require_dim(y.size(), a.rows(), "ProblemInstance: y");
  if (x_true) require_dim(x_true->size(), a.cols(), "ProblemInstance: x_true");
  if (!all_finite(a) || !all_finite(y) || (x_true && !all_finite(*x_true))) {
    throw std::invalid_argument("ProblemInstance: non-finite entries");
  }

  ProblemInstance p;
  p.a_ = std::move(a);
  p.y_ = std::move(y);
  p.x_true_ = std::move(x_true);
  p.seed_ = seed;
  p.spec_norm_ = spectral_norm(p.a_);
  const ConvexityConstants cc = convexity_constants(p.a_);
  p.beta_ = p.spec_norm_ * p.spec_norm_;
  p.mu_ = std::min(cc.mu, p.beta_);
  return p;
}

Vector ProblemInstance::residual(const Vector& x) const {
  require_dim(x.size(), a_.cols(), "residual");
  return a_ * x - y_;
}

double ProblemInstance::value(const Vector& x) const { return 0.5 * residual(x).squaredNorm(); }

Vector ProblemInstance::gradient(const Vector& x) const {
  require_dim(x.size(), a_.cols(), "gradient");
  return a_.transpose() * (a_ * x - y_);
}

double objective(const ProblemInstance& p, const Vector& x) { return p.value(x); }
Vector gradient(const ProblemInstance& p, const Vector& x) { return p.gradient(x); }

double composite_objective(const SmoothObjective& f, const Vector& x, const Vector& lambda) {
  require_dim(lambda.size(), x.size(), "composite_objective: lambda");
  if ((lambda.array() < 0.0).any()) {
    throw std::invalid_argument("composite_objective: weights must be nonnegative");
  }
  return f.value(x) + lambda.cwiseProduct(x.cwiseAbs()).sum();
}

ConvexityConstants convexity_constants(const Matrix& a) {
  ConvexityConstants out;
  const double s = spectral_norm(a);
  out.beta = s * s;
  if (a.rows() < a.cols()) return out;

  const Eigen::MatrixXd gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  out.mu = lo <= 1e-12 * out.beta ? 0.0 : std::min(lo, out.beta);
  return out;
}

std::vector<std::string> check_invariants(const ProblemInstance& p) {
  std::vector<std::string> bad;
  if (p.y().size() != p.rows()) bad.emplace_back("y dimension differs from A.rows");
  if (p.x_true() && p.x_true()->size() != p.cols()) bad.emplace_back("x_true dimension differs from A.cols");
  if (std::abs(p.beta() - p.spec_norm() * p.spec_norm()) > 1e-9 * p.beta()) {
    bad.emplace_back("beta differs from spectral_norm^2");
  }
  if (p.mu() > p.beta()) bad.emplace_back("mu exceeds beta");
  if (p.x_true()) {
    const double fit = p.residual(*p.x_true()).norm();
    if (fit > 1e-12 * p.y().norm()) bad.emplace_back("x_true does not reproduce y (noisy instance)");
  }
  return bad;
}

}  // namespace proxctl
