#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proxctl/linalg.hpp"

namespace proxctl {

/// A differentiable objective f. Solvers only see this interface, so they
/// never assume f is quadratic.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;
  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
};

struct ConvexityConstants {
  double mu = 0.0;    // σ_min(A)², 0 when m < n or A is rank deficient
  double beta = 0.0;  // σ_max(A)²
};

/// Least-squares instance f(x) = ½‖Ax − y‖₂² with optional ground truth.
/// Immutable once built; construct through make().
class ProblemInstance final : public SmoothObjective {
 public:
  static ProblemInstance make(Matrix a, Vector y, std::optional<Vector> x_true = std::nullopt,
                              std::optional<std::uint64_t> seed = std::nullopt);

  const Matrix& a() const noexcept { return a_; }
  const Vector& y() const noexcept { return y_; }
  const std::optional<Vector>& x_true() const noexcept { return x_true_; }
  const std::optional<std::uint64_t>& seed() const noexcept { return seed_; }
  Index rows() const noexcept { return a_.rows(); }
  Index cols() const noexcept { return a_.cols(); }
  double spec_norm() const noexcept { return spec_norm_; }
  double mu() const noexcept { return mu_; }
  double beta() const noexcept { return beta_; }

  Index dim() const override { return a_.cols(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;

  /// Ax − y.
  Vector residual(const Vector& x) const;

 private:
  ProblemInstance() = default;

  Matrix a_;
  Vector y_;
  std::optional<Vector> x_true_;
  std::optional<std::uint64_t> seed_;
  double spec_norm_ = 0.0;
  double mu_ = 0.0;
  double beta_ = 0.0;
};

double objective(const ProblemInstance& p, const Vector& x);
Vector gradient(const ProblemInstance& p, const Vector& x);

/// f(x) + Σᵢ λᵢ|xᵢ|. Throws std::invalid_argument on a negative weight.
double composite_objective(const SmoothObjective& f, const Vector& x, const Vector& lambda);

ConvexityConstants convexity_constants(const Matrix& a);

/// Human-readable list of violated instance invariants; empty when valid.
/// The noiseless-fit check only applies when x_true is present.
std::vector<std::string> check_invariants(const ProblemInstance& p);

}  // namespace proxctl
