#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace proxctl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

/// Thrown when operand shapes do not agree. Always a caller bug.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Power iteration gave up before reaching the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, std::size_t iterations)
      : std::runtime_error(what), best_estimate_(best_estimate), iterations_(iterations) {}

  double best_estimate() const noexcept { return best_estimate_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double best_estimate_;
  std::size_t iterations_;
};

struct PowerIterationOptions {
  double tol = 1e-10;
  std::size_t max_iters = 10'000;
};

struct Norms {
  std::size_t l0 = 0;  // strict nonzero count
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

bool all_finite(const Vector& v);
bool all_finite(const Matrix& a);

/// Throws DimensionError naming `what` unless `actual == expected`.
void require_dim(Index actual, Index expected, const char* what);

Vector matvec(const Matrix& a, const Vector& v);
Vector matvec_transposed(const Matrix& a, const Vector& v);

/// Largest singular value of `a`, by power iteration on AᵀA started from the
/// normalized all-ones vector. The result is relative-accurate to about `tol`
/// in the eigenvalue of AᵀA. Throws ConvergenceError (carrying the last
/// estimate) when `max_iters` is exhausted.
double spectral_norm(const Matrix& a, const PowerIterationOptions& opts = {});

Norms norms(const Vector& v);

Matrix identity(Index n);

}  // namespace proxctl
