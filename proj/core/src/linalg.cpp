#include "proxctl/linalg.hpp"

#include <cmath>
#include <cstdint>

namespace proxctl {

bool all_finite(const Vector& v) { return v.allFinite(); }
bool all_finite(const Matrix& a) { return a.allFinite(); }

void require_dim(Index actual, Index expected, const char* what) {
  if (actual != expected) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(actual));
  }
}

Vector matvec(const Matrix& a, const Vector& v) {
  require_dim(v.size(), a.cols(), "matvec");
  return a * v;
}

Vector matvec_transposed(const Matrix& a, const Vector& v) {
  require_dim(v.size(), a.rows(), "matvec_transposed");
  return a.transpose() * v;
}

namespace {

// Fixed-seed fallback start for matrices that annihilate the all-ones vector.
Vector fallback_start(Index n) {
  std::uint64_t state = 0x9E3779B97F4A7C15ULL;
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    v[i] = static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
  }
  return v.normalized();
}

}  // namespace

double spectral_norm(const Matrix& a, const PowerIterationOptions& opts) {
  if (a.size() == 0) throw DimensionError("spectral_norm: empty matrix");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("spectral_norm: tol must be positive");
  if (a.isZero(0.0)) throw std::invalid_argument("spectral_norm: matrix is zero");

  Vector v = Vector::Ones(a.cols()) / std::sqrt(static_cast<double>(a.cols()));
  Vector av = a * v;
  if (av.squaredNorm() == 0.0) {
    v = fallback_start(a.cols());
    av = a * v;
  }
  // Rayleigh quotient of AᵀA at unit v is ‖Av‖².
  double rayleigh = av.squaredNorm();
  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    Vector w = a.transpose() * av;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    av = a * v;
    const double next = av.squaredNorm();
    const bool done = std::abs(next - rayleigh) <= opts.tol * next;
    rayleigh = next;
    if (done) return std::sqrt(rayleigh);
  }
  throw ConvergenceError("spectral_norm: power iteration did not converge", std::sqrt(rayleigh),
                         opts.max_iters);
}

Norms norms(const Vector& v) {
  Norms out;
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (v[i] != 0.0) ++out.l0;
    out.l1 += a;
    if (a > out.linf) out.linf = a;
  }
  out.l2 = v.norm();
  return out;
}

Matrix identity(Index n) { return Matrix::Identity(n, n); }

}  // namespace proxctl
