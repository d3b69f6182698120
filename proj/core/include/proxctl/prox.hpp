#pragma once

#include "proxctl/linalg.hpp"

namespace proxctl {

/// Per-coordinate thresholds τλᵢ. Entries are finite and nonnegative.
class ThresholdVector {
 public:
  explicit ThresholdVector(Vector weights);
  static ThresholdVector scaled(double tau, const Vector& lambda);
  static ThresholdVector uniform(Index n, double t);

  const Vector& weights() const noexcept { return weights_; }
  Index size() const noexcept { return weights_.size(); }

 private:
  Vector weights_;
};

/// Componentwise shrinkage: zᵢ − sign(zᵢ)tᵢ when |zᵢ| > tᵢ, otherwise 0.
/// The boundary |zᵢ| == tᵢ maps to 0.
Vector soft_threshold(const Vector& z, const ThresholdVector& t);

/// Same as soft_threshold but writes into `out` (may alias `z`).
void soft_threshold_into(const Vector& z, const Vector& t, Vector& out);

}  // namespace proxctl
