#include "proxctl/prox.hpp"

#include <cmath>
#include <stdexcept>

namespace proxctl {

ThresholdVector::ThresholdVector(Vector weights) : weights_(std::move(weights)) {
  if (!all_finite(weights_) || (weights_.array() < 0.0).any()) {
    throw std::invalid_argument("ThresholdVector: entries must be finite and nonnegative");
  }
}

ThresholdVector ThresholdVector::scaled(double tau, const Vector& lambda) {
  return ThresholdVector(tau * lambda);
}

ThresholdVector ThresholdVector::uniform(Index n, double t) {
  return ThresholdVector(Vector::Constant(n, t));
}

void soft_threshold_into(const Vector& z, const Vector& t, Vector& out) {
  require_dim(t.size(), z.size(), "soft_threshold");
  out.resize(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double zi = z[i];
    const double ti = t[i];
    if (zi > ti) {
      out[i] = zi - ti;
    } else if (zi < -ti) {
      out[i] = zi + ti;
    } else {
      out[i] = 0.0;
    }
  }
}

Vector soft_threshold(const Vector& z, const ThresholdVector& t) {
  Vector out;
  soft_threshold_into(z, t.weights(), out);
  return out;
}

}  // namespace proxctl
