#include "sleephmm/transition.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sleephmm {

double expit_stable(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_expit(double z) {
  // -softplus(-z), split to avoid exp overflow on either side
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

namespace detail {

StayLogits stay_logits(int minute_of_day, const TransitionCoeffs& coeffs) {
  const double angle =
      2.0 * std::numbers::pi * static_cast<double>(minute_of_day) / kMinutesPerDay;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {coeffs.alpha[0] + coeffs.alpha[1] * c + coeffs.alpha[2] * s,
          coeffs.beta[0] + coeffs.beta[1] * c + coeffs.beta[2] * s};
}

}  // namespace detail

TransitionMatrix transition_matrix(long long t, const TransitionCoeffs& coeffs) {
  if (t < 1) {
    throw std::invalid_argument("transition_matrix: minute index must be >= 1");
  }
  for (double a : coeffs.alpha) {
    if (!std::isfinite(a)) throw std::domain_error("transition_matrix: non-finite alpha");
  }
  for (double b : coeffs.beta) {
    if (!std::isfinite(b)) throw std::domain_error("transition_matrix: non-finite beta");
  }
  const auto z = detail::stay_logits(static_cast<int>(t % kMinutesPerDay), coeffs);
  TransitionMatrix m;
  m.p[0][0] = expit_stable(z.z_alpha);
  m.p[0][1] = 1.0 - m.p[0][0];
  m.p[1][1] = expit_stable(z.z_beta);
  m.p[1][0] = 1.0 - m.p[1][1];
  return m;
}

}  // namespace sleephmm
