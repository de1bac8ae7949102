#ifndef SLEEPHMM_TRANSITION_HPP
#define SLEEPHMM_TRANSITION_HPP

#include "sleephmm/types.hpp"

namespace sleephmm {

/// Row-stochastic 2x2 transition matrix; p[i][j] = P(C_{t+1} = j | C_t = i).
struct TransitionMatrix {
  double p[2][2];
};

/// 1 / (1 + exp(-z)) without overflow anywhere on the real line; saturates
/// to 0 or 1 at the extremes.
double expit_stable(double z);

/// log(expit(z)) = -log1p(exp(-z)), accurate for any finite z (stays finite
/// and ~z for very negative z, where expit itself would underflow).
double log_expit(double z);

/// Transition matrix for the jump out of minute t (1-based). The sinusoid
/// argument is reduced mod 1440 before evaluation, so the 1440-minute
/// periodicity is exact. Row complements are computed as 1 - gamma, making
/// each row sum to 1 exactly. Throws std::invalid_argument on t < 1 and
/// std::domain_error on non-finite coefficients.
TransitionMatrix transition_matrix(long long t, const TransitionCoeffs& coeffs);

namespace detail {

/// Stay-logits for minute-of-day class m in [0, 1440):
/// z_alpha = logit gamma00, z_beta = logit gamma11.
struct StayLogits {
  double z_alpha;
  double z_beta;
};

StayLogits stay_logits(int minute_of_day, const TransitionCoeffs& coeffs);

}  // namespace detail

}  // namespace sleephmm

#endif  // SLEEPHMM_TRANSITION_HPP
