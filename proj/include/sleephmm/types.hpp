#ifndef SLEEPHMM_TYPES_HPP
#define SLEEPHMM_TYPES_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace sleephmm {

inline constexpr int kMinutesPerDay = 1440;
inline constexpr int kWeekMinutes = 7 * kMinutesPerDay;  // 10080

/// Self-report coding per minute: 0 = awake, 1 = asleep, -1 = missing.
using Report = std::int8_t;
inline constexpr Report kMissingReport = -1;

/// Activity count per minute. kMissingCount marks an epoch whose count is
/// marginalized out of the likelihood (emission factor 1).
using Count = std::int32_t;
inline constexpr Count kMissingCount = -1;

/// Size parameters at or above this value are treated as the Poisson limit.
inline constexpr double kSizeCap = 1e7;

/// One subject's minute-by-minute record: activity counts and (possibly
/// missing) self-reported sleep flags. start_phase is the minute-of-day of
/// the first observation (0 = midnight).
struct ObservationSeries {
  std::vector<Count> activity;
  std::vector<Report> self_report;
  int start_phase = 0;

  std::size_t length() const { return activity.size(); }

  /// Throws std::invalid_argument when any invariant is violated:
  /// equal-length sequences, length >= 1, counts >= 0 (or missing),
  /// reports in {0, 1, missing}, start_phase in [0, 1440).
  void validate() const;
};

/// State-conditional emission laws: negative binomial counts with mean mu_i
/// and size s_i (variance mu_i * (1 + mu_i / s_i)), and Bernoulli(pi_i)
/// self-reports. State 0 = awake, state 1 = asleep. pi1 is the sensitivity
/// of the self-report, pi0 is one minus its specificity.
struct EmissionParams {
  double mu0 = 1.0;
  double mu1 = 1.0;
  double s0 = 1.0;
  double s1 = 1.0;
  double pi0 = 0.5;
  double pi1 = 0.5;

  double count_variance(int state) const;

  /// Throws std::invalid_argument unless mu, s > 0 (finite) and pi in (0,1).
  void validate() const;
};

/// Sinusoidal circadian logits for the stay probabilities, period 1440 min:
///   logit gamma00(t) = alpha[0] + alpha[1] cos(2 pi t / 1440) + alpha[2] sin(2 pi t / 1440)
///   logit gamma11(t) = beta[0]  + beta[1]  cos(2 pi t / 1440) + beta[2]  sin(2 pi t / 1440)
struct TransitionCoeffs {
  std::array<double, 3> alpha{0.0, 0.0, 0.0};
  std::array<double, 3> beta{0.0, 0.0, 0.0};

  /// Throws std::invalid_argument on non-finite coefficients.
  void validate() const;
};

/// Full model: emissions, transition coefficients, and the initial
/// probability of sleep delta1 (delta0 = 1 - delta1 by construction).
/// delta1 may sit on the closed boundary {0, 1}; the transform to
/// unconstrained scale requires the open interval.
struct ModelParams {
  EmissionParams emission;
  TransitionCoeffs trans;
  double delta1 = 0.5;

  void validate() const;
};

}  // namespace sleephmm

#endif  // SLEEPHMM_TYPES_HPP
