#ifndef SLEEPHMM_DETAIL_HMM_CORE_HPP
#define SLEEPHMM_DETAIL_HMM_CORE_HPP

#include <cstdint>
#include <vector>

#include "sleephmm/types.hpp"

namespace sleephmm::detail {

/// Log-scale Bernoulli emission parameters per state. Passing the logs
/// directly lets the fit objective evaluate them from the unconstrained
/// scale (log_expit of the logit) instead of round-tripping through a
/// probability that may saturate at 0 or 1.
struct ReportLogProbs {
  double log_p1_state0;  // log P(X=1 | awake)
  double log_p0_state0;  // log P(X=0 | awake)
  double log_p1_state1;  // log P(X=1 | sleep)
  double log_p0_state1;  // log P(X=0 | sleep)
};

/// Everything the recursions need, in log scale. Emission log-probs are
/// tabulated per (minute, state); stay/switch log-probabilities per
/// minute-of-day class (the sinusoid has period 1440).
struct LogModel {
  std::size_t T = 0;
  int start_phase = 0;
  double log_delta[2] = {0.0, 0.0};
  std::vector<double> log_e;  // 2*T, [2*t + state]
  // per minute-of-day class m: [4*m + 0..3] = log g00, log g01, log g10, log g11
  std::vector<double> log_gamma;

  double loge(std::size_t t, int state) const { return log_e[2 * t + state]; }

  /// Log-transition row pointer for the jump out of 0-based minute sigma
  /// (into sigma + 1). The paper indexes the sinusoid by the 1-based source
  /// minute; start_phase shifts records that do not begin at midnight.
  const double* gamma_at(std::size_t sigma) const {
    const std::size_t m = (sigma + 1 + static_cast<std::size_t>(start_phase)) % kMinutesPerDay;
    return &log_gamma[4 * m];
  }
};

/// Builds the tables. mu/s are natural-scale NB parameters (s above
/// kSizeCap handled by nb_log_pmf's Poisson branch); reports and the
/// initial distribution arrive already in log scale. delta entries may be
/// -inf when the initial state is pinned.
LogModel build_log_model(const ObservationSeries& series, double mu0, double s0, double mu1,
                         double s1, const ReportLogProbs& reports, double log_delta0,
                         double log_delta1, const TransitionCoeffs& coeffs);

/// Same, from natural-scale ModelParams (validates them first).
LogModel build_log_model(const ObservationSeries& series, const ModelParams& params);

/// Forward recursion; returns log L_T. If la is non-null it is resized to
/// 2*T and filled with the forward log-probabilities [2*t + state].
double forward_pass(const LogModel& model, std::vector<double>* la);

/// Backward recursion into lb (resized to 2*T); returns the log-likelihood
/// evaluated from the t=0 boundary, a cross-check on the forward value.
double backward_pass(const LogModel& model, std::vector<double>* lb);

/// Viterbi in log space. Ties break toward state 0 (awake). Returns the
/// log joint probability of the argmax path.
double viterbi(const LogModel& model, std::vector<std::uint8_t>& path);

/// log(exp(a) + exp(b)) without over/underflow; handles -inf operands.
double log_add(double a, double b);

}  // namespace sleephmm::detail

#endif  // SLEEPHMM_DETAIL_HMM_CORE_HPP
