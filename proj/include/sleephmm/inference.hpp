#ifndef SLEEPHMM_INFERENCE_HPP
#define SLEEPHMM_INFERENCE_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sleephmm/types.hpp"

namespace sleephmm {

/// Smoothed per-minute sleep probabilities, the global (Viterbi) decode,
/// and the data log-likelihood for one subject.
struct PosteriorTrace {
  std::vector<double> posterior_sleep;  // P(C_t = 1 | all data)
  std::vector<std::uint8_t> viterbi_path;
  double viterbi_log_joint = 0.0;
  double log_likelihood = 0.0;
};

struct ViterbiResult {
  std::vector<std::uint8_t> path;
  double log_joint;
};

/// Log of the marginal data likelihood, summing over all 2^T hidden paths
/// by the forward recursion with per-step log-sum-exp.
double log_likelihood(const ObservationSeries& series, const ModelParams& params);

/// The same quantity evaluated from the backward recursion's t=1 boundary;
/// an independent route used to cross-check the forward value.
double log_likelihood_backward(const ObservationSeries& series, const ModelParams& params);

/// Per-minute smoothed P(C_t = 1 | all data) (local decoding input).
std::vector<double> posterior_sleep(const ObservationSeries& series, const ModelParams& params);

/// Both state posteriors per minute ([awake, sleep]); each pair sums to 1
/// within floating-point rounding.
std::vector<std::array<double, 2>> posterior_states(const ObservationSeries& series,
                                                    const ModelParams& params);

/// Most-probable state path (global decoding); exact ties break toward
/// awake so repeated runs are reproducible.
ViterbiResult viterbi_decode(const ObservationSeries& series, const ModelParams& params);

/// Binarizes a posterior: state 1 iff posterior > threshold (strict).
std::vector<std::uint8_t> local_decode(std::span<const double> posterior,
                                       double threshold = 0.5);

/// Posterior, Viterbi path, and log-likelihood in one shared sweep.
PosteriorTrace infer_trace(const ObservationSeries& series, const ModelParams& params);

}  // namespace sleephmm

#endif  // SLEEPHMM_INFERENCE_HPP
