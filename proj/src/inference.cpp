#include "sleephmm/inference.hpp"

#include <cmath>
#include <stdexcept>

#include "sleephmm/detail/hmm_core.hpp"

namespace sleephmm {

double log_likelihood(const ObservationSeries& series, const ModelParams& params) {
  const auto model = detail::build_log_model(series, params);
  return detail::forward_pass(model, nullptr);
}

double log_likelihood_backward(const ObservationSeries& series, const ModelParams& params) {
  const auto model = detail::build_log_model(series, params);
  std::vector<double> lb;
  return detail::backward_pass(model, &lb);
}

namespace {

std::vector<std::array<double, 2>> smooth(const detail::LogModel& model) {
  std::vector<double> la, lb;
  detail::forward_pass(model, &la);
  detail::backward_pass(model, &lb);
  std::vector<std::array<double, 2>> post(model.T);
  for (std::size_t t = 0; t < model.T; ++t) {
    const double w0 = la[2 * t] + lb[2 * t];
    const double w1 = la[2 * t + 1] + lb[2 * t + 1];
    const double m = std::max(w0, w1);
    const double u0 = std::exp(w0 - m);
    const double u1 = std::exp(w1 - m);
    const double z = u0 + u1;
    post[t] = {u0 / z, u1 / z};
  }
  return post;
}

}  // namespace

std::vector<std::array<double, 2>> posterior_states(const ObservationSeries& series,
                                                    const ModelParams& params) {
  const auto model = detail::build_log_model(series, params);
  return smooth(model);
}

std::vector<double> posterior_sleep(const ObservationSeries& series, const ModelParams& params) {
  const auto both = posterior_states(series, params);
  std::vector<double> p(both.size());
  for (std::size_t t = 0; t < both.size(); ++t) p[t] = both[t][1];
  return p;
}

ViterbiResult viterbi_decode(const ObservationSeries& series, const ModelParams& params) {
  const auto model = detail::build_log_model(series, params);
  ViterbiResult result;
  result.log_joint = detail::viterbi(model, result.path);
  return result;
}

std::vector<std::uint8_t> local_decode(std::span<const double> posterior, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("local_decode: threshold must lie in (0, 1)");
  }
  std::vector<std::uint8_t> states(posterior.size());
  for (std::size_t t = 0; t < posterior.size(); ++t) {
    states[t] = posterior[t] > threshold ? 1 : 0;
  }
  return states;
}

PosteriorTrace infer_trace(const ObservationSeries& series, const ModelParams& params) {
  const auto model = detail::build_log_model(series, params);
  PosteriorTrace trace;
  const auto both = smooth(model);
  trace.posterior_sleep.resize(both.size());
  for (std::size_t t = 0; t < both.size(); ++t) trace.posterior_sleep[t] = both[t][1];
  trace.log_likelihood = detail::forward_pass(model, nullptr);
  trace.viterbi_log_joint = detail::viterbi(model, trace.viterbi_path);
  return trace;
}

}  // namespace sleephmm
