#include "sleephmm/detail/hmm_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sleephmm/emission.hpp"
#include "sleephmm/transition.hpp"

namespace sleephmm::detail {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

LogModel build_log_model(const ObservationSeries& series, double mu0, double s0, double mu1,
                         double s1, const ReportLogProbs& reports, double log_delta0,
                         double log_delta1, const TransitionCoeffs& coeffs) {
  LogModel model;
  model.T = series.length();
  model.start_phase = series.start_phase;
  model.log_delta[0] = log_delta0;
  model.log_delta[1] = log_delta1;

  // NB log-pmf per state tabulated over 0..max observed count, so the
  // per-minute fill is a lookup. Single-sourced through nb_log_pmf.
  Count max_y = 0;
  for (Count y : series.activity) max_y = std::max(max_y, y);
  std::vector<double> nb0(static_cast<std::size_t>(max_y) + 1);
  std::vector<double> nb1(static_cast<std::size_t>(max_y) + 1);
  for (Count y = 0; y <= max_y; ++y) {
    nb0[static_cast<std::size_t>(y)] = nb_log_pmf(y, mu0, s0);
    nb1[static_cast<std::size_t>(y)] = nb_log_pmf(y, mu1, s1);
  }

  model.log_e.resize(2 * model.T);
  for (std::size_t t = 0; t < model.T; ++t) {
    const Count y = series.activity[t];
    double e0 = 0.0, e1 = 0.0;
    if (y != kMissingCount) {
      e0 = nb0[static_cast<std::size_t>(y)];
      e1 = nb1[static_cast<std::size_t>(y)];
    }
    const Report x = series.self_report[t];
    if (x == 1) {
      e0 += reports.log_p1_state0;
      e1 += reports.log_p1_state1;
    } else if (x == 0) {
      e0 += reports.log_p0_state0;
      e1 += reports.log_p0_state1;
    }
    model.log_e[2 * t] = e0;
    model.log_e[2 * t + 1] = e1;
  }

  model.log_gamma.resize(4 * kMinutesPerDay);
  for (int m = 0; m < kMinutesPerDay; ++m) {
    const auto z = stay_logits(m, coeffs);
    double* row = &model.log_gamma[4 * m];
    row[0] = log_expit(z.z_alpha);   // g00
    row[1] = log_expit(-z.z_alpha);  // g01 = 1 - g00
    row[2] = log_expit(-z.z_beta);   // g10 = 1 - g11
    row[3] = log_expit(z.z_beta);    // g11
  }
  return model;
}

LogModel build_log_model(const ObservationSeries& series, const ModelParams& params) {
  series.validate();
  params.validate();
  const EmissionParams& e = params.emission;
  ReportLogProbs reports{std::log(e.pi0), std::log1p(-e.pi0), std::log(e.pi1),
                         std::log1p(-e.pi1)};
  return build_log_model(series, e.mu0, e.s0, e.mu1, e.s1, reports, std::log1p(-params.delta1),
                         std::log(params.delta1), params.trans);
}

double forward_pass(const LogModel& model, std::vector<double>* la) {
  const std::size_t T = model.T;
  if (la) la->resize(2 * T);
  double a0 = model.log_delta[0] + model.loge(0, 0);
  double a1 = model.log_delta[1] + model.loge(0, 1);
  if (la) {
    (*la)[0] = a0;
    (*la)[1] = a1;
  }
  for (std::size_t t = 1; t < T; ++t) {
    const double* g = model.gamma_at(t - 1);
    const double n0 = log_add(a0 + g[0], a1 + g[2]) + model.loge(t, 0);
    const double n1 = log_add(a0 + g[1], a1 + g[3]) + model.loge(t, 1);
    a0 = n0;
    a1 = n1;
    if (la) {
      (*la)[2 * t] = a0;
      (*la)[2 * t + 1] = a1;
    }
  }
  return log_add(a0, a1);
}

double backward_pass(const LogModel& model, std::vector<double>* lb) {
  const std::size_t T = model.T;
  lb->resize(2 * T);
  double b0 = 0.0, b1 = 0.0;
  (*lb)[2 * (T - 1)] = b0;
  (*lb)[2 * (T - 1) + 1] = b1;
  for (std::size_t t = T - 1; t-- > 0;) {
    const double* g = model.gamma_at(t);
    const double e0 = model.loge(t + 1, 0);
    const double e1 = model.loge(t + 1, 1);
    const double n0 = log_add(g[0] + e0 + b0, g[1] + e1 + b1);
    const double n1 = log_add(g[2] + e0 + b0, g[3] + e1 + b1);
    b0 = n0;
    b1 = n1;
    (*lb)[2 * t] = b0;
    (*lb)[2 * t + 1] = b1;
  }
  return log_add(model.log_delta[0] + model.loge(0, 0) + b0,
                 model.log_delta[1] + model.loge(0, 1) + b1);
}

double viterbi(const LogModel& model, std::vector<std::uint8_t>& path) {
  const std::size_t T = model.T;
  path.resize(T);
  std::vector<std::uint8_t> back(2 * T);  // argmax predecessor per (t, state)
  double d0 = model.log_delta[0] + model.loge(0, 0);
  double d1 = model.log_delta[1] + model.loge(0, 1);
  for (std::size_t t = 1; t < T; ++t) {
    const double* g = model.gamma_at(t - 1);
    const double c00 = d0 + g[0], c10 = d1 + g[2];
    const double c01 = d0 + g[1], c11 = d1 + g[3];
    // strict > so that exact ties resolve toward awake
    const std::uint8_t p0 = c10 > c00 ? 1 : 0;
    const std::uint8_t p1 = c11 > c01 ? 1 : 0;
    const double n0 = (p0 ? c10 : c00) + model.loge(t, 0);
    const double n1 = (p1 ? c11 : c01) + model.loge(t, 1);
    back[2 * t] = p0;
    back[2 * t + 1] = p1;
    d0 = n0;
    d1 = n1;
  }
  std::uint8_t state = d1 > d0 ? 1 : 0;
  const double log_joint = state ? d1 : d0;
  path[T - 1] = state;
  for (std::size_t t = T - 1; t-- > 0;) {
    state = back[2 * (t + 1) + state];
    path[t] = state;
  }
  return log_joint;
}

}  // namespace sleephmm::detail
