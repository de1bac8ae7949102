#include "sleephmm/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "sleephmm/inference.hpp"
#include "sleephmm/rng.hpp"

namespace sleephmm {

ScenarioSpec make_scenario(int id) {
  ScenarioSpec spec;
  spec.id = id;
  spec.pattern.assign(kWeekMinutes, 0);

  // sleep interval and nap interval in minutes-of-day, half-open
  int sleep_end = 0;
  int nap_begin = 0, nap_end = 0;
  bool nap_all_days = true;
  switch (id) {
    case 1:
      sleep_end = 8 * 60;
      spec.description = "regular sleeping 12am-8am";
      break;
    case 2:
      sleep_end = 6 * 60;
      nap_begin = 16 * 60;
      nap_end = 18 * 60;
      spec.description = "sleep 12am-6am, nap 4pm-6pm daily";
      break;
    case 3:
      sleep_end = 6 * 60;
      nap_begin = 16 * 60;
      nap_end = 17 * 60;
      spec.description = "sleep 12am-6am, nap 4pm-5pm daily";
      break;
    case 4:
      sleep_end = 6 * 60;
      nap_begin = 16 * 60;
      nap_end = 16 * 60 + 30;
      spec.description = "sleep 12am-6am, nap 4pm-4:30pm daily";
      break;
    case 5:
      sleep_end = 6 * 60;
      nap_begin = 16 * 60;
      nap_end = 18 * 60;
      nap_all_days = false;
      spec.description = "sleep 12am-6am, nap 4pm-6pm on days 2 and 6";
      break;
    default:
      throw std::invalid_argument("make_scenario: id must be in 1..5");
  }

  for (int t = 0; t < kWeekMinutes; ++t) {
    const int mod = t % kMinutesPerDay;
    const int day = t / kMinutesPerDay + 1;
    bool sleep = mod < sleep_end;
    if (nap_end > nap_begin && mod >= nap_begin && mod < nap_end) {
      // day 2 lands inside the observed-ratings window of the missing-
      // ratings variant, day 6 inside the masked window
      if (nap_all_days || day == 2 || day == 6) sleep = true;
    }
    spec.pattern[static_cast<std::size_t>(t)] = sleep ? 1 : 0;
  }
  return spec;
}

EmissionParams default_study_emission() {
  EmissionParams e;
  e.mu0 = 5.19;
  e.mu1 = 1.31;
  e.s0 = 799.0;
  e.s1 = 0.18;
  e.pi0 = 0.05;  // 1 - specificity
  e.pi1 = 0.95;  // sensitivity
  return e;
}

ObservationSeries simulate_observations(std::span<const std::uint8_t> pattern,
                                        const EmissionParams& emission,
                                        const MissingSpec& missing, std::uint64_t seed) {
  emission.validate();
  if (pattern.empty()) throw std::invalid_argument("simulate_observations: empty pattern");
  if (missing.mode == MissingSpec::Mode::last_k_days && (missing.k < 0 || missing.k > 7)) {
    throw std::invalid_argument("simulate_observations: missing days must be in 0..7");
  }

  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const std::size_t T = pattern.size();
  ObservationSeries series;
  series.activity.resize(T);
  series.self_report.resize(T);

  const std::size_t mask_from =
      missing.mode == MissingSpec::Mode::last_k_days
          ? T - std::min<std::size_t>(T, static_cast<std::size_t>(missing.k) * kMinutesPerDay)
          : T;

  for (std::size_t t = 0; t < T; ++t) {
    const int state = pattern[t] ? 1 : 0;
    const double mu = state ? emission.mu1 : emission.mu0;
    const double s = state ? emission.s1 : emission.s0;
    const double pi = state ? emission.pi1 : emission.pi0;

    // NB(mu, s) as a gamma-Poisson mixture: rate ~ Gamma(shape s, scale mu/s)
    std::gamma_distribution<double> gamma(s, mu / s);
    std::poisson_distribution<long> poisson(gamma(rng));
    series.activity[t] = static_cast<Count>(poisson(rng));

    const Report x = unif(rng) < pi ? 1 : 0;
    series.self_report[t] = t >= mask_from ? kMissingReport : x;
  }
  return series;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percentile: p must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

std::vector<double> replicate_posterior(const ScenarioSpec& scenario,
                                        const EmissionParams& emission,
                                        const MissingSpec& missing, const StudyConfig& config,
                                        std::uint64_t replicate, bool& converged) {
  const ObservationSeries series =
      simulate_observations(scenario.pattern, emission, missing, derive_seed(config.seed, replicate));
  if (config.refit) {
    FitConfig fc = config.fit;
    fc.compute_se = false;
    const FitResult res = fit(series, fc);
    converged = res.converged;
    if (!converged) return {};
    return posterior_sleep(series, res.params_hat);
  }
  converged = true;
  ModelParams params = starting_values(series);
  params.emission = emission;
  return posterior_sleep(series, params);
}

}  // namespace

StudySummary run_study(const ScenarioSpec& scenario, const EmissionParams& emission,
                       const MissingSpec& missing, const StudyConfig& config) {
  if (config.replicates < 1) throw std::invalid_argument("run_study: replicates must be >= 1");
  const std::size_t T = scenario.pattern.size();
  const int R = config.replicates;

  std::vector<std::vector<double>> posteriors(static_cast<std::size_t>(R));
  std::vector<std::uint8_t> ok(static_cast<std::size_t>(R), 0);

  const int jobs = std::max(1, config.jobs);
  std::atomic<int> next{0};
  const auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= R) return;
      bool converged = false;
      posteriors[static_cast<std::size_t>(r)] = replicate_posterior(
          scenario, emission, missing, config, static_cast<std::uint64_t>(r), converged);
      ok[static_cast<std::size_t>(r)] = converged ? 1 : 0;
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  StudySummary summary;
  summary.seed = config.seed;
  std::vector<const std::vector<double>*> used;
  for (int r = 0; r < R; ++r) {
    if (ok[static_cast<std::size_t>(r)]) {
      used.push_back(&posteriors[static_cast<std::size_t>(r)]);
    } else {
      ++summary.failed_replicates;
    }
  }
  summary.replicates = static_cast<int>(used.size());
  if (summary.failed_replicates * 10 > R) {
    throw std::runtime_error("run_study: more than 10% of replicates failed to converge (" +
                             std::to_string(summary.failed_replicates) + " of " +
                             std::to_string(R) + ")");
  }

  // Band width per minute: distance between the 2.5th and 97.5th
  // percentiles of the sampling distribution of the mean posterior, i.e.
  // the width of the 95% confidence interval for the mean,
  // 2 * 1.96 * sd / sqrt(R). This is the quantity whose maximum is on the
  // order of a few hundredths for well-identified scenarios.
  constexpr double kZ975 = 1.9599639845400545;
  const double n = static_cast<double>(used.size());
  summary.mean_posterior.assign(T, 0.0);
  summary.band_width.assign(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    double sum = 0.0;
    for (const auto* rep : used) sum += (*rep)[t];
    const double mean = sum / n;
    summary.mean_posterior[t] = mean;
    if (used.size() > 1) {
      double ss = 0.0;
      for (const auto* rep : used) {
        const double d = (*rep)[t] - mean;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / (n - 1.0));
      summary.band_width[t] = std::min(1.0, 2.0 * kZ975 * sd / std::sqrt(n));
    }
  }
  summary.max_band_width =
      *std::max_element(summary.band_width.begin(), summary.band_width.end());
  return summary;
}

ReconstructionError reconstruction_error(std::span<const std::uint8_t> decoded,
                                         std::span<const std::uint8_t> truth) {
  if (decoded.size() != truth.size()) {
    throw std::invalid_argument("reconstruction_error: length mismatch");
  }
  ReconstructionError err;
  err.mismatch.resize(truth.size());
  std::size_t wrong = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    err.mismatch[t] = decoded[t] != truth[t] ? 1 : 0;
    wrong += err.mismatch[t];
  }
  err.misclassified_fraction = static_cast<double>(wrong) / static_cast<double>(truth.size());

  const std::size_t days = truth.size() / kMinutesPerDay;
  const auto first_sleep = [](std::span<const std::uint8_t> s, std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
      if (s[t]) return static_cast<double>(t - lo);
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  for (std::size_t d = 0; d < days; ++d) {
    const std::size_t lo = d * kMinutesPerDay;
    const std::size_t hi = lo + kMinutesPerDay;
    const double t_truth = first_sleep(truth, lo, hi);
    const double t_dec = first_sleep(decoded, lo, hi);
    if (std::isnan(t_truth) && std::isnan(t_dec)) {
      err.onset_error.push_back(0.0);
    } else {
      err.onset_error.push_back(t_dec - t_truth);  // NaN when one side missing
    }
  }
  return err;
}

ReconstructionError reconstruction_error(std::span<const double> posterior,
                                         std::span<const std::uint8_t> truth, double threshold) {
  const auto decoded = local_decode(posterior, threshold);
  return reconstruction_error(std::span<const std::uint8_t>(decoded), truth);
}

std::vector<StateRun> find_runs(std::span<const std::uint8_t> states) {
  std::vector<StateRun> runs;
  if (states.empty()) return runs;
  std::size_t begin = 0;
  for (std::size_t t = 1; t <= states.size(); ++t) {
    if (t == states.size() || states[t] != states[begin]) {
      runs.push_back({begin, t, states[begin]});
      begin = t;
    }
  }
  return runs;
}

}  // namespace sleephmm
