#ifndef SLEEPHMM_SIMULATION_HPP
#define SLEEPHMM_SIMULATION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sleephmm/estimation.hpp"
#include "sleephmm/types.hpp"

namespace sleephmm {

/// One of the five fixed week-long sleep-wake patterns (10080 minutes,
/// half-open minute intervals).
struct ScenarioSpec {
  int id = 0;
  std::vector<std::uint8_t> pattern;
  std::string description;
};

struct MissingSpec {
  enum class Mode { none, last_k_days };
  Mode mode = Mode::none;
  int k = 0;

  static MissingSpec none() { return {}; }
  static MissingSpec last_days(int k) { return {Mode::last_k_days, k}; }
};

struct StudyConfig {
  int replicates = 500;
  std::uint64_t seed = 1;
  int jobs = 1;
  /// Re-estimate parameters on every replicate (default). When false the
  /// posterior is computed at the generating emission parameters with the
  /// default starting transition curve, for comparison runs.
  bool refit = true;
  FitConfig fit;
};

/// Replicate-level posterior summaries per minute: the mean posterior and
/// the width of its 95% confidence band (97.5th minus 2.5th percentile of
/// the mean's sampling distribution).
struct StudySummary {
  std::vector<double> mean_posterior;
  std::vector<double> band_width;
  double max_band_width = 0.0;
  int replicates = 0;         // replicates contributing to the summary
  int failed_replicates = 0;  // excluded non-converged fits
  std::uint64_t seed = 0;
};

/// Fixed patterns:
///   1  sleep 12:00am-8:00am every day
///   2  sleep 12:00am-6:00am plus a 4:00-6:00pm nap every day
///   3  as 2 with a 4:00-5:00pm nap
///   4  as 2 with a 4:00-4:30pm nap
///   5  as 2 with the nap on days 2 and 6 only
ScenarioSpec make_scenario(int id);

/// Emission parameters used by the simulate command: the reference
/// subject's count fit with self-report sensitivity/specificity 0.95.
EmissionParams default_study_emission();

/// Draws counts by the gamma-Poisson mixture and reports as Bernoulli
/// flips of the pattern state, then masks reports per MissingSpec.
/// Reproducible from the seed.
ObservationSeries simulate_observations(std::span<const std::uint8_t> pattern,
                                        const EmissionParams& emission,
                                        const MissingSpec& missing, std::uint64_t seed);

/// Simulate-fit-smooth over config.replicates independent replicates and
/// aggregate per-minute posterior summaries. Per-replicate seeds are
/// derived by counter, so the jobs count cannot change the result. Throws
/// std::runtime_error when more than 10% of replicates fail to converge.
StudySummary run_study(const ScenarioSpec& scenario, const EmissionParams& emission,
                       const MissingSpec& missing, const StudyConfig& config);

/// Misclassification of a decoded path against the fixed truth pattern.
struct ReconstructionError {
  double misclassified_fraction = 0.0;
  std::vector<std::uint8_t> mismatch;  // per minute
  /// Signed error (decoded minus truth) of the first sleep minute per day;
  /// NaN when exactly one of the two has no sleep that day.
  std::vector<double> onset_error;
};

ReconstructionError reconstruction_error(std::span<const std::uint8_t> decoded,
                                         std::span<const std::uint8_t> truth);

/// Convenience overload: thresholds the posterior first (local decoding).
ReconstructionError reconstruction_error(std::span<const double> posterior,
                                         std::span<const std::uint8_t> truth,
                                         double threshold = 0.5);

/// Maximal constant runs of a state sequence, as [begin, end) minute pairs.
struct StateRun {
  std::size_t begin;
  std::size_t end;
  std::uint8_t state;
};
std::vector<StateRun> find_runs(std::span<const std::uint8_t> states);

/// Linear-interpolation percentile (R type 7) of an unsorted sample;
/// p in [0, 1].
double percentile(std::vector<double> values, double p);

}  // namespace sleephmm

#endif  // SLEEPHMM_SIMULATION_HPP
