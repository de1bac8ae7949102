#ifndef SLEEPHMM_CSV_IO_HPP
#define SLEEPHMM_CSV_IO_HPP

#include <string>
#include <vector>

#include "sleephmm/estimation.hpp"
#include "sleephmm/inference.hpp"
#include "sleephmm/simulation.hpp"
#include "sleephmm/types.hpp"

namespace sleephmm {

struct SubjectRecord {
  std::string subject_id;
  ObservationSeries series;
  std::string source_path;
};

/// Parse errors carry the offending line number in the message.
class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads `minute,activity,self_report` rows; minutes must be contiguous
/// from 0, activity a non-negative integer, self_report one of 0/1/NA/empty.
/// The subject id is the file stem.
SubjectRecord read_subject_csv(const std::string& path);

void write_subject_csv(const std::string& path, const ObservationSeries& series);

/// Fraction of self-report entries that are missing.
double missing_fraction(const ObservationSeries& series);

/// `parameter,estimate,se` rows in canonical parameter order; se is NA
/// where unavailable.
void write_fit_csv(const std::string& path, const ModelParams& params, const SeResult& se,
                   bool fixed_delta1);

/// Reads the same shape back; the se column is optional per row.
ModelParams read_params_csv(const std::string& path);

/// `minute,posterior,viterbi` rows.
void write_posterior_csv(const std::string& path, const PosteriorTrace& trace);

struct PosteriorRows {
  std::vector<double> posterior;
  std::vector<std::uint8_t> viterbi;
};
PosteriorRows read_posterior_csv(const std::string& path);

/// `minute,truth,mean_posterior,band_width` rows.
void write_study_csv(const std::string& path, const ScenarioSpec& scenario,
                     const StudySummary& summary);

struct StudyRows {
  std::vector<std::uint8_t> truth;
  std::vector<double> mean_posterior;
  std::vector<double> band_width;
};
StudyRows read_study_csv(const std::string& path);

/// Line-oriented `key = value` configuration for the fit/decode commands.
/// Unknown keys are errors. Recognized keys: max_iterations,
/// gradient_tolerance, step_tolerance, fd_step_scale, rel_ftol, multistart,
/// multistart_seed, fix_delta1, start_phase, threshold, and start.<name>
/// for any canonical parameter name.
struct CliConfig {
  FitConfig fit;
  int start_phase = 0;
  double threshold = 0.5;
  /// Partial starting-value overrides applied on top of starting_values().
  std::vector<std::pair<std::string, double>> start_overrides;
};

CliConfig parse_config_file(const std::string& path);

/// Applies start.<name> overrides onto a base start.
ModelParams apply_start_overrides(ModelParams base,
                                  const std::vector<std::pair<std::string, double>>& overrides);

}  // namespace sleephmm

#endif  // SLEEPHMM_CSV_IO_HPP
