#include "sleephmm/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "sleephmm/csv_io.hpp"
#include "sleephmm/svg.hpp"

namespace sleephmm::cli {

namespace {

namespace fs = std::filesystem;

std::string out_path(const std::string& dir, const char* name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

CliConfig load_config(const std::optional<std::string>& config_path) {
  return config_path ? parse_config_file(*config_path) : CliConfig{};
}

}  // namespace

int cmd_fit(const std::string& input_csv, const std::optional<std::string>& config_path,
            const std::string& out_dir) {
  SubjectRecord record;
  CliConfig config;
  try {
    config = load_config(config_path);
    record = read_subject_csv(input_csv);
    record.series.start_phase = config.start_phase;
    record.series.validate();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }

  std::printf("subject %s: %zu minutes, %.4f of self-reports missing\n",
              record.subject_id.c_str(), record.series.length(),
              missing_fraction(record.series));

  FitResult result;
  try {
    FitConfig fit_config = config.fit;
    if (!config.start_overrides.empty()) {
      fit_config.start =
          apply_start_overrides(starting_values(record.series), config.start_overrides);
    }
    result = fit(record.series, fit_config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }

  std::printf("log-likelihood %.6f after %d iterations (%s)\n", result.log_likelihood,
              result.iterations, result.convergence_reason.c_str());
  if (result.size_cap_hit0 || result.size_cap_hit1) {
    std::printf("note: size parameter %s at the Poisson cap 1e7\n",
                result.size_cap_hit0 ? (result.size_cap_hit1 ? "s0 and s1" : "s0") : "s1");
  }

  const PosteriorTrace trace = infer_trace(record.series, result.params_hat);
  std::string warning;
  if (!result.converged) {
    warning = "fit did not converge";
    std::fprintf(stderr, "warning: %s (%s, gradient sup-norm %.3g)\n", warning.c_str(),
                 result.convergence_reason.c_str(), result.gradient_norm);
  }

  try {
    write_fit_csv(out_path(out_dir, "fit.csv"), result.params_hat, result.se_natural,
                  result.fixed_delta1);
    write_posterior_csv(out_path(out_dir, "posterior.csv"), trace);
    write_fit_svg(out_path(out_dir, "fit.svg"), record.series, trace,
                  "subject " + record.subject_id, warning);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
  return result.converged ? kExitOk : kExitNotConverged;
}

int cmd_decode(const std::string& input_csv, const std::string& params_csv,
               const std::optional<std::string>& config_path, const std::string& out_dir) {
  try {
    const CliConfig config = load_config(config_path);
    SubjectRecord record = read_subject_csv(input_csv);
    record.series.start_phase = config.start_phase;
    record.series.validate();
    const ModelParams params = read_params_csv(params_csv);

    const PosteriorTrace trace = infer_trace(record.series, params);
    write_posterior_csv(out_path(out_dir, "posterior.csv"), trace);
    write_fit_svg(out_path(out_dir, "fit.svg"), record.series, trace,
                  "subject " + record.subject_id + " (decoded)");
    std::printf("decoded %zu minutes, log-likelihood %.6f\n", record.series.length(),
                trace.log_likelihood);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
  return kExitOk;
}

int cmd_simulate(int scenario_id, int replicates, int missing_days, std::uint64_t seed,
                 int jobs, const std::string& out_dir) {
  try {
    const ScenarioSpec scenario = make_scenario(scenario_id);
    const MissingSpec missing =
        missing_days > 0 ? MissingSpec::last_days(missing_days) : MissingSpec::none();

    StudyConfig config;
    config.replicates = replicates;
    config.seed = seed;
    config.jobs = jobs;
    const StudySummary summary =
        run_study(scenario, default_study_emission(), missing, config);

    write_study_csv(out_path(out_dir, "study.csv"), scenario, summary);
    write_study_svg(out_path(out_dir, "study.svg"), scenario, summary,
                    "scenario " + std::to_string(scenario_id) + ": " + scenario.description +
                        (missing_days > 0
                             ? " (last " + std::to_string(missing_days) + " days unreported)"
                             : ""));
    std::printf("scenario %d: %d replicates (%d failed), max band width %.6f\n", scenario_id,
                summary.replicates, summary.failed_replicates, summary.max_band_width);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
  return kExitOk;
}

}  // namespace sleephmm::cli
