#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sleephmm/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sleep-wake cycle reconstruction from actigraphy and self-reports"};
  app.require_subcommand(1);

  std::string input, out_dir, params_file;
  std::string config_file;
  int scenario = 1, reps = 500, missing_days = 0, jobs = 1;
  std::uint64_t seed = 1;

  auto* fit = app.add_subcommand("fit", "maximum-likelihood fit of one subject");
  fit->add_option("--input", input, "subject CSV (minute,activity,self_report)")->required();
  fit->add_option("--config", config_file, "key = value configuration file");
  fit->add_option("--out", out_dir, "output directory")->required();

  auto* decode = app.add_subcommand("decode", "posterior decode with given parameters");
  decode->add_option("--input", input, "subject CSV")->required();
  decode->add_option("--params", params_file, "parameter CSV (fit.csv shape)")->required();
  decode->add_option("--config", config_file, "key = value configuration file");
  decode->add_option("--out", out_dir, "output directory")->required();

  auto* simulate = app.add_subcommand("simulate", "replicate study on a fixed scenario");
  simulate->add_option("--scenario", scenario, "scenario id 1..5")->required();
  simulate->add_option("--reps", reps, "number of replicates");
  simulate->add_option("--missing-days", missing_days, "mask self-reports on the last k days");
  simulate->add_option("--seed", seed, "study seed");
  simulate->add_option("--jobs", jobs, "concurrent replicate fits");
  simulate->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  const std::optional<std::string> config =
      config_file.empty() ? std::nullopt : std::make_optional(config_file);

  if (fit->parsed()) return sleephmm::cli::cmd_fit(input, config, out_dir);
  if (decode->parsed()) return sleephmm::cli::cmd_decode(input, params_file, config, out_dir);
  return sleephmm::cli::cmd_simulate(scenario, reps, missing_days, seed, jobs, out_dir);
}
