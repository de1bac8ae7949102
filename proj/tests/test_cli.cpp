#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "sleephmm/cli.hpp"
#include "sleephmm/csv_io.hpp"
#include "sleephmm/simulation.hpp"

using namespace sleephmm;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "sleephmm_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string simulated_subject(const char* name, int scenario_id, std::uint64_t seed) {
  const auto scenario = make_scenario(scenario_id);
  const auto series = simulate_observations(scenario.pattern, default_study_emission(),
                                            MissingSpec::none(), seed);
  const auto path = (work_dir() / name).string();
  write_subject_csv(path, series);
  return path;
}

}  // namespace

TEST_CASE("cmd_fit writes the three outputs and reports convergence") {
  const auto input = simulated_subject("subj_fit.csv", 1, 2025);
  const auto out = (work_dir() / "fit_out").string();
  const int status = cli::cmd_fit(input, std::nullopt, out);
  CHECK(status == cli::kExitOk);

  // outputs exist and are parseable by this module's readers
  const ModelParams params = read_params_csv((fs::path(out) / "fit.csv").string());
  CHECK(params.emission.mu0 == doctest::Approx(5.19).epsilon(0.10));
  CHECK(params.emission.mu1 == doctest::Approx(1.31).epsilon(0.10));
  CHECK(std::abs(params.emission.pi1 - 0.95) < 0.05);

  const PosteriorRows rows = read_posterior_csv((fs::path(out) / "posterior.csv").string());
  CHECK(rows.posterior.size() == kWeekMinutes);
  CHECK(fs::exists(fs::path(out) / "fit.svg"));
}

TEST_CASE("cmd_fit on a missing file exits with the input-error code") {
  const auto out = (work_dir() / "fit_missing").string();
  CHECK(cli::cmd_fit((work_dir() / "no_such.csv").string(), std::nullopt, out) ==
        cli::kExitInputError);
}

TEST_CASE("cmd_fit rejects a broken config file") {
  const auto input = simulated_subject("subj_cfg.csv", 1, 11);
  const auto cfg = (work_dir() / "broken.cfg").string();
  std::ofstream(cfg) << "bogus_key = 1\n";
  CHECK(cli::cmd_fit(input, cfg, (work_dir() / "cfg_out").string()) == cli::kExitInputError);
}

TEST_CASE("cmd_decode with a near-perfect rater copies observed reports into the path") {
  const auto input = simulated_subject("subj_decode.csv", 2, 77);

  // neutral counts, near-perfect rater: the decoded path is pinned by x
  ModelParams params;
  params.emission.mu0 = params.emission.mu1 = 2.0;
  params.emission.s0 = params.emission.s1 = 1.0;
  params.emission.pi0 = 1e-12;
  params.emission.pi1 = 1.0 - 1e-12;
  params.delta1 = 0.5;
  const auto params_path = (work_dir() / "perfect.csv").string();
  SeResult no_se;
  write_fit_csv(params_path, params, no_se, false);

  const auto out = (work_dir() / "decode_out").string();
  CHECK(cli::cmd_decode(input, params_path, std::nullopt, out) == cli::kExitOk);

  const SubjectRecord record = read_subject_csv(input);
  const PosteriorRows rows = read_posterior_csv((fs::path(out) / "posterior.csv").string());
  REQUIRE(rows.viterbi.size() == record.series.length());
  for (std::size_t t = 0; t < rows.viterbi.size(); ++t) {
    if (record.series.self_report[t] != kMissingReport) {
      CHECK(rows.viterbi[t] == static_cast<std::uint8_t>(record.series.self_report[t]));
    }
  }
}

TEST_CASE("cmd_decode with a malformed params file exits with the input-error code") {
  const auto input = simulated_subject("subj_badparams.csv", 1, 5);
  const auto bad = (work_dir() / "bad_params.csv").string();
  std::ofstream(bad) << "parameter,estimate,se\nmu0,5.0,0.1\n";
  CHECK(cli::cmd_decode(input, bad, std::nullopt, (work_dir() / "bp_out").string()) ==
        cli::kExitInputError);
}

TEST_CASE("cmd_simulate with one replicate writes a zero band column") {
  const auto out = (work_dir() / "sim_out").string();
  CHECK(cli::cmd_simulate(4, 1, 0, 9, 1, out) == cli::kExitOk);
  const StudyRows rows = read_study_csv((fs::path(out) / "study.csv").string());
  REQUIRE(rows.band_width.size() == kWeekMinutes);
  for (double w : rows.band_width) CHECK(w == 0.0);
  // truth column reproduces the scenario pattern
  CHECK(rows.truth == make_scenario(4).pattern);
  CHECK(fs::exists(fs::path(out) / "study.svg"));
}

TEST_CASE("the installed binary dispatches subcommands") {
  const auto input = simulated_subject("subj_bin.csv", 1, 31);
  ModelParams params;
  params.emission.mu0 = 5.19;
  params.emission.mu1 = 1.31;
  params.emission.s0 = 799.0;
  params.emission.s1 = 0.18;
  params.emission.pi0 = 0.05;
  params.emission.pi1 = 0.95;
  params.trans.alpha = {8.54, -6.21, -5.49};
  params.trans.beta = {7.31, 3.36, 1.06};
  params.delta1 = 0.9;
  const auto params_path = (work_dir() / "bin_params.csv").string();
  SeResult no_se;
  write_fit_csv(params_path, params, no_se, false);

  const auto out = (work_dir() / "bin_out").string();
  const std::string cmd = std::string(SLEEPHMM_CLI_PATH) + " decode --input " + input +
                          " --params " + params_path + " --out " + out + " >/dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(fs::path(out) / "posterior.csv"));

  const std::string bad = std::string(SLEEPHMM_CLI_PATH) + " decode --input " +
                          (work_dir() / "absent.csv").string() + " --params " + params_path +
                          " --out " + out + " >/dev/null 2>&1";
  const int raw = std::system(bad.c_str());
  CHECK(WEXITSTATUS(raw) == cli::kExitInputError);
}
