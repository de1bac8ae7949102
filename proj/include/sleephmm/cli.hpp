#ifndef SLEEPHMM_CLI_HPP
#define SLEEPHMM_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>

namespace sleephmm::cli {

/// Stable exit-code contract shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;

/// Fit one subject: writes fit.csv, posterior.csv, fit.svg into out_dir.
/// Returns kExitNotConverged (outputs still written, warning printed) when
/// the optimizer did not converge.
int cmd_fit(const std::string& input_csv, const std::optional<std::string>& config_path,
            const std::string& out_dir);

/// Decode with externally supplied parameters: posterior.csv and fit.svg
/// as in cmd_fit, no refitting.
int cmd_decode(const std::string& input_csv, const std::string& params_csv,
               const std::optional<std::string>& config_path, const std::string& out_dir);

/// Replicate study on one fixed scenario: writes study.csv and study.svg.
int cmd_simulate(int scenario_id, int replicates, int missing_days, std::uint64_t seed,
                 int jobs, const std::string& out_dir);

}  // namespace sleephmm::cli

#endif  // SLEEPHMM_CLI_HPP
