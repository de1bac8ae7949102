#ifndef SLEEPHMM_ESTIMATION_HPP
#define SLEEPHMM_ESTIMATION_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sleephmm/types.hpp"

namespace sleephmm {

/// Unconstrained reparameterization, in this fixed coordinate order:
///   [0] log mu0   [1] log mu1   [2] log s0   [3] log s1
///   [4] logit pi0 [5] logit pi1 [6] logit delta1
///   [7..9] alpha0..2            [10..12] beta0..2
struct TransformedParams {
  std::array<double, 13> v{};
};

inline constexpr int kNumParams = 13;

/// Canonical parameter names in the coordinate order above.
const std::array<std::string, 13>& param_names();

/// Natural -> unconstrained. Throws std::domain_error when a probability
/// sits on the boundary (logit undefined) or a positive parameter is not
/// strictly positive.
TransformedParams transform(const ModelParams& params);

/// Unconstrained -> natural; exact inverse of transform on the open domain.
ModelParams inverse_transform(const TransformedParams& tp);

struct FitConfig {
  int max_iterations = 500;
  /// Sup-norm tolerance on the transformed-space gradient.
  double gradient_tolerance = 1e-6;
  /// Sup-norm tolerance on the accepted parameter step.
  double step_tolerance = 1e-9;
  /// Central-difference step is fd_step_scale * max(1, |theta_i|).
  double fd_step_scale = 6.0554544523933395e-6;  // cbrt(machine epsilon)
  /// Stop when the objective improves by less than this (relative) for two
  /// consecutive iterations while the gradient is already small; guards
  /// against burning iterations in numerically flat directions.
  double rel_ftol = 1e-10;
  /// Pin delta1 to this value and fit the remaining 12 parameters.
  std::optional<double> fix_delta1;
  /// Number of starts; starts beyond the first jitter the transition
  /// coefficients deterministically from multistart_seed.
  int multistart = 1;
  std::uint64_t multistart_seed = 0;
  /// Starting values; when absent, starting_values(series) is used.
  std::optional<ModelParams> start;
  /// Observed-Hessian standard errors after a converged fit. Replicate
  /// studies switch this off.
  bool compute_se = true;
};

/// Standard errors with per-coordinate availability. When the observed
/// Hessian is not positive definite, coordinates touched by the defective
/// eigendirections are flagged unavailable rather than reported as NaN.
struct SeResult {
  std::vector<double> se;         // natural scale; meaningful where available
  std::vector<bool> available;
  bool hessian_pd = false;
  bool computed = false;
};

struct FitResult {
  ModelParams params_hat;
  ModelParams start;
  SeResult se_natural;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string convergence_reason;
  double gradient_norm = 0.0;  // sup-norm at termination
  bool fixed_delta1 = false;
  /// Size parameter pushed to / beyond the Poisson cap (1e7) and clamped.
  bool size_cap_hit0 = false;
  bool size_cap_hit1 = false;
  int best_start_index = 0;
};

/// Moment-based starting values: night-window (1:00-5:59am) sample moments
/// for the sleep state, afternoon-window (1:00-5:59pm) for awake, report
/// fractions for pi (clamped to [0.01, 0.99]), fixed defaults for the
/// transition coefficients. Throws std::runtime_error when a window holds
/// fewer than two activity observations.
ModelParams starting_values(const ObservationSeries& series);

/// Maximum-likelihood fit by quasi-Newton ascent (BFGS on the negative
/// log-likelihood) over the transformed parameters, gradients by central
/// finite differences.
FitResult fit(const ObservationSeries& series, const FitConfig& config = {});

/// Observed-Hessian standard errors at params_hat (natural scale via the
/// delta method). Respects config.fix_delta1 (12 entries) and the
/// finite-difference scale.
SeResult standard_errors(const ObservationSeries& series, const ModelParams& params_hat,
                         const FitConfig& config = {});

/// Central finite-difference gradient of the log-likelihood with respect to
/// the transformed parameters (13 entries, or 12 with fix_delta1).
std::vector<double> fd_gradient(const ObservationSeries& series, const TransformedParams& tp,
                                double step_scale,
                                std::optional<double> fix_delta1 = std::nullopt);

namespace detail {

/// Central-difference Hessian of f; step per coordinate is
/// step_scale * max(1, |x_i|). Symmetric by construction.
Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x, double step_scale);

/// Inverts a (negative-log-likelihood) Hessian into standard errors with
/// the delta-method derivative d(natural)/d(transformed) per coordinate.
SeResult se_from_hessian(const Eigen::MatrixXd& hessian,
                         const Eigen::VectorXd& link_derivative);

}  // namespace detail

}  // namespace sleephmm

#endif  // SLEEPHMM_ESTIMATION_HPP
