#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "sleephmm/estimation.hpp"
#include "sleephmm/inference.hpp"
#include "sleephmm/simulation.hpp"

using namespace sleephmm;

namespace {

ModelParams reference_params() {
  ModelParams p;
  p.emission.mu0 = 5.19;
  p.emission.mu1 = 1.31;
  p.emission.s0 = 799.0;
  p.emission.s1 = 0.18;
  p.emission.pi0 = 0.099;
  p.emission.pi1 = 0.99;
  p.trans.alpha = {8.54, -6.21, -5.49};
  p.trans.beta = {7.31, 3.36, 1.06};
  p.delta1 = 0.9;
  return p;
}

/// Model-generated data: hidden path from the circadian chain, then
/// emissions, via the simulation module's sampler.
ObservationSeries model_series(const ModelParams& params, std::size_t T, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto path = oracles::sample_markov_path(T, params.trans, params.delta1, 0, rng);
  return simulate_observations(path, params.emission, MissingSpec::none(), seed + 1);
}

}  // namespace

TEST_CASE("transform maps the documented scalar cases") {
  ModelParams p = reference_params();
  p.emission.pi0 = 0.5;
  p.delta1 = 0.099;
  const auto tp = transform(p);
  CHECK(tp.v[4] == 0.0);  // logit(0.5)
  CHECK(tp.v[0] == doctest::Approx(1.6467336971777973).epsilon(1e-15));  // log(5.19)
  CHECK(tp.v[6] == doctest::Approx(-2.208385407473748).epsilon(1e-12));  // logit(0.099)
}

TEST_CASE("transform rejects boundary probabilities") {
  ModelParams p = reference_params();
  p.emission.pi1 = 1.0;
  CHECK_THROWS_AS(transform(p), std::domain_error);
  p = reference_params();
  p.delta1 = 0.0;
  CHECK_THROWS_AS(transform(p), std::domain_error);
  p = reference_params();
  p.emission.mu0 = 0.0;
  CHECK_THROWS_AS(transform(p), std::domain_error);
}

TEST_CASE("transform round trip is the identity within 1e-12") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto range = [&](double lo, double hi) { return lo + (hi - lo) * unif(rng); };
  for (int rep = 0; rep < 1000; ++rep) {
    ModelParams p;
    p.emission.mu0 = std::exp(range(-5.0, 8.0));
    p.emission.mu1 = std::exp(range(-5.0, 8.0));
    p.emission.s0 = std::exp(range(-7.0, 13.0));
    p.emission.s1 = std::exp(range(-7.0, 13.0));
    p.emission.pi0 = range(1e-4, 1.0 - 1e-4);
    p.emission.pi1 = range(1e-4, 1.0 - 1e-4);
    p.delta1 = range(1e-4, 1.0 - 1e-4);
    for (auto& a : p.trans.alpha) a = range(-20.0, 20.0);
    for (auto& b : p.trans.beta) b = range(-20.0, 20.0);

    const ModelParams q = inverse_transform(transform(p));
    CHECK(q.emission.mu0 == doctest::Approx(p.emission.mu0).epsilon(1e-12));
    CHECK(q.emission.mu1 == doctest::Approx(p.emission.mu1).epsilon(1e-12));
    CHECK(q.emission.s0 == doctest::Approx(p.emission.s0).epsilon(1e-12));
    CHECK(q.emission.s1 == doctest::Approx(p.emission.s1).epsilon(1e-12));
    CHECK(std::abs(q.emission.pi0 - p.emission.pi0) <= 1e-12);
    CHECK(std::abs(q.emission.pi1 - p.emission.pi1) <= 1e-12);
    CHECK(std::abs(q.delta1 - p.delta1) <= 1e-12);
    for (int i = 0; i < 3; ++i) {
      CHECK(q.trans.alpha[i] == p.trans.alpha[i]);
      CHECK(q.trans.beta[i] == p.trans.beta[i]);
    }
  }
}

TEST_CASE("starting values recover window moments") {
  // two days; night counts ~ mean 1.3, afternoon ~ mean 5.2, highly
  // overdispersed afternoon so the moment size estimate is interior
  ObservationSeries series;
  const std::size_t T = 2 * kMinutesPerDay;
  series.activity.assign(T, 3);
  series.self_report.assign(T, kMissingReport);
  std::mt19937_64 rng(17);
  std::poisson_distribution<int> night(1.3);
  std::negative_binomial_distribution<int> afternoon(2, 2.0 / 7.2);  // mean 5.2, var ~ 18.7
  double night_sum = 0.0, night_sq = 0.0, noon_sum = 0.0, noon_sq = 0.0;
  std::size_t n_night = 0, n_noon = 0;
  for (std::size_t t = 0; t < T; ++t) {
    const int mod = static_cast<int>(t % kMinutesPerDay);
    if (mod >= 60 && mod < 360) {
      series.activity[t] = night(rng);
      series.self_report[t] = 1;
      night_sum += series.activity[t];
      night_sq += static_cast<double>(series.activity[t]) * series.activity[t];
      ++n_night;
    } else if (mod >= 780 && mod < 1080) {
      series.activity[t] = afternoon(rng);
      series.self_report[t] = 0;
      noon_sum += series.activity[t];
      noon_sq += static_cast<double>(series.activity[t]) * series.activity[t];
      ++n_noon;
    }
  }
  const auto start = starting_values(series);

  const double night_mean = night_sum / static_cast<double>(n_night);
  const double noon_mean = noon_sum / static_cast<double>(n_noon);
  const double noon_var =
      (noon_sq - noon_sum * noon_mean) / static_cast<double>(n_noon - 1);
  CHECK(start.emission.mu1 == doctest::Approx(night_mean).epsilon(1e-12));
  CHECK(start.emission.mu0 == doctest::Approx(noon_mean).epsilon(1e-12));
  // Poisson night window: variance ~ mean, so the size is capped
  CHECK(start.emission.mu1 == doctest::Approx(1.3).epsilon(0.15));
  CHECK(start.emission.mu0 == doctest::Approx(5.2).epsilon(0.15));
  CHECK(start.emission.s0 ==
        doctest::Approx(noon_mean * noon_mean / (noon_var - noon_mean)).epsilon(1e-12));
  // all night reports say asleep -> clamped
  CHECK(start.emission.pi1 == 0.99);
  CHECK(start.emission.pi0 == 0.01);
  CHECK(start.delta1 == 0.9);
  CHECK(start.trans.alpha[0] == 8.0);
  CHECK(start.trans.beta[0] == 7.5);
}

TEST_CASE("starting values cap the size when a window is under-dispersed") {
  ObservationSeries series;
  series.activity.assign(kMinutesPerDay, 0);
  series.self_report.assign(kMinutesPerDay, kMissingReport);
  for (std::size_t t = 0; t < series.length(); ++t) {
    const int mod = static_cast<int>(t % kMinutesPerDay);
    if (mod >= 60 && mod < 360) series.activity[t] = (t % 2) ? 1 : 2;  // var < mean
    if (mod >= 780 && mod < 1080) series.activity[t] = (t % 7 == 0) ? 25 : 1;
  }
  const auto start = starting_values(series);
  CHECK(start.emission.s1 == kSizeCap);
  // missing reports everywhere -> default rater starts
  CHECK(start.emission.pi1 == 0.9);
  CHECK(start.emission.pi0 == 0.1);
}

TEST_CASE("starting values fail with a diagnostic on an empty window") {
  ObservationSeries series;
  series.activity.assign(120, 2);
  series.self_report.assign(120, kMissingReport);
  CHECK_THROWS_WITH_AS(starting_values(series),
                       doctest::Contains("window contains fewer than two"), std::runtime_error);
}

TEST_CASE("finite-difference Hessian matches a known quadratic") {
  Eigen::MatrixXd a(3, 3);
  a << 4.0, 1.0, 0.5,
       1.0, 3.0, 0.2,
       0.5, 0.2, 2.0;
  const auto f = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x); };
  Eigen::VectorXd x0(3);
  x0 << 0.3, -1.2, 0.8;
  const Eigen::MatrixXd h = detail::fd_hessian(f, x0, 1e-4);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(h(i, j) == doctest::Approx(a(i, j)).epsilon(1e-6));
    }
  }
  const Eigen::VectorXd links = Eigen::VectorXd::Ones(3);
  const SeResult se = detail::se_from_hessian(h, links);
  CHECK(se.hessian_pd);
  const Eigen::MatrixXd cov = a.inverse();
  for (int i = 0; i < 3; ++i) {
    REQUIRE(se.available[static_cast<std::size_t>(i)]);
    CHECK(se.se[static_cast<std::size_t>(i)] ==
          doctest::Approx(std::sqrt(cov(i, i))).epsilon(1e-6));
  }
}

TEST_CASE("se_from_hessian flags defective directions instead of NaN") {
  Eigen::MatrixXd h(2, 2);
  h << 2.0, 0.0,
       0.0, -1.0;  // not positive definite in the second coordinate
  const SeResult se = detail::se_from_hessian(h, Eigen::VectorXd::Ones(2));
  CHECK_FALSE(se.hessian_pd);
  CHECK(se.available[0]);
  CHECK_FALSE(se.available[1]);
  CHECK(se.se[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("delta method shrinks the natural se of a near-boundary probability") {
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd links(2);
  const double pi = 1.0 - 1e-9;
  links << 1.0, pi * (1.0 - pi);
  const SeResult se = detail::se_from_hessian(h, links);
  CHECK(se.se[0] == doctest::Approx(1.0));
  CHECK(se.se[1] <= 2e-9);
}

TEST_CASE("two finite-difference stencils agree on the gradient") {
  const auto params = reference_params();
  const auto series = model_series(params, 1440, 302);
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> jitter(-0.15, 0.15);
  for (int rep = 0; rep < 5; ++rep) {
    TransformedParams tp = transform(params);
    for (auto& v : tp.v) v += jitter(rng);
    const auto g1 = fd_gradient(series, tp, 6.06e-6);
    const auto g2 = fd_gradient(series, tp, 3.03e-6);
    REQUIRE(g1.size() == 13);
    for (std::size_t i = 0; i < g1.size(); ++i) {
      CHECK(std::abs(g1[i] - g2[i]) <= 1e-4 * std::max(1.0, std::abs(g1[i])));
    }
  }
}

TEST_CASE("fit improves on the start and recovers simulated emissions") {
  const auto truth = reference_params();
  const auto series = model_series(truth, 3 * kMinutesPerDay, 909);

  FitConfig config;
  config.compute_se = false;
  const FitResult result = fit(series, config);

  CHECK(result.converged);
  CHECK(result.log_likelihood >= log_likelihood(series, result.start) - 1e-8);
  // ascent also dominates the generating values on this sample
  CHECK(result.log_likelihood >= log_likelihood(series, truth) - 1e-6);
  CHECK(result.params_hat.emission.mu0 ==
        doctest::Approx(truth.emission.mu0).epsilon(0.15));
  CHECK(result.params_hat.emission.mu1 ==
        doctest::Approx(truth.emission.mu1).epsilon(0.15));
  CHECK(std::abs(result.params_hat.emission.pi1 - truth.emission.pi1) < 0.05);
}

TEST_CASE("fit starting at the truth does not decrease the likelihood") {
  const auto truth = reference_params();
  const auto series = model_series(truth, 2 * kMinutesPerDay, 913);
  FitConfig config;
  config.compute_se = false;
  config.start = truth;
  const FitResult result = fit(series, config);
  CHECK(result.log_likelihood >= log_likelihood(series, truth) - 1e-8);
}

TEST_CASE("perturbed starts land on the same optimum") {
  const auto truth = reference_params();
  const auto series = model_series(truth, 2 * kMinutesPerDay, 917);
  FitConfig config;
  config.compute_se = false;
  const FitResult a = fit(series, config);

  FitConfig perturbed = config;
  ModelParams start2 = a.start;
  start2.trans.alpha = {7.0, -4.0, -2.0};
  start2.trans.beta = {8.0, 3.0, 3.0};
  start2.emission.mu0 *= 1.3;
  perturbed.start = start2;
  const FitResult b = fit(series, perturbed);

  CHECK(a.log_likelihood == doctest::Approx(b.log_likelihood).epsilon(1e-6));
  CHECK(a.params_hat.emission.mu0 ==
        doctest::Approx(b.params_hat.emission.mu0).epsilon(0.01));
  CHECK(a.params_hat.emission.mu1 ==
        doctest::Approx(b.params_hat.emission.mu1).epsilon(0.01));
  CHECK(std::abs(a.params_hat.emission.pi1 - b.params_hat.emission.pi1) < 0.01);
}

TEST_CASE("fit is deterministic given config and seed") {
  const auto truth = reference_params();
  const auto series = model_series(truth, kMinutesPerDay, 921);
  FitConfig config;
  config.compute_se = false;
  config.multistart = 2;
  config.multistart_seed = 5;
  const FitResult a = fit(series, config);
  const FitResult b = fit(series, config);
  CHECK(a.log_likelihood == b.log_likelihood);
  CHECK(a.params_hat.emission.mu0 == b.params_hat.emission.mu0);
  CHECK(a.iterations == b.iterations);
  CHECK(a.best_start_index == b.best_start_index);
}

TEST_CASE("fix_delta1 drops the coordinate from fit and standard errors") {
  const auto truth = reference_params();
  const auto series = model_series(truth, kMinutesPerDay, 925);
  FitConfig config;
  config.fix_delta1 = 0.9;
  config.compute_se = true;
  const FitResult result = fit(series, config);
  CHECK(result.params_hat.delta1 == 0.9);
  CHECK(result.fixed_delta1);
  if (result.se_natural.computed) {
    CHECK(result.se_natural.se.size() == 12);
  }
}

TEST_CASE("fit rejects a boundary start with a named parameter") {
  const auto truth = reference_params();
  const auto series = model_series(truth, kMinutesPerDay, 929);
  FitConfig config;
  ModelParams bad = truth;
  bad.emission.pi1 = 1.0;
  config.start = bad;
  CHECK_THROWS_AS(fit(series, config), std::exception);
}
