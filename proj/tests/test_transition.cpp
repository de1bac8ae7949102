#include <doctest.h>

#include <cmath>
#include <random>

#include "sleephmm/transition.hpp"

using namespace sleephmm;

TEST_CASE("expit_stable basics and saturation") {
  CHECK(expit_stable(0.0) == 0.5);
  CHECK(expit_stable(2.33) == doctest::Approx(0.9113313367452667).epsilon(1e-12));
  CHECK(expit_stable(-750.0) == 0.0);
  CHECK(expit_stable(750.0) == 1.0);
}

TEST_CASE("expit symmetry and monotonicity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-40.0, 40.0);
  double prev_z = -1e9, prev_v = -1.0;
  for (int rep = 0; rep < 500; ++rep) {
    const double z = unif(rng);
    CHECK(expit_stable(-z) == doctest::Approx(1.0 - expit_stable(z)).epsilon(1e-14));
    CHECK(expit_stable(z) >= 0.0);
    CHECK(expit_stable(z) <= 1.0);
    if (z > prev_z) {
      CHECK(expit_stable(z) >= prev_v);
    }
    prev_z = z;
    prev_v = expit_stable(z);
  }
}

TEST_CASE("log_expit agrees with log of expit and stays finite") {
  for (double z : {-700.0, -30.0, -2.0, 0.0, 2.0, 30.0, 700.0}) {
    CHECK(std::isfinite(log_expit(z)));
    if (z > -30.0) {
      CHECK(log_expit(z) == doctest::Approx(std::log(expit_stable(z))).epsilon(1e-13));
    } else {
      CHECK(log_expit(z) == doctest::Approx(z).epsilon(1e-12));
    }
  }
}

TEST_CASE("zero coefficients give the half-half matrix") {
  TransitionCoeffs coeffs;
  for (long long t : {1LL, 17LL, 1440LL, 9999LL}) {
    const auto m = transition_matrix(t, coeffs);
    for (int i = 0; i < 2; ++i) {
      CHECK(m.p[i][0] == 0.5);
      CHECK(m.p[i][1] == 0.5);
    }
  }
}

TEST_CASE("reference coefficients at the day boundary") {
  TransitionCoeffs coeffs;
  coeffs.alpha = {8.54, -6.21, -5.49};
  coeffs.beta = {7.31, 3.36, 1.06};
  // t = 1440: cos = 1, sin = 0, so logit gamma00 = 8.54 - 6.21
  const auto m = transition_matrix(1440, coeffs);
  CHECK(m.p[0][0] == doctest::Approx(expit_stable(8.54 - 6.21)).epsilon(1e-15));
  CHECK(m.p[0][0] == doctest::Approx(0.9113313367452667).epsilon(1e-12));
  CHECK(m.p[1][1] == doctest::Approx(expit_stable(7.31 + 3.36)).epsilon(1e-15));
}

TEST_CASE("rows sum to one exactly under random coefficients") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  for (int rep = 0; rep < 50; ++rep) {
    TransitionCoeffs coeffs;
    for (auto& a : coeffs.alpha) a = unif(rng);
    for (auto& b : coeffs.beta) b = unif(rng);
    for (long long t = 1; t <= kWeekMinutes; t += 97) {
      const auto m = transition_matrix(t, coeffs);
      CHECK(m.p[0][0] + m.p[0][1] == 1.0);
      CHECK(m.p[1][0] + m.p[1][1] == 1.0);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          CHECK(m.p[i][j] >= 0.0);
          CHECK(m.p[i][j] <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("exact 1440-minute periodicity") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unif(-8.0, 8.0);
  TransitionCoeffs coeffs;
  for (auto& a : coeffs.alpha) a = unif(rng);
  for (auto& b : coeffs.beta) b = unif(rng);
  for (long long t = 1; t <= kWeekMinutes; t += 13) {
    const auto m1 = transition_matrix(t, coeffs);
    const auto m2 = transition_matrix(t + kMinutesPerDay, coeffs);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        CHECK(m1.p[i][j] == m2.p[i][j]);
      }
    }
  }
}

TEST_CASE("gamma00 is monotone in alpha0") {
  TransitionCoeffs coeffs;
  coeffs.alpha = {-4.0, 1.3, -0.7};
  coeffs.beta = {1.0, 0.0, 0.0};
  double prev = -1.0;
  for (double a0 = -6.0; a0 <= 6.0; a0 += 0.25) {
    coeffs.alpha[0] = a0;
    const double g00 = transition_matrix(321, coeffs).p[0][0];
    CHECK(g00 >= prev);
    prev = g00;
  }
}

TEST_CASE("transition_matrix rejects bad input") {
  TransitionCoeffs coeffs;
  CHECK_THROWS_AS(transition_matrix(0, coeffs), std::invalid_argument);
  coeffs.alpha[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(transition_matrix(5, coeffs), std::domain_error);
}
