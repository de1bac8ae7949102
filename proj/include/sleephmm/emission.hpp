#ifndef SLEEPHMM_EMISSION_HPP
#define SLEEPHMM_EMISSION_HPP

#include "sleephmm/types.hpp"

namespace sleephmm {

/// log P(Y = y) for Y ~ NegBin(mean mu, size s), computed through log-gamma
/// so that sizes like 799 or 1e7 do not overflow. For s > kSizeCap the
/// distribution is numerically Poisson(mu) and the Poisson log-pmf is
/// returned instead. Throws std::domain_error on invalid mu or s.
double nb_log_pmf(long long y, double mu, double s);

/// log P(Y = y) for Y ~ Poisson(mu).
double poisson_log_pmf(long long y, double mu);

/// log P(X = x) for X ~ Bernoulli(pi). A missing report contributes log 1 = 0:
/// under MAR the factor is marginalized out. Throws std::domain_error unless
/// pi is strictly inside (0, 1).
double report_log_pmf(Report x, double pi);

/// Joint log-emission of the (self-report, count) pair given the hidden
/// state; the two factors are conditionally independent given the state.
/// A missing count likewise contributes a unit factor.
double joint_emission_log(Report x, Count y, int state, const EmissionParams& emission);

}  // namespace sleephmm

#endif  // SLEEPHMM_EMISSION_HPP
