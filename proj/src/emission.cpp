#include "sleephmm/emission.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sleephmm {

namespace {

void check_nb_params(double mu, double s) {
  if (!std::isfinite(mu) || mu <= 0.0) {
    throw std::domain_error("nb_log_pmf: mu must be positive and finite, got " +
                            std::to_string(mu));
  }
  if (!std::isfinite(s) || s <= 0.0) {
    throw std::domain_error("nb_log_pmf: s must be positive and finite, got " +
                            std::to_string(s));
  }
}

}  // namespace

double poisson_log_pmf(long long y, double mu) {
  if (!std::isfinite(mu) || mu <= 0.0) {
    throw std::domain_error("poisson_log_pmf: mu must be positive and finite");
  }
  if (y < 0) return -std::numeric_limits<double>::infinity();
  const double yd = static_cast<double>(y);
  return yd * std::log(mu) - mu - std::lgamma(yd + 1.0);
}

double nb_log_pmf(long long y, double mu, double s) {
  check_nb_params(mu, s);
  if (y < 0) return -std::numeric_limits<double>::infinity();
  if (s > kSizeCap) return poisson_log_pmf(y, mu);
  const double yd = static_cast<double>(y);
  // log C(y+s-1, y) + s log(s/(s+mu)) + y log(mu/(s+mu)), with the binomial
  // coefficient in log-gamma form and log1p for the s-dependent factor.
  return std::lgamma(yd + s) - std::lgamma(s) - std::lgamma(yd + 1.0) -
         s * std::log1p(mu / s) + yd * (std::log(mu) - std::log(s + mu));
}

double report_log_pmf(Report x, double pi) {
  if (!std::isfinite(pi) || pi <= 0.0 || pi >= 1.0) {
    throw std::domain_error("report_log_pmf: pi must lie strictly inside (0, 1)");
  }
  if (x == kMissingReport) return 0.0;
  if (x == 1) return std::log(pi);
  if (x == 0) return std::log1p(-pi);
  throw std::domain_error("report_log_pmf: x must be 0, 1, or missing");
}

double joint_emission_log(Report x, Count y, int state, const EmissionParams& emission) {
  if (state != 0 && state != 1) {
    throw std::domain_error("joint_emission_log: state must be 0 or 1");
  }
  const double mu = state == 0 ? emission.mu0 : emission.mu1;
  const double s = state == 0 ? emission.s0 : emission.s1;
  const double pi = state == 0 ? emission.pi0 : emission.pi1;
  double lp = report_log_pmf(x, pi);
  if (y != kMissingCount) lp += nb_log_pmf(y, mu, s);
  return lp;
}

}  // namespace sleephmm
