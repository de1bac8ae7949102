#include "sleephmm/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sleephmm {

void ObservationSeries::validate() const {
  if (activity.empty()) {
    throw std::invalid_argument("ObservationSeries: length must be >= 1");
  }
  if (activity.size() != self_report.size()) {
    throw std::invalid_argument(
        "ObservationSeries: activity has " + std::to_string(activity.size()) +
        " entries but self_report has " + std::to_string(self_report.size()));
  }
  if (start_phase < 0 || start_phase >= kMinutesPerDay) {
    throw std::invalid_argument("ObservationSeries: start_phase must be in [0, 1440)");
  }
  for (std::size_t t = 0; t < activity.size(); ++t) {
    if (activity[t] < 0 && activity[t] != kMissingCount) {
      throw std::invalid_argument("ObservationSeries: negative activity count at index " +
                                  std::to_string(t));
    }
    const Report x = self_report[t];
    if (x != 0 && x != 1 && x != kMissingReport) {
      throw std::invalid_argument("ObservationSeries: self_report out of {0,1,missing} at index " +
                                  std::to_string(t));
    }
  }
}

double EmissionParams::count_variance(int state) const {
  const double mu = state == 0 ? mu0 : mu1;
  const double s = state == 0 ? s0 : s1;
  return mu * (1.0 + mu / s);
}

namespace {

void require_positive_finite(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
}

void require_open_unit(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0 || v >= 1.0) {
    throw std::invalid_argument(std::string(name) + " must lie strictly inside (0, 1)");
  }
}

}  // namespace

void EmissionParams::validate() const {
  require_positive_finite(mu0, "mu0");
  require_positive_finite(mu1, "mu1");
  require_positive_finite(s0, "s0");
  require_positive_finite(s1, "s1");
  require_open_unit(pi0, "pi0");
  require_open_unit(pi1, "pi1");
}

void TransitionCoeffs::validate() const {
  for (double a : alpha) {
    if (!std::isfinite(a)) throw std::invalid_argument("alpha coefficients must be finite");
  }
  for (double b : beta) {
    if (!std::isfinite(b)) throw std::invalid_argument("beta coefficients must be finite");
  }
}

void ModelParams::validate() const {
  emission.validate();
  trans.validate();
  if (!std::isfinite(delta1) || delta1 < 0.0 || delta1 > 1.0) {
    throw std::invalid_argument("delta1 must lie in [0, 1]");
  }
}

}  // namespace sleephmm
