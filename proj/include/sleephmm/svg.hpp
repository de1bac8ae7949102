#ifndef SLEEPHMM_SVG_HPP
#define SLEEPHMM_SVG_HPP

#include <string>

#include "sleephmm/inference.hpp"
#include "sleephmm/simulation.hpp"
#include "sleephmm/types.hpp"

namespace sleephmm {

/// Three stacked panels: activity trace, self-report raster, posterior
/// sleep probability. The warning string, when non-empty, is drawn as a
/// banner across the top.
void write_fit_svg(const std::string& path, const ObservationSeries& series,
                   const PosteriorTrace& trace, const std::string& title,
                   const std::string& warning = "");

/// Three stacked panels: fixed truth pattern, mean posterior, band width.
void write_study_svg(const std::string& path, const ScenarioSpec& scenario,
                     const StudySummary& summary, const std::string& title);

}  // namespace sleephmm

#endif  // SLEEPHMM_SVG_HPP
