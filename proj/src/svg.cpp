#include "sleephmm/svg.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace sleephmm {

namespace {

constexpr double kWidth = 1180.0;
constexpr double kPanelHeight = 180.0;
constexpr double kPanelGap = 48.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginTop = 46.0;

struct Panel {
  double y0;            // top of drawing area
  double x_max;         // data range [0, x_max)
  double y_min, y_max;  // data range mapped bottom-to-top

  double px(double x) const {
    return kMarginLeft + (kWidth - kMarginLeft - 20.0) * (x / x_max);
  }
  double py(double y) const {
    const double f = (y - y_min) / (y_max - y_min);
    return y0 + kPanelHeight * (1.0 - f);
  }
};

void panel_frame(std::ofstream& out, const Panel& p, const std::string& label,
                 std::size_t n_minutes) {
  out << "<text x=\"" << kMarginLeft << "\" y=\"" << p.y0 - 8 << "\" font-size=\"13\" "
      << "font-family=\"sans-serif\">" << label << "</text>\n";
  out << "<rect x=\"" << p.px(0.0) << "\" y=\"" << p.y0 << "\" width=\""
      << p.px(p.x_max) - p.px(0.0) << "\" height=\"" << kPanelHeight
      << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  // day gridlines
  for (std::size_t d = kMinutesPerDay; d < n_minutes; d += kMinutesPerDay) {
    const double x = p.px(static_cast<double>(d));
    out << "<line x1=\"" << x << "\" y1=\"" << p.y0 << "\" x2=\"" << x << "\" y2=\""
        << p.y0 + kPanelHeight << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
  }
}

void polyline(std::ofstream& out, const Panel& p, const std::vector<double>& values,
              const std::string& color) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
  for (std::size_t t = 0; t < values.size(); ++t) {
    out << p.px(static_cast<double>(t)) << ',' << p.py(values[t]) << ' ';
  }
  out << "\"/>\n";
}

void step_polyline(std::ofstream& out, const Panel& p, const std::vector<std::uint8_t>& states,
                   const std::string& color) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
  for (std::size_t t = 0; t < states.size(); ++t) {
    const double y = p.py(states[t] ? 1.0 : 0.0);
    out << p.px(static_cast<double>(t)) << ',' << y << ' ';
    out << p.px(static_cast<double>(t + 1)) << ',' << y << ' ';
  }
  out << "\"/>\n";
}

std::ofstream open_svg(const std::string& path, double height) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out.precision(6);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << height << "\" viewBox=\"0 0 " << kWidth << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out;
}

void title_text(std::ofstream& out, const std::string& title, const std::string& warning) {
  out << "<text x=\"" << kMarginLeft << "\" y=\"22\" font-size=\"16\" "
      << "font-family=\"sans-serif\" font-weight=\"bold\">" << title << "</text>\n";
  if (!warning.empty()) {
    out << "<text x=\"" << kWidth - 20 << "\" y=\"22\" font-size=\"14\" text-anchor=\"end\" "
        << "font-family=\"sans-serif\" fill=\"#c00\" font-weight=\"bold\">" << warning
        << "</text>\n";
  }
}

}  // namespace

void write_fit_svg(const std::string& path, const ObservationSeries& series,
                   const PosteriorTrace& trace, const std::string& title,
                   const std::string& warning) {
  const std::size_t T = series.length();
  const double height = kMarginTop + 3 * (kPanelHeight + kPanelGap);
  auto out = open_svg(path, height);
  title_text(out, title, warning);

  Count max_y = 1;
  for (Count y : series.activity) max_y = std::max(max_y, y);

  Panel activity{kMarginTop + kPanelGap, static_cast<double>(T), 0.0,
                 static_cast<double>(max_y)};
  panel_frame(out, activity, "activity counts", T);
  std::vector<double> counts(T);
  for (std::size_t t = 0; t < T; ++t) {
    counts[t] = series.activity[t] == kMissingCount ? 0.0
                                                    : static_cast<double>(series.activity[t]);
  }
  polyline(out, activity, counts, "#444");

  Panel raster{activity.y0 + kPanelHeight + kPanelGap, static_cast<double>(T), 0.0, 1.0};
  panel_frame(out, raster, "self-report (dark = asleep, light = awake, gray = missing)", T);
  // contiguous same-valued runs drawn as single rects
  std::size_t begin = 0;
  for (std::size_t t = 1; t <= T; ++t) {
    if (t == T || series.self_report[t] != series.self_report[begin]) {
      const Report x = series.self_report[begin];
      const std::string fill = x == kMissingReport ? "#bbb" : (x == 1 ? "#2b5f9e" : "#dce8f5");
      out << "<rect x=\"" << raster.px(static_cast<double>(begin)) << "\" y=\"" << raster.y0
          << "\" width=\""
          << raster.px(static_cast<double>(t)) - raster.px(static_cast<double>(begin))
          << "\" height=\"" << kPanelHeight << "\" fill=\"" << fill << "\"/>\n";
      begin = t;
    }
  }

  Panel posterior{raster.y0 + kPanelHeight + kPanelGap, static_cast<double>(T), 0.0, 1.0};
  panel_frame(out, posterior, "posterior probability of sleep", T);
  polyline(out, posterior, trace.posterior_sleep, "#b03030");

  out << "</svg>\n";
}

void write_study_svg(const std::string& path, const ScenarioSpec& scenario,
                     const StudySummary& summary, const std::string& title) {
  const std::size_t T = summary.mean_posterior.size();
  const double height = kMarginTop + 3 * (kPanelHeight + kPanelGap);
  auto out = open_svg(path, height);
  title_text(out, title, "");

  Panel truth{kMarginTop + kPanelGap, static_cast<double>(T), 0.0, 1.0};
  panel_frame(out, truth, "fixed sleep pattern", T);
  step_polyline(out, truth, scenario.pattern, "#333");

  Panel mean{truth.y0 + kPanelHeight + kPanelGap, static_cast<double>(T), 0.0, 1.0};
  panel_frame(out, mean, "mean posterior probability of sleep", T);
  polyline(out, mean, summary.mean_posterior, "#2b5f9e");

  const double band_max = std::max(0.01, summary.max_band_width * 1.1);
  Panel band{mean.y0 + kPanelHeight + kPanelGap, static_cast<double>(T), 0.0, band_max};
  panel_frame(out, band, "95% confidence band width of the mean posterior", T);
  polyline(out, band, summary.band_width, "#b03030");

  out << "</svg>\n";
}

}  // namespace sleephmm
