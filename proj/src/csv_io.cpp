#include "sleephmm/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sleephmm {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

long long parse_int(const std::string& s, const std::string& what, std::size_t line_no) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw CsvError("line " + std::to_string(line_no) + ": " + what + " is not an integer: '" +
                   s + "'");
  }
  return value;
}

double parse_double(const std::string& s, const std::string& what, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CsvError("line " + std::to_string(line_no) + ": " + what + " is not a number: '" + s +
                   "'");
  }
}

}  // namespace

SubjectRecord read_subject_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open input file: " + path);

  SubjectRecord record;
  record.source_path = path;
  record.subject_id = std::filesystem::path(path).stem().string();

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw CsvError(path + ": empty file");
  ++line_no;
  {
    const auto header = split_csv(line);
    if (header.size() != 3 || header[0] != "minute" || header[1] != "activity" ||
        header[2] != "self_report") {
      throw CsvError("line 1: malformed header, expected 'minute,activity,self_report'");
    }
  }

  long long expected_minute = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw CsvError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                     std::to_string(fields.size()));
    }
    const long long minute = parse_int(fields[0], "minute", line_no);
    if (minute != expected_minute) {
      throw CsvError("line " + std::to_string(line_no) + ": non-contiguous minute " +
                     std::to_string(minute) + ", expected " + std::to_string(expected_minute));
    }
    ++expected_minute;

    const long long activity = parse_int(fields[1], "activity", line_no);
    if (activity < 0) {
      throw CsvError("line " + std::to_string(line_no) + ": negative activity count " +
                     std::to_string(activity));
    }
    record.series.activity.push_back(static_cast<Count>(activity));

    const std::string& flag = fields[2];
    if (flag.empty() || flag == "NA") {
      record.series.self_report.push_back(kMissingReport);
    } else if (flag == "0" || flag == "1") {
      record.series.self_report.push_back(flag == "1" ? 1 : 0);
    } else {
      throw CsvError("line " + std::to_string(line_no) +
                     ": self_report must be 0, 1, NA or empty, got '" + flag + "'");
    }
  }
  if (record.series.activity.empty()) throw CsvError(path + ": no data rows");
  record.series.validate();
  return record;
}

void write_subject_csv(const std::string& path, const ObservationSeries& series) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot open output file: " + path);
  out << "minute,activity,self_report\n";
  for (std::size_t t = 0; t < series.length(); ++t) {
    out << t << ',' << series.activity[t] << ',';
    if (series.self_report[t] == kMissingReport) {
      out << "NA";
    } else {
      out << static_cast<int>(series.self_report[t]);
    }
    out << '\n';
  }
}

double missing_fraction(const ObservationSeries& series) {
  std::size_t missing = 0;
  for (Report x : series.self_report) {
    if (x == kMissingReport) ++missing;
  }
  return static_cast<double>(missing) / static_cast<double>(series.length());
}

namespace {

std::array<double, 13> params_as_array(const ModelParams& p) {
  return {p.emission.mu0, p.emission.mu1, p.emission.s0,    p.emission.s1,    p.emission.pi0,
          p.emission.pi1, p.delta1,       p.trans.alpha[0], p.trans.alpha[1], p.trans.alpha[2],
          p.trans.beta[0], p.trans.beta[1], p.trans.beta[2]};
}

void set_param(ModelParams& p, const std::string& name, double value) {
  const auto& names = param_names();
  double* slots[13] = {&p.emission.mu0,  &p.emission.mu1,  &p.emission.s0,  &p.emission.s1,
                       &p.emission.pi0,  &p.emission.pi1,  &p.delta1,       &p.trans.alpha[0],
                       &p.trans.alpha[1], &p.trans.alpha[2], &p.trans.beta[0], &p.trans.beta[1],
                       &p.trans.beta[2]};
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) {
      *slots[i] = value;
      return;
    }
  }
  throw CsvError("unknown parameter name: '" + name + "'");
}

}  // namespace

void write_fit_csv(const std::string& path, const ModelParams& params, const SeResult& se,
                   bool fixed_delta1) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot open output file: " + path);
  out.precision(12);
  out << "parameter,estimate,se\n";
  const auto values = params_as_array(params);
  const auto& names = param_names();
  int k = 0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << names[i] << ',' << values[i] << ',';
    const bool dropped = fixed_delta1 && names[i] == "delta1";
    if (dropped || !se.computed) {
      out << "NA";
    } else {
      const std::size_t j = static_cast<std::size_t>(k);
      out << (j < se.available.size() && se.available[j] ? std::to_string(se.se[j]) : "NA");
    }
    if (!dropped) ++k;
    out << '\n';
  }
}

ModelParams read_params_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open params file: " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw CsvError(path + ": empty params file");
  ++line_no;
  {
    const auto header = split_csv(line);
    if (header.size() < 2 || header[0] != "parameter" || header[1] != "estimate") {
      throw CsvError("line 1: malformed header, expected 'parameter,estimate[,se]'");
    }
  }
  ModelParams params;
  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() < 2) {
      throw CsvError("line " + std::to_string(line_no) + ": expected 'parameter,estimate[,se]'");
    }
    set_param(params, fields[0], parse_double(fields[1], "estimate", line_no));
    seen.push_back(fields[0]);
  }
  for (const auto& name : param_names()) {
    if (std::find(seen.begin(), seen.end(), name) == seen.end()) {
      throw CsvError(path + ": missing parameter '" + name + "'");
    }
  }
  params.validate();
  return params;
}

void write_posterior_csv(const std::string& path, const PosteriorTrace& trace) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot open output file: " + path);
  out.precision(12);
  out << "minute,posterior,viterbi\n";
  for (std::size_t t = 0; t < trace.posterior_sleep.size(); ++t) {
    out << t << ',' << trace.posterior_sleep[t] << ','
        << static_cast<int>(trace.viterbi_path[t]) << '\n';
  }
}

PosteriorRows read_posterior_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open posterior file: " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw CsvError(path + ": empty file");
  ++line_no;
  if (split_csv(line) != std::vector<std::string>{"minute", "posterior", "viterbi"}) {
    throw CsvError("line 1: malformed header, expected 'minute,posterior,viterbi'");
  }
  PosteriorRows rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw CsvError("line " + std::to_string(line_no) + ": expected 3 fields");
    }
    if (parse_int(fields[0], "minute", line_no) !=
        static_cast<long long>(rows.posterior.size())) {
      throw CsvError("line " + std::to_string(line_no) + ": non-contiguous minute");
    }
    rows.posterior.push_back(parse_double(fields[1], "posterior", line_no));
    const long long v = parse_int(fields[2], "viterbi", line_no);
    if (v != 0 && v != 1) {
      throw CsvError("line " + std::to_string(line_no) + ": viterbi state must be 0 or 1");
    }
    rows.viterbi.push_back(static_cast<std::uint8_t>(v));
  }
  return rows;
}

void write_study_csv(const std::string& path, const ScenarioSpec& scenario,
                     const StudySummary& summary) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot open output file: " + path);
  out.precision(12);
  out << "minute,truth,mean_posterior,band_width\n";
  for (std::size_t t = 0; t < summary.mean_posterior.size(); ++t) {
    out << t << ',' << static_cast<int>(scenario.pattern[t]) << ',' << summary.mean_posterior[t]
        << ',' << summary.band_width[t] << '\n';
  }
}

StudyRows read_study_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open study file: " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw CsvError(path + ": empty file");
  ++line_no;
  if (split_csv(line) !=
      std::vector<std::string>{"minute", "truth", "mean_posterior", "band_width"}) {
    throw CsvError("line 1: malformed header, expected 'minute,truth,mean_posterior,band_width'");
  }
  StudyRows rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) {
      throw CsvError("line " + std::to_string(line_no) + ": expected 4 fields");
    }
    if (parse_int(fields[0], "minute", line_no) != static_cast<long long>(rows.truth.size())) {
      throw CsvError("line " + std::to_string(line_no) + ": non-contiguous minute");
    }
    const long long truth = parse_int(fields[1], "truth", line_no);
    if (truth != 0 && truth != 1) {
      throw CsvError("line " + std::to_string(line_no) + ": truth state must be 0 or 1");
    }
    rows.truth.push_back(static_cast<std::uint8_t>(truth));
    rows.mean_posterior.push_back(parse_double(fields[2], "mean_posterior", line_no));
    rows.band_width.push_back(parse_double(fields[3], "band_width", line_no));
  }
  return rows;
}

CliConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open config file: " + path);
  CliConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw CsvError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw CsvError("config line " + std::to_string(line_no) + ": empty key or value");
    }

    if (key == "max_iterations") {
      config.fit.max_iterations = static_cast<int>(parse_int(value, key, line_no));
    } else if (key == "gradient_tolerance") {
      config.fit.gradient_tolerance = parse_double(value, key, line_no);
    } else if (key == "step_tolerance") {
      config.fit.step_tolerance = parse_double(value, key, line_no);
    } else if (key == "fd_step_scale") {
      config.fit.fd_step_scale = parse_double(value, key, line_no);
    } else if (key == "rel_ftol") {
      config.fit.rel_ftol = parse_double(value, key, line_no);
    } else if (key == "multistart") {
      config.fit.multistart = static_cast<int>(parse_int(value, key, line_no));
    } else if (key == "multistart_seed") {
      config.fit.multistart_seed = static_cast<std::uint64_t>(parse_int(value, key, line_no));
    } else if (key == "fix_delta1") {
      config.fit.fix_delta1 = parse_double(value, key, line_no);
    } else if (key == "start_phase") {
      config.start_phase = static_cast<int>(parse_int(value, key, line_no));
    } else if (key == "threshold") {
      config.threshold = parse_double(value, key, line_no);
    } else if (key.rfind("start.", 0) == 0) {
      const std::string name = key.substr(6);
      const auto& names = param_names();
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw CsvError("config line " + std::to_string(line_no) + ": unknown parameter '" +
                       name + "'");
      }
      config.start_overrides.emplace_back(name, parse_double(value, key, line_no));
    } else {
      throw CsvError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return config;
}

ModelParams apply_start_overrides(ModelParams base,
                                  const std::vector<std::pair<std::string, double>>& overrides) {
  for (const auto& [name, value] : overrides) set_param(base, name, value);
  return base;
}

}  // namespace sleephmm
