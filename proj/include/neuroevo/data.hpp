#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "neuroevo/errors.hpp"

namespace neuroevo {

// T x F row-major series.
class TimeSeriesDataset {
 public:
  TimeSeriesDataset(std::vector<double> values, std::size_t features)
      : values_(std::move(values)), features_(features) {
    if (features_ == 0) throw InvalidArgument("series needs at least one feature");
    if (values_.size() % features_ != 0) throw ShapeError("series values not a multiple of feature count");
    if (steps() < 2) throw InvalidArgument("series needs at least 2 time steps");
    for (double v : values_) {
      if (std::isnan(v)) throw InvalidArgument("series contains missing values");
    }
  }

  std::size_t steps() const { return values_.size() / features_; }
  std::size_t features() const { return features_; }
  double at(std::size_t t, std::size_t f) const { return values_[t * features_ + f]; }
  std::span<const double> row(std::size_t t) const {
    return {values_.data() + t * features_, features_};
  }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
  std::size_t features_;
};

// inputs: N x look_back x F, targets: N x F, both row-major.
class WindowedDataset {
 public:
  WindowedDataset(std::vector<double> inputs, std::vector<double> targets, std::size_t look_back,
                  std::size_t features)
      : inputs_(std::move(inputs)), targets_(std::move(targets)), look_back_(look_back),
        features_(features) {
    if (look_back_ == 0 || features_ == 0) throw InvalidArgument("look_back and features must be >= 1");
    if (targets_.size() % features_ != 0 || inputs_.size() != size() * look_back_ * features_) {
      throw ShapeError("windowed inputs/targets sizes are inconsistent");
    }
  }

  std::size_t size() const { return targets_.size() / features_; }
  std::size_t look_back() const { return look_back_; }
  std::size_t features() const { return features_; }

  // Time step `s` of window `i`.
  std::span<const double> input(std::size_t i, std::size_t s) const {
    return {inputs_.data() + (i * look_back_ + s) * features_, features_};
  }
  std::span<const double> target(std::size_t i) const {
    return {targets_.data() + i * features_, features_};
  }
  const std::vector<double>& inputs() const { return inputs_; }
  const std::vector<double>& targets() const { return targets_; }

 private:
  std::vector<double> inputs_;
  std::vector<double> targets_;
  std::size_t look_back_;
  std::size_t features_;
};

struct SineParams {
  std::size_t n = 1000;
  double period = 100.0;
  double amplitude = 1.0;
  double phase = 0.0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

inline TimeSeriesDataset generate_sine(const SineParams& p) {
  if (p.n < 2) throw InvalidArgument("sine series needs n >= 2");
  if (!(p.period > 0.0)) throw InvalidArgument("sine period must be positive");
  if (!(p.amplitude > 0.0)) throw InvalidArgument("sine amplitude must be positive");
  if (!(p.noise_std >= 0.0)) throw InvalidArgument("sine noise_std must be >= 0");
  std::vector<double> v(p.n);
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t t = 0; t < p.n; ++t) {
    v[t] = p.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / p.period + p.phase);
    if (p.noise_std > 0.0) v[t] += p.noise_std * noise(rng);
  }
  return TimeSeriesDataset(std::move(v), 1);
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_number(const std::string& text, double& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}

}  // namespace detail

// Comma-delimited text, one row per time step. A first row containing any
// non-numeric field is treated as a header. Blank lines are ignored.
inline TimeSeriesDataset parse_series(std::istream& in) {
  std::vector<double> values;
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    std::vector<double> parsed(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!detail::parse_number(fields[i], parsed[i])) {
        numeric = false;
        break;
      }
    }
    if (first) {
      first = false;
      columns = fields.size();
      if (!numeric) continue;
    }
    if (fields.size() != columns) {
      throw ParseError("ragged rows: row " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " columns, expected " + std::to_string(columns));
    }
    if (!numeric) throw ParseError("non-numeric value in row " + std::to_string(line_no));
    values.insert(values.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  if (rows == 0) throw ParseError("empty series file");
  if (rows < 2) throw ParseError("series file needs at least 2 rows, got " + std::to_string(rows));
  return TimeSeriesDataset(std::move(values), columns);
}

inline TimeSeriesDataset load_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open series file '" + path + "'");
  return parse_series(in);
}

inline WindowedDataset window(const TimeSeriesDataset& data, std::size_t look_back) {
  const std::size_t t_len = data.steps();
  if (look_back == 0) throw InvalidArgument("look_back must be >= 1");
  if (look_back >= t_len) {
    throw InvalidArgument("look_back " + std::to_string(look_back) + " must be < series length " +
                          std::to_string(t_len));
  }
  const std::size_t f = data.features();
  const std::size_t n = t_len - look_back;
  std::vector<double> inputs;
  std::vector<double> targets;
  inputs.reserve(n * look_back * f);
  targets.reserve(n * f);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < look_back; ++s) {
      const auto r = data.row(i + s);
      inputs.insert(inputs.end(), r.begin(), r.end());
    }
    const auto r = data.row(i + look_back);
    targets.insert(targets.end(), r.begin(), r.end());
  }
  return WindowedDataset(std::move(inputs), std::move(targets), look_back, f);
}

// Chronological split: first round(fraction*T) steps train, remainder test.
struct TrainTestSplit {
  TimeSeriesDataset train;
  TimeSeriesDataset test;
};

inline TrainTestSplit chronological_split(const TimeSeriesDataset& data, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train_fraction must lie in (0, 1)");
  }
  const std::size_t t_len = data.steps();
  const auto cut = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(t_len)));
  if (cut < 2 || t_len - cut < 2) throw InvalidArgument("split leaves fewer than 2 steps on one side");
  const std::size_t f = data.features();
  const auto& v = data.values();
  return {TimeSeriesDataset({v.begin(), v.begin() + static_cast<std::ptrdiff_t>(cut * f)}, f),
          TimeSeriesDataset({v.begin() + static_cast<std::ptrdiff_t>(cut * f), v.end()}, f)};
}

}  // namespace neuroevo
