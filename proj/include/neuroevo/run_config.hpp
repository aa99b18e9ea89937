#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "neuroevo/architecture.hpp"
#include "neuroevo/data.hpp"
#include "neuroevo/errors.hpp"
#include "neuroevo/evolution.hpp"

namespace neuroevo {

using Json = nlohmann::ordered_json;

struct DataConfig {
  enum class Source { kSine, kFile };
  Source source = Source::kSine;
  SineParams sine;
  std::string path;  // resolved against the config file's directory
  double train_fraction = 0.7;
};

struct SamplingConfig {
  std::size_t n_samples = 100;
  double threshold = 0.01;
  double weight_stddev = 1.0;
};

struct RunConfig {
  std::string action;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::optional<std::string> output_path;
  DataConfig data;
  std::optional<Architecture> architecture;
  SearchSpace space;
  SamplingConfig sampling;
  EvolutionConfig evolution;
};

namespace detail {

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_as(const Json& obj, const std::string& key, const std::string& where, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError("");
      if constexpr (std::is_unsigned_v<T>) {
        if (it->is_number_integer() && !it->is_number_unsigned() && it->template get<long long>() < 0) {
          throw ConfigError("");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError("");
    } else {
      if (!it->is_string()) throw ConfigError("");
    }
    return it->template get<T>();
  } catch (const std::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type or range");
  }
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace detail

inline SearchSpace parse_space(const Json& j, SearchSpace s) {
  detail::reject_unknown(j, {"min_hidden_layers", "max_hidden_layers", "min_neurons", "max_neurons",
                             "min_look_back", "max_look_back"},
                         "space");
  s.min_hidden_layers = detail::get_as<int>(j, "min_hidden_layers", "space", s.min_hidden_layers);
  s.max_hidden_layers = detail::get_as<int>(j, "max_hidden_layers", "space", s.max_hidden_layers);
  s.min_neurons = detail::get_as<int>(j, "min_neurons", "space", s.min_neurons);
  s.max_neurons = detail::get_as<int>(j, "max_neurons", "space", s.max_neurons);
  s.min_look_back = detail::get_as<int>(j, "min_look_back", "space", s.min_look_back);
  s.max_look_back = detail::get_as<int>(j, "max_look_back", "space", s.max_look_back);
  return s;
}

// Parses and validates a config document. `base_dir` anchors relative data paths.
inline RunConfig parse_run_config(const Json& j, const std::filesystem::path& base_dir = {}) {
  using detail::get_as;
  using detail::require;
  detail::reject_unknown(j, {"action", "seed", "workers", "output_path", "data", "architecture", "look_back",
                             "space", "sampling", "evolution"},
                         "config");
  RunConfig c;
  require(j.contains("action") && j["action"].is_string(), "config.action (string) is required");
  c.action = j["action"].get<std::string>();
  c.seed = get_as<std::uint64_t>(j, "seed", "config", 0);
  c.workers = get_as<std::size_t>(j, "workers", "config", 0);
  if (j.contains("output_path")) c.output_path = get_as<std::string>(j, "output_path", "config", "");

  if (j.contains("data")) {
    const Json& d = j["data"];
    detail::reject_unknown(d, {"source", "n", "period", "amplitude", "phase", "noise_std", "seed", "path",
                               "train_fraction"},
                           "data");
    const auto source = get_as<std::string>(d, "source", "data", "sine");
    c.data.train_fraction = get_as<double>(d, "train_fraction", "data", 0.7);
    require(c.data.train_fraction > 0.0 && c.data.train_fraction < 1.0, "data.train_fraction must lie in (0, 1)");
    if (source == "sine") {
      auto& s = c.data.sine;
      s.n = get_as<std::size_t>(d, "n", "data", s.n);
      s.period = get_as<double>(d, "period", "data", s.period);
      s.amplitude = get_as<double>(d, "amplitude", "data", s.amplitude);
      s.phase = get_as<double>(d, "phase", "data", s.phase);
      s.noise_std = get_as<double>(d, "noise_std", "data", s.noise_std);
      s.seed = get_as<std::uint64_t>(d, "seed", "data", c.seed);
      require(s.n >= 4, "data.n must be >= 4");
      require(s.period > 0.0, "data.period must be positive");
      require(s.amplitude > 0.0, "data.amplitude must be positive");
      require(s.noise_std >= 0.0, "data.noise_std must be >= 0");
    } else if (source == "file") {
      c.data.source = DataConfig::Source::kFile;
      require(d.contains("path"), "data.path is required when data.source is \"file\"");
      std::filesystem::path p = get_as<std::string>(d, "path", "data", "");
      c.data.path = (p.is_relative() && !base_dir.empty() ? base_dir / p : p).string();
    } else {
      throw ConfigError("data.source must be \"sine\" or \"file\", got \"" + source + "\"");
    }
  } else {
    c.data.sine.seed = c.seed;
  }

  if (j.contains("architecture")) {
    const Json& a = j["architecture"];
    require(a.is_array(), "config.architecture must be an integer array");
    Architecture arch;
    for (const auto& v : a) {
      require(v.is_number_integer(), "config.architecture must be an integer array");
      arch.layer_sizes.push_back(v.get<int>());
    }
    arch.look_back = get_as<int>(j, "look_back", "config", 1);
    require(j.contains("look_back"), "config.look_back is required with config.architecture");
    require(arch.layer_sizes.size() >= 3, "config.architecture needs at least one hidden layer");
    for (int s : arch.layer_sizes) require(s >= 1, "config.architecture entries must be >= 1");
    require(arch.look_back >= 1, "config.look_back must be >= 1");
    c.architecture = arch;
  } else {
    require(!j.contains("look_back"), "config.look_back given without config.architecture");
  }

  if (j.contains("space")) c.space = parse_space(j["space"], c.space);
  if (auto errs = space_errors(c.space); !errs.empty()) throw ConfigError("space: " + errs.front());

  if (j.contains("sampling")) {
    const Json& s = j["sampling"];
    detail::reject_unknown(s, {"n_samples", "threshold", "weight_stddev"}, "sampling");
    c.sampling.n_samples = get_as<std::size_t>(s, "n_samples", "sampling", c.sampling.n_samples);
    c.sampling.threshold = get_as<double>(s, "threshold", "sampling", c.sampling.threshold);
    c.sampling.weight_stddev = get_as<double>(s, "weight_stddev", "sampling", c.sampling.weight_stddev);
  }
  require(c.sampling.n_samples >= 2, "sampling.n_samples must be >= 2");
  require(c.sampling.threshold > 0.0, "sampling.threshold must be positive");
  require(c.sampling.weight_stddev > 0.0, "sampling.weight_stddev must be positive");

  EvolutionConfig& e = c.evolution;
  if (j.contains("evolution")) {
    const Json& ev = j["evolution"];
    detail::reject_unknown(ev, {"population_size", "offspring_per_generation", "max_evaluations",
                                "tournament_size", "elitism_count", "p_resize_layer", "p_add_layer",
                                "p_remove_layer", "neuron_mutation_sigma", "look_back_step", "crossover_enabled",
                                "samples_per_evaluation", "threshold", "stall_generations"},
                           "evolution");
    const std::string w = "evolution";
    e.population_size = get_as<std::size_t>(ev, "population_size", w, e.population_size);
    e.offspring_per_generation = get_as<std::size_t>(ev, "offspring_per_generation", w, e.offspring_per_generation);
    e.max_evaluations = get_as<std::size_t>(ev, "max_evaluations", w, e.max_evaluations);
    e.tournament_size = get_as<std::size_t>(ev, "tournament_size", w, e.tournament_size);
    e.elitism_count = get_as<std::size_t>(ev, "elitism_count", w, e.elitism_count);
    e.p_resize_layer = get_as<double>(ev, "p_resize_layer", w, e.p_resize_layer);
    e.p_add_layer = get_as<double>(ev, "p_add_layer", w, e.p_add_layer);
    e.p_remove_layer = get_as<double>(ev, "p_remove_layer", w, e.p_remove_layer);
    e.neuron_mutation_sigma = get_as<double>(ev, "neuron_mutation_sigma", w, e.neuron_mutation_sigma);
    e.look_back_step = get_as<int>(ev, "look_back_step", w, e.look_back_step);
    e.crossover_enabled = get_as<bool>(ev, "crossover_enabled", w, e.crossover_enabled);
    e.samples_per_evaluation = get_as<std::size_t>(ev, "samples_per_evaluation", w, e.samples_per_evaluation);
    e.threshold = get_as<double>(ev, "threshold", w, e.threshold);
    e.stall_generations = get_as<std::size_t>(ev, "stall_generations", w, e.stall_generations);
  }
  e.seed = c.seed;
  e.space = c.space;
  e.workers = c.workers;
  if (auto errs = config_errors(e); !errs.empty()) throw ConfigError("evolution: " + errs.front());
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed config '" + path + "': " + e.what());
  }
  return parse_run_config(j, std::filesystem::path(path).parent_path());
}

// The series a run operates on (before any train/test split).
inline TimeSeriesDataset build_series(const DataConfig& d) {
  if (d.source == DataConfig::Source::kFile) return load_series(d.path);
  return generate_sine(d.sine);
}

}  // namespace neuroevo
