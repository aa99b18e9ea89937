#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "neuroevo/core_model.hpp"
#include "neuroevo/data.hpp"
#include "neuroevo/errors.hpp"
#include "neuroevo/evolution.hpp"
#include "neuroevo/run_config.hpp"
#include "neuroevo/sampling.hpp"

namespace neuroevo {

inline constexpr const char* kToolVersion = "1.0.0";

// Keras-style layer list: one LSTM record per hidden layer, then a Dense head.
inline Json export_model_config(const Solution& sol) {
  const Architecture& arch = sol.architecture;
  check_architecture(arch);
  Json layers = Json::array();
  const std::size_t hidden = arch.hidden_count();
  for (std::size_t i = 0; i < hidden; ++i) {
    Json cfg;
    cfg["activation"] = "tanh";
    cfg["units"] = arch.hidden_width(i);
    cfg["return_sequences"] = i + 1 < hidden;
    layers.push_back(Json{{"class_name", "LSTM"}, {"config", cfg}});
  }
  Json dense;
  dense["activation"] = "linear";
  dense["units"] = arch.output_dim();
  layers.push_back(Json{{"class_name", "Dense"}, {"config", dense}});
  return layers;
}

// Diagnostic-stream logger; level 1 = progress, level 2 = per-evaluation detail.
class Logger {
 public:
  Logger(std::ostream& out, int verbosity) : out_(out), verbosity_(verbosity) {}
  int verbosity() const { return verbosity_; }
  void log(int level, const std::string& line) const {
    if (verbosity_ >= level) out_ << line << '\n';
  }

 private:
  std::ostream& out_;
  int verbosity_;
};

class Action {
 public:
  virtual ~Action() = default;
  virtual std::string name() const = 0;
  // Throws ConfigError for problems the user can fix in the config.
  virtual void validate(const RunConfig&) const {}
  virtual Json execute(const RunConfig& cfg, const Logger& log) const = 0;
};

class ActionRegistry {
 public:
  void add(std::unique_ptr<Action> action) {
    auto key = action->name();
    actions_[key] = std::move(action);
  }
  const Action* find(const std::string& name) const {
    auto it = actions_.find(name);
    return it == actions_.end() ? nullptr : it->second.get();
  }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : actions_) out.push_back(k);
    return out;
  }

 private:
  std::map<std::string, std::unique_ptr<Action>> actions_;
};

namespace detail {

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

inline std::string layers_str(const std::vector<int>& v) {
  std::vector<std::string> s;
  for (int x : v) s.push_back(std::to_string(x));
  return "[" + join(s, ",") + "]";
}

inline TimeSeriesDataset training_series(const RunConfig& cfg) {
  return chronological_split(build_series(cfg.data), cfg.data.train_fraction).train;
}

inline Json data_block(const DataConfig& d) {
  Json j;
  if (d.source == DataConfig::Source::kFile) {
    j["source"] = "file";
    j["path"] = d.path;
  } else {
    j["source"] = "sine";
    j["n"] = d.sine.n;
    j["period"] = d.sine.period;
    j["amplitude"] = d.sine.amplitude;
    j["phase"] = d.sine.phase;
    j["noise_std"] = d.sine.noise_std;
  }
  j["train_fraction"] = d.train_fraction;
  return j;
}

}  // namespace detail

class MaeSamplingAction : public Action {
 public:
  std::string name() const override { return "mae-random-sampling"; }

  void validate(const RunConfig& cfg) const override {
    if (!cfg.architecture) throw ConfigError("action mae-random-sampling needs config.architecture and look_back");
  }

  Json execute(const RunConfig& cfg, const Logger& log) const override {
    const TimeSeriesDataset series = detail::training_series(cfg);
    SearchSpace space = cfg.space;
    space.input_dim = space.output_dim = static_cast<int>(series.features());
    const Architecture& arch = *cfg.architecture;
    if (auto v = validate_architecture(arch, space); !v.empty()) {
      throw ConfigError("architecture outside search space: " + detail::join(v, "; "));
    }
    if (static_cast<std::size_t>(arch.look_back) >= series.steps()) {
      throw ConfigError("look_back " + std::to_string(arch.look_back) + " must be < training length " +
                        std::to_string(series.steps()));
    }
    log.log(1, "mae-random-sampling: architecture " + detail::layers_str(arch.layer_sizes) + " look_back " +
                   std::to_string(arch.look_back) + ", " + std::to_string(cfg.sampling.n_samples) + " samples");
    SamplingOptions opt;
    opt.workers = cfg.workers;
    opt.weight_stddev = cfg.sampling.weight_stddev;
    const auto stats = mae_random_sampling(arch, window(series, static_cast<std::size_t>(arch.look_back)),
                                           cfg.sampling.n_samples, cfg.sampling.threshold, cfg.seed, opt);
    for (std::size_t i = 0; i < stats.samples.size(); ++i) {
      log.log(1, "sample " + std::to_string(i) + " mae=" + detail::fmt_double(stats.samples[i]));
    }
    log.log(1, "fit mu=" + detail::fmt_double(stats.trunc_mu) + " sigma=" + detail::fmt_double(stats.trunc_sigma) +
                   " log_p=" + detail::fmt_double(stats.log_p));

    Json doc;
    doc["look_back"] = arch.look_back;
    doc["architecture"] = arch.layer_sizes;
    Json metrics;
    metrics["log_p"] = stats.log_p;
    metrics["p"] = stats.p;
    metrics["mean"] = stats.mean;
    metrics["samples"] = stats.samples;
    metrics["std"] = stats.std;
    doc["metrics"] = metrics;
    Json run;
    run["action"] = name();
    run["tool_version"] = kToolVersion;
    run["seed"] = cfg.seed;
    run["n_samples"] = cfg.sampling.n_samples;
    run["threshold"] = cfg.sampling.threshold;
    run["weight_stddev"] = cfg.sampling.weight_stddev;
    run["trunc_mu"] = stats.trunc_mu;
    run["trunc_sigma"] = stats.trunc_sigma;
    run["data"] = detail::data_block(cfg.data);
    doc["run"] = run;
    return doc;
  }
};

class ArchitectureOptimizationAction : public Action {
 public:
  std::string name() const override { return "architecture-optimization"; }

  Json execute(const RunConfig& cfg, const Logger& log) const override {
    SamplingProblem problem{detail::training_series(cfg), cfg.evolution.samples_per_evaluation,
                            cfg.evolution.threshold, SamplingOptions{1, cfg.sampling.weight_stddev}};
    EvolutionConfig ec = cfg.evolution;
    ec.space.input_dim = ec.space.output_dim = static_cast<int>(problem.series.features());
    if (static_cast<std::size_t>(ec.space.max_look_back) >= problem.series.steps()) {
      throw ConfigError("space.max_look_back must be < training length " + std::to_string(problem.series.steps()));
    }

    EvolutionObserver obs;
    obs.on_generation = [&](const GenerationRecord& r) {
      log.log(1, "generation " + std::to_string(r.generation) + " best_log_p=" + detail::fmt_double(r.best_log_p) +
                     " mean_log_p=" + detail::fmt_double(r.mean_log_p) +
                     " evaluations=" + std::to_string(r.evaluations_used));
    };
    obs.on_evaluation = [&](const Architecture& a, const Metrics& m) {
      log.log(2, "  eval " + detail::layers_str(a.layer_sizes) + " look_back=" + std::to_string(a.look_back) +
                     " log_p=" + detail::fmt_double(m.at("log_p")) + " mean=" + detail::fmt_double(m.at("mean")));
    };
    const auto res = evolve_architecture(problem, ec, obs);

    Json doc;
    doc["fitness"] = Json{{"log_p", solution_fitness(res.best, "log_p")}};
    doc["layers"] = res.best.architecture.layer_sizes;
    doc["look_back"] = res.best.architecture.look_back;
    doc["config"] = export_model_config(res.best);
    Json history = Json::array();
    for (const auto& r : res.history) {
      history.push_back(Json{{"generation", r.generation},
                             {"best_log_p", r.best_log_p},
                             {"mean_log_p", r.mean_log_p},
                             {"evaluations_used", r.evaluations_used}});
    }
    doc["history"] = history;
    Json run;
    run["action"] = name();
    run["tool_version"] = kToolVersion;
    run["seed"] = cfg.seed;
    run["evaluations"] = res.evaluations;
    run["population_size"] = ec.population_size;
    run["offspring_per_generation"] = ec.offspring_per_generation;
    run["max_evaluations"] = ec.max_evaluations;
    run["tournament_size"] = ec.tournament_size;
    run["elitism_count"] = ec.elitism_count;
    run["p_resize_layer"] = ec.p_resize_layer;
    run["p_add_layer"] = ec.p_add_layer;
    run["p_remove_layer"] = ec.p_remove_layer;
    run["neuron_mutation_sigma"] = ec.neuron_mutation_sigma;
    run["look_back_step"] = ec.look_back_step;
    run["crossover_enabled"] = ec.crossover_enabled;
    run["samples_per_evaluation"] = ec.samples_per_evaluation;
    run["threshold"] = ec.threshold;
    run["weight_stddev"] = cfg.sampling.weight_stddev;
    run["data"] = detail::data_block(cfg.data);
    doc["run"] = run;
    return doc;
  }
};

inline ActionRegistry default_registry() {
  ActionRegistry r;
  r.add(std::make_unique<MaeSamplingAction>());
  r.add(std::make_unique<ArchitectureOptimizationAction>());
  return r;
}

// Exit codes: 0 success, 1 usage/config/validation error, 2 runtime error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               const ActionRegistry& registry) {
  CLI::App app{"Training-free recurrent architecture evaluation and search", "neuroevo"};
  std::string config_path;
  int verbose = 0;
  std::size_t workers_override = 0;
  app.add_option("--config", config_path, "Run configuration (JSON)")->required();
  app.add_option("--verbose", verbose, "0 = quiet, 1 = progress, 2 = per-evaluation detail")
      ->check(CLI::Range(0, 2));
  auto* workers_opt = app.add_option("--workers", workers_override, "Override config.workers (0 = all cores)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  Logger log(err, verbose);
  RunConfig cfg;
  const Action* action = nullptr;
  try {
    cfg = load_run_config(config_path);
    if (*workers_opt) cfg.workers = cfg.evolution.workers = workers_override;
    action = registry.find(cfg.action);
    if (!action) {
      throw ConfigError("unknown action '" + cfg.action + "'; registered actions: " +
                        detail::join(registry.names(), ", "));
    }
    action->validate(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    const Json doc = action->execute(cfg, log);
    const std::string text = doc.dump(2) + "\n";
    if (cfg.output_path) {
      std::filesystem::path p = *cfg.output_path;
      if (p.is_relative()) p = std::filesystem::path(config_path).parent_path() / p;
      std::ofstream f(p);
      if (!f || !(f << text)) throw Error("cannot write output file '" + p.string() + "'");
      log.log(1, "wrote " + p.string());
    } else {
      out << text;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(args, out, err, default_registry());
}

}  // namespace neuroevo
