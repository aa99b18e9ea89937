#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "neuroevo/cli.hpp"

using namespace neuroevo;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::vector<std::string>& args, const ActionRegistry& registry = default_registry()) {
  std::ostringstream out, err;
  const int code = run(args, out, err, registry);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("neuroevo_cli_" + std::to_string(::getpid()) + "_" +
                                                 std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::set<std::string> keys(const Json& j) {
  std::set<std::string> out;
  for (const auto& [k, v] : j.items()) out.insert(k);
  return out;
}

const std::string kSmallSampling = R"({
  "action": "mae-random-sampling",
  "seed": 7,
  "data": {"source": "sine", "n": 300, "period": 50},
  "architecture": [1, 2, 2, 1],
  "look_back": 2,
  "sampling": {"n_samples": 20, "threshold": 0.01}
})";

}  // namespace

TEST(ExportModelConfig, ListingThreeArchitecture) {
  Architecture a;
  a.layer_sizes = {1, 12, 13, 9, 10, 12, 6, 1};
  a.look_back = 17;
  const Json cfg = export_model_config(Solution{a, std::nullopt, {{"log_p", -12.215031852558125}}});
  ASSERT_EQ(cfg.size(), 7u);
  const std::vector<int> units{12, 13, 9, 10, 12, 6};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(cfg[i]["class_name"], "LSTM");
    EXPECT_EQ(cfg[i]["config"]["units"], units[i]);
    EXPECT_EQ(cfg[i]["config"]["activation"], "tanh");
    EXPECT_EQ(cfg[i]["config"]["return_sequences"], i < 5);
  }
  EXPECT_EQ(cfg[6]["class_name"], "Dense");
  EXPECT_EQ(cfg[6]["config"]["units"], 1);
  EXPECT_EQ(cfg[6]["config"]["activation"], "linear");
}

TEST(ExportModelConfig, ListingTwoArchitecture) {
  Architecture a;
  a.layer_sizes = {1, 2, 2, 1};
  a.look_back = 2;
  const Json cfg = export_model_config(Solution{a, std::nullopt, {}});
  ASSERT_EQ(cfg.size(), 3u);
  EXPECT_EQ(cfg[0]["config"]["units"], 2);
  EXPECT_EQ(cfg[1]["config"]["units"], 2);
  EXPECT_EQ(cfg[2]["config"]["units"], 1);
  EXPECT_EQ(keys(cfg[0]), (std::set<std::string>{"class_name", "config"}));
}

TEST(Cli, SamplingDocumentMatchesListingKeys) {
  TempDir dir;
  const auto r = run_cli({"--config", dir.write("s.json", kSmallSampling)});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_EQ(keys(doc), (std::set<std::string>{"look_back", "architecture", "metrics", "run"}));
  EXPECT_EQ(keys(doc["metrics"]), (std::set<std::string>{"log_p", "p", "mean", "samples", "std"}));
  EXPECT_EQ(doc["look_back"], 2);
  EXPECT_EQ(doc["architecture"], Json::parse("[1,2,2,1]"));
  EXPECT_EQ(doc["metrics"]["samples"].size(), 20u);
  EXPECT_EQ(doc["run"]["seed"], 7);
  EXPECT_EQ(doc["run"]["n_samples"], 20);
  EXPECT_EQ(doc["run"]["threshold"], 0.01);
  EXPECT_TRUE(r.err.empty());
}

TEST(Cli, RerunIsByteIdentical) {
  TempDir dir;
  const auto path = dir.write("s.json", kSmallSampling);
  const auto a = run_cli({"--config", path});
  const auto b = run_cli({"--config", path, "--workers", "3"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, VerboseLogsGoToDiagnosticStream) {
  TempDir dir;
  const auto r = run_cli({"--config", dir.write("s.json", kSmallSampling), "--verbose=1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NO_THROW(Json::parse(r.out));
  EXPECT_NE(r.err.find("sample 19 mae="), std::string::npos);
  EXPECT_EQ(run_cli({"--config", dir.write("s2.json", kSmallSampling), "--verbose=3"}).code, 1);
}

TEST(Cli, MissingConfigNamesPath) {
  const auto r = run_cli({"--config", "missing.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("missing.json"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"--config", "x.json", "--bogus"}).code, 1);
}

TEST(Cli, UnknownActionListsRegistered) {
  TempDir dir;
  const auto r = run_cli({"--config", dir.write("c.json", R"({"action": "nope"})")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("mae-random-sampling"), std::string::npos);
  EXPECT_NE(r.err.find("architecture-optimization"), std::string::npos);
}

TEST(Cli, MalformedConfigs) {
  TempDir dir;
  EXPECT_EQ(run_cli({"--config", dir.write("a.json", "{not json")}).code, 1);
  EXPECT_EQ(run_cli({"--config", dir.write("b.json", R"({"action": "mae-random-sampling", "sede": 1})")}).code, 1);
  EXPECT_EQ(run_cli({"--config", dir.write("c.json", R"({"action": "mae-random-sampling"})")}).code, 1);
  EXPECT_EQ(run_cli({"--config", dir.write("d.json",
                                           R"({"action": "mae-random-sampling", "architecture": [1,2,1],
                                               "look_back": 2, "sampling": {"n_samples": 1}})")})
                .code,
            1);
  EXPECT_EQ(run_cli({"--config", dir.write("e.json", R"({"action": "architecture-optimization",
                                               "evolution": {"elitism_count": 10}})")})
                .code,
            1);
}

TEST(Cli, ArchitectureOutsideSpaceListsViolations) {
  TempDir dir;
  const auto r = run_cli({"--config", dir.write("c.json", R"({"action": "mae-random-sampling",
      "architecture": [1, 20, 1], "look_back": 2})")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("neurons 20 > max 16"), std::string::npos) << r.err;
}

TEST(Cli, RuntimeFailureExitsTwo) {
  TempDir dir;
  const auto r = run_cli({"--config", dir.write("c.json", R"({"action": "mae-random-sampling",
      "data": {"source": "file", "path": "no-such-series.csv"},
      "architecture": [1, 2, 1], "look_back": 2})")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no-such-series.csv"), std::string::npos);
}

TEST(Cli, FileDataAndOutputPathResolveAgainstConfigDir) {
  TempDir dir;
  std::string csv = "value\n";
  for (int t = 0; t < 120; ++t) csv += std::to_string(std::sin(t * 0.3)) + "\n";
  dir.write("series.csv", csv);
  const auto r = run_cli({"--config", dir.write("c.json", R"({"action": "mae-random-sampling",
      "data": {"source": "file", "path": "series.csv"}, "output_path": "result.json",
      "architecture": [1, 3, 1], "look_back": 4, "sampling": {"n_samples": 10}})")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(dir.path() / "result.json");
  const Json doc = Json::parse(f);
  EXPECT_EQ(doc["metrics"]["samples"].size(), 10u);
  EXPECT_EQ(doc["run"]["data"]["source"], "file");
}

TEST(Cli, OptimizationDocumentShape) {
  TempDir dir;
  const auto r = run_cli({"--config", dir.write("o.json", R"({"action": "architecture-optimization", "seed": 3,
      "data": {"n": 200, "period": 20},
      "space": {"max_hidden_layers": 2, "max_neurons": 3, "max_look_back": 3},
      "evolution": {"population_size": 4, "offspring_per_generation": 4, "max_evaluations": 12,
                    "samples_per_evaluation": 8, "crossover_enabled": true}})"),
                          "--verbose=2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(r.out);
  for (const char* k : {"fitness", "layers", "look_back", "config", "history", "run"}) {
    EXPECT_TRUE(doc.contains(k)) << k;
  }
  EXPECT_EQ(keys(doc["fitness"]), (std::set<std::string>{"log_p"}));
  const auto& layers = doc["layers"];
  EXPECT_EQ(layers.front(), 1);
  EXPECT_EQ(layers.back(), 1);
  EXPECT_EQ(doc["config"].size(), layers.size() - 1);
  EXPECT_EQ(keys(doc["history"][0]),
            (std::set<std::string>{"generation", "best_log_p", "mean_log_p", "evaluations_used"}));
  EXPECT_NE(r.err.find("  eval ["), std::string::npos);
  EXPECT_NE(r.err.find("generation 0"), std::string::npos);
}

TEST(Cli, OptimizationOnSingleGenomeSpace) {
  TempDir dir;
  const auto r = run_cli({"--config", dir.write("o.json", R"({"action": "architecture-optimization",
      "data": {"n": 200, "period": 20},
      "space": {"min_hidden_layers": 2, "max_hidden_layers": 2, "min_neurons": 3, "max_neurons": 3,
                "min_look_back": 4, "max_look_back": 4},
      "evolution": {"samples_per_evaluation": 8}})")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_EQ(doc["layers"], Json::parse("[1,3,3,1]"));
  EXPECT_EQ(doc["look_back"], 4);
  EXPECT_EQ(doc["run"]["evaluations"], 1);
}

namespace {

class EchoAction : public Action {
 public:
  std::string name() const override { return "echo-seed"; }
  Json execute(const RunConfig& cfg, const Logger&) const override { return Json{{"seed", cfg.seed}}; }
};

}  // namespace

TEST(Cli, RegistryIsExtensible) {
  TempDir dir;
  ActionRegistry reg = default_registry();
  reg.add(std::make_unique<EchoAction>());
  const auto r = run_cli({"--config", dir.write("c.json", R"({"action": "echo-seed", "seed": 99})")}, reg);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["seed"], 99);
}

TEST(Cli, BinaryRunsShippedSamplingConfig) {
  const std::string cmd = std::string("cd ") + NEUROEVO_DEMO_DIR + " && " + NEUROEVO_CLI_PATH +
                          " --config mae-rand-samp-sin.json --verbose=1 > /dev/null 2>&1";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  const std::string bad = std::string(NEUROEVO_CLI_PATH) + " --config missing.json > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 1);
}
