#pragma once

#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "neuroevo/architecture.hpp"
#include "neuroevo/errors.hpp"
#include "neuroevo/weight_set.hpp"

namespace neuroevo {

using Metrics = std::map<std::string, double>;

// A decoded network together with the metrics its problem computed for it.
struct Solution {
  Architecture architecture;
  std::optional<WeightSet> weights;
  Metrics metrics;
};

inline Solution make_solution(Architecture arch, Metrics metrics,
                              std::optional<WeightSet> weights = std::nullopt) {
  if (weights && !shape_matches(arch, *weights)) {
    throw ShapeError("weight shapes do not match architecture");
  }
  return Solution{std::move(arch), std::move(weights), std::move(metrics)};
}

inline double solution_fitness(const Solution& sol, const std::string& key = "log_p") {
  auto it = sol.metrics.find(key);
  if (it == sol.metrics.end()) throw MissingKeyError(key);
  return it->second;
}

// The problem side of a search: turn a genome into an architecture, and score
// an architecture. `seed` makes evaluation a pure function of its inputs.
template <typename P>
concept ArchitectureProblem = requires(const P& p, const Genome& g, const Architecture& a,
                                       std::uint64_t seed) {
  { p.decode(g) } -> std::same_as<Architecture>;
  { p.evaluate(a, seed) } -> std::convertible_to<Metrics>;
};

}  // namespace neuroevo
