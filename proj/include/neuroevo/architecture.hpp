#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "neuroevo/errors.hpp"

namespace neuroevo {

enum class HiddenActivation { kTanh };
enum class RecurrentActivation { kSigmoid };
enum class OutputActivation { kLinear };

// A stacked-LSTM regressor: layer_sizes = [input, hidden..., output].
struct Architecture {
  std::vector<int> layer_sizes;
  int look_back = 1;
  HiddenActivation hidden_activation = HiddenActivation::kTanh;
  RecurrentActivation recurrent_activation = RecurrentActivation::kSigmoid;
  OutputActivation output_activation = OutputActivation::kLinear;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  std::size_t hidden_count() const { return layer_sizes.size() - 2; }
  int hidden_width(std::size_t i) const { return layer_sizes[i + 1]; }

  bool operator==(const Architecture&) const = default;
};

// Throws InvalidArgument unless the structural invariants hold
// (at least one hidden layer, every size and look_back >= 1).
inline void check_architecture(const Architecture& arch) {
  if (arch.layer_sizes.size() < 3) {
    throw InvalidArgument("architecture needs at least one hidden layer");
  }
  for (int s : arch.layer_sizes) {
    if (s < 1) throw InvalidArgument("layer sizes must be >= 1");
  }
  if (arch.look_back < 1) throw InvalidArgument("look_back must be >= 1");
}

// The searched part of an architecture. Input/output widths are owned by the
// problem and attached at decode time.
struct Genome {
  std::vector<int> hidden_layers;
  int look_back = 1;

  auto operator<=>(const Genome&) const = default;
  bool operator==(const Genome&) const = default;
};

inline Architecture to_architecture(const Genome& g, int input_dim, int output_dim) {
  Architecture arch;
  arch.layer_sizes.reserve(g.hidden_layers.size() + 2);
  arch.layer_sizes.push_back(input_dim);
  arch.layer_sizes.insert(arch.layer_sizes.end(), g.hidden_layers.begin(), g.hidden_layers.end());
  arch.layer_sizes.push_back(output_dim);
  arch.look_back = g.look_back;
  return arch;
}

inline Genome to_genome(const Architecture& arch) {
  Genome g;
  g.hidden_layers.assign(arch.layer_sizes.begin() + 1, arch.layer_sizes.end() - 1);
  g.look_back = arch.look_back;
  return g;
}

struct SearchSpace {
  int min_hidden_layers = 1;
  int max_hidden_layers = 8;
  int min_neurons = 1;
  int max_neurons = 16;
  int min_look_back = 1;
  int max_look_back = 30;
  int input_dim = 1;
  int output_dim = 1;

  bool operator==(const SearchSpace&) const = default;
};

// Empty iff the space is well formed (all bounds >= 1, min <= max).
inline std::vector<std::string> space_errors(const SearchSpace& s) {
  std::vector<std::string> out;
  auto pair = [&](const char* name, int lo, int hi) {
    if (lo < 1) out.push_back(std::string("min ") + name + " " + std::to_string(lo) + " < 1");
    if (hi < lo) {
      out.push_back(std::string(name) + " range " + std::to_string(lo) + ".." +
                    std::to_string(hi) + " is empty");
    }
  };
  pair("hidden_layers", s.min_hidden_layers, s.max_hidden_layers);
  pair("neurons", s.min_neurons, s.max_neurons);
  pair("look_back", s.min_look_back, s.max_look_back);
  if (s.input_dim < 1) out.push_back("input_dim " + std::to_string(s.input_dim) + " < 1");
  if (s.output_dim < 1) out.push_back("output_dim " + std::to_string(s.output_dim) + " < 1");
  return out;
}

// One human-readable entry per violated bound; empty means `arch` lies in `space`.
inline std::vector<std::string> validate_architecture(const Architecture& arch,
                                                      const SearchSpace& space) {
  std::vector<std::string> out;
  const auto n = static_cast<int>(arch.layer_sizes.size());
  if (n < 2) {
    out.push_back("architecture has " + std::to_string(n) + " layers, need input and output");
  } else {
    if (arch.layer_sizes.front() != space.input_dim) {
      out.push_back("input dim " + std::to_string(arch.layer_sizes.front()) +
                    " != " + std::to_string(space.input_dim));
    }
    if (arch.layer_sizes.back() != space.output_dim) {
      out.push_back("output dim " + std::to_string(arch.layer_sizes.back()) +
                    " != " + std::to_string(space.output_dim));
    }
    const int hidden = n - 2;
    if (hidden < space.min_hidden_layers) {
      out.push_back("hidden layers " + std::to_string(hidden) + " < min " +
                    std::to_string(space.min_hidden_layers));
    }
    if (hidden > space.max_hidden_layers) {
      out.push_back("hidden layers " + std::to_string(hidden) + " > max " +
                    std::to_string(space.max_hidden_layers));
    }
    for (int i = 1; i + 1 < n; ++i) {
      const int w = arch.layer_sizes[static_cast<std::size_t>(i)];
      if (w < space.min_neurons) {
        out.push_back("neurons " + std::to_string(w) + " < min " + std::to_string(space.min_neurons));
      }
      if (w > space.max_neurons) {
        out.push_back("neurons " + std::to_string(w) + " > max " + std::to_string(space.max_neurons));
      }
    }
  }
  if (arch.look_back < space.min_look_back) {
    out.push_back("look_back " + std::to_string(arch.look_back) + " < min " +
                  std::to_string(space.min_look_back));
  }
  if (arch.look_back > space.max_look_back) {
    out.push_back("look_back " + std::to_string(arch.look_back) + " > max " +
                  std::to_string(space.max_look_back));
  }
  return out;
}

}  // namespace neuroevo
