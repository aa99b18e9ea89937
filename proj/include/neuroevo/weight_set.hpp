#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "neuroevo/architecture.hpp"
#include "neuroevo/errors.hpp"

namespace neuroevo {

// Gate blocks are stacked in the order [input, forget, candidate, output];
// kernels are row-major with 4*units rows.
struct LstmLayerWeights {
  std::size_t input_dim = 0;
  std::size_t units = 0;
  std::vector<double> input_kernel;      // (4H x D)
  std::vector<double> recurrent_kernel;  // (4H x H)
  std::vector<double> bias;              // (4H)

  bool operator==(const LstmLayerWeights&) const = default;
};

struct WeightSet {
  std::vector<LstmLayerWeights> layers;
  std::size_t output_dim = 0;
  std::vector<double> dense_kernel;  // (O x H_last)
  std::vector<double> dense_bias;    // (O)

  bool operator==(const WeightSet&) const = default;

  // Visits every tensor in canonical order: per layer input kernel,
  // recurrent kernel, bias; then dense kernel, dense bias.
  template <typename F>
  void for_each_tensor(F&& f) {
    for (auto& l : layers) {
      f(l.input_kernel);
      f(l.recurrent_kernel);
      f(l.bias);
    }
    f(dense_kernel);
    f(dense_bias);
  }

  template <typename F>
  void for_each_tensor(F&& f) const {
    for (const auto& l : layers) {
      f(l.input_kernel);
      f(l.recurrent_kernel);
      f(l.bias);
    }
    f(dense_kernel);
    f(dense_bias);
  }

  std::size_t element_count() const {
    std::size_t n = 0;
    for_each_tensor([&](const std::vector<double>& t) { n += t.size(); });
    return n;
  }
};

inline std::size_t param_count(const Architecture& arch) {
  check_architecture(arch);
  std::size_t n = 0;
  for (std::size_t i = 0; i < arch.hidden_count(); ++i) {
    const auto d = static_cast<std::size_t>(arch.layer_sizes[i]);
    const auto h = static_cast<std::size_t>(arch.layer_sizes[i + 1]);
    n += 4 * (d * h + h * h + h);
  }
  const auto h_last = static_cast<std::size_t>(arch.layer_sizes[arch.layer_sizes.size() - 2]);
  const auto o = static_cast<std::size_t>(arch.output_dim());
  return n + h_last * o + o;
}

inline WeightSet zero_weights(const Architecture& arch) {
  check_architecture(arch);
  WeightSet ws;
  for (std::size_t i = 0; i < arch.hidden_count(); ++i) {
    LstmLayerWeights l;
    l.input_dim = static_cast<std::size_t>(arch.layer_sizes[i]);
    l.units = static_cast<std::size_t>(arch.layer_sizes[i + 1]);
    l.input_kernel.assign(4 * l.units * l.input_dim, 0.0);
    l.recurrent_kernel.assign(4 * l.units * l.units, 0.0);
    l.bias.assign(4 * l.units, 0.0);
    ws.layers.push_back(std::move(l));
  }
  ws.output_dim = static_cast<std::size_t>(arch.output_dim());
  ws.dense_kernel.assign(ws.output_dim * ws.layers.back().units, 0.0);
  ws.dense_bias.assign(ws.output_dim, 0.0);
  return ws;
}

inline bool shape_matches(const Architecture& arch, const WeightSet& ws) {
  if (arch.layer_sizes.size() < 3 || ws.layers.size() != arch.hidden_count()) return false;
  for (std::size_t i = 0; i < ws.layers.size(); ++i) {
    const auto& l = ws.layers[i];
    const auto d = static_cast<std::size_t>(arch.layer_sizes[i]);
    const auto h = static_cast<std::size_t>(arch.layer_sizes[i + 1]);
    if (l.input_dim != d || l.units != h || l.input_kernel.size() != 4 * h * d ||
        l.recurrent_kernel.size() != 4 * h * h || l.bias.size() != 4 * h) {
      return false;
    }
  }
  const auto o = static_cast<std::size_t>(arch.output_dim());
  return ws.output_dim == o && ws.dense_kernel.size() == o * ws.layers.back().units &&
         ws.dense_bias.size() == o;
}

inline std::vector<double> flatten(const WeightSet& ws) {
  std::vector<double> flat;
  flat.reserve(ws.element_count());
  ws.for_each_tensor([&](const std::vector<double>& t) { flat.insert(flat.end(), t.begin(), t.end()); });
  return flat;
}

inline WeightSet unflatten(const Architecture& arch, std::span<const double> flat) {
  WeightSet ws = zero_weights(arch);
  if (flat.size() != ws.element_count()) {
    throw ShapeError("flat weight vector has " + std::to_string(flat.size()) +
                     " elements, architecture needs " + std::to_string(ws.element_count()));
  }
  std::size_t pos = 0;
  ws.for_each_tensor([&](std::vector<double>& t) {
    for (double& v : t) v = flat[pos++];
  });
  return ws;
}

}  // namespace neuroevo
