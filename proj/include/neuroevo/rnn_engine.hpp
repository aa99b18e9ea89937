#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "neuroevo/architecture.hpp"
#include "neuroevo/data.hpp"
#include "neuroevo/errors.hpp"
#include "neuroevo/weight_set.hpp"

namespace neuroevo {

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> values)
      : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != rows * cols) throw ShapeError("matrix data does not match its shape");
  }

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool operator==(const Matrix&) const = default;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// One LSTM step writing into h_out/c_out, which must not alias the inputs.
// `gates` is scratch of size 4H.
inline void lstm_cell_step_into(std::span<const double> x, std::span<const double> h,
                                std::span<const double> c, const LstmLayerWeights& w,
                                std::span<double> gates, std::span<double> h_out,
                                std::span<double> c_out) {
  const std::size_t d = w.input_dim;
  const std::size_t units = w.units;
  if (x.size() != d || h.size() != units || c.size() != units || h_out.size() != units ||
      c_out.size() != units || gates.size() != 4 * units || w.input_kernel.size() != 4 * units * d ||
      w.recurrent_kernel.size() != 4 * units * units || w.bias.size() != 4 * units) {
    throw ShapeError("lstm step: inconsistent shapes");
  }
  for (std::size_t r = 0; r < 4 * units; ++r) {
    double acc = w.bias[r];
    const double* wx = w.input_kernel.data() + r * d;
    for (std::size_t k = 0; k < d; ++k) acc += wx[k] * x[k];
    const double* wh = w.recurrent_kernel.data() + r * units;
    for (std::size_t k = 0; k < units; ++k) acc += wh[k] * h[k];
    gates[r] = acc;
  }
  for (std::size_t j = 0; j < units; ++j) {
    const double i_gate = sigmoid(gates[j]);
    const double f_gate = sigmoid(gates[units + j]);
    const double g_cand = std::tanh(gates[2 * units + j]);
    const double o_gate = sigmoid(gates[3 * units + j]);
    c_out[j] = f_gate * c[j] + i_gate * g_cand;
    h_out[j] = o_gate * std::tanh(c_out[j]);
  }
}

inline std::pair<std::vector<double>, std::vector<double>> lstm_cell_step(
    std::span<const double> x, std::span<const double> h, std::span<const double> c,
    const LstmLayerWeights& w) {
  std::vector<double> gates(4 * w.units);
  std::vector<double> h_out(w.units);
  std::vector<double> c_out(w.units);
  lstm_cell_step_into(x, h, c, w, gates, h_out, c_out);
  return {std::move(h_out), std::move(c_out)};
}

// Runs every window independently from a zero state; returns N x O
// predictions read from the last hidden layer at the final time step.
inline Matrix predict(const Architecture& arch, const WeightSet& weights, const WindowedDataset& data) {
  check_architecture(arch);
  if (!shape_matches(arch, weights)) throw ShapeError("weights do not match architecture");
  if (data.look_back() != static_cast<std::size_t>(arch.look_back)) {
    throw ShapeError("dataset look_back " + std::to_string(data.look_back()) +
                     " != architecture look_back " + std::to_string(arch.look_back));
  }
  if (data.features() != static_cast<std::size_t>(arch.input_dim())) {
    throw ShapeError("dataset has " + std::to_string(data.features()) + " features, architecture expects " +
                     std::to_string(arch.input_dim()));
  }
  const std::size_t n = data.size();
  const std::size_t out_dim = weights.output_dim;
  Matrix pred(n, out_dim);

  const std::size_t layers = weights.layers.size();
  std::vector<std::vector<double>> h(layers), c(layers), h_next(layers), c_next(layers);
  std::size_t max_units = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t u = weights.layers[l].units;
    h[l].resize(u);
    c[l].resize(u);
    h_next[l].resize(u);
    c_next[l].resize(u);
    max_units = std::max(max_units, u);
  }
  std::vector<double> gates(4 * max_units);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < layers; ++l) {
      std::fill(h[l].begin(), h[l].end(), 0.0);
      std::fill(c[l].begin(), c[l].end(), 0.0);
    }
    for (std::size_t s = 0; s < data.look_back(); ++s) {
      std::span<const double> x = data.input(i, s);
      for (std::size_t l = 0; l < layers; ++l) {
        const auto& w = weights.layers[l];
        lstm_cell_step_into(x, h[l], c[l], w, std::span<double>(gates.data(), 4 * w.units), h_next[l],
                            c_next[l]);
        std::swap(h[l], h_next[l]);
        std::swap(c[l], c_next[l]);
        x = h[l];
      }
    }
    const auto& top = h[layers - 1];
    for (std::size_t o = 0; o < out_dim; ++o) {
      double acc = weights.dense_bias[o];
      const double* k = weights.dense_kernel.data() + o * top.size();
      for (std::size_t j = 0; j < top.size(); ++j) acc += k[j] * top[j];
      pred(i, o) = acc;
    }
  }
  return pred;
}

inline Matrix targets_matrix(const WindowedDataset& data) {
  return Matrix(data.size(), data.features(), data.targets());
}

inline double mae(const Matrix& predictions, const Matrix& targets) {
  if (predictions.rows != targets.rows || predictions.cols != targets.cols) {
    throw ShapeError("mae: prediction and target shapes differ");
  }
  if (predictions.data.empty()) throw InvalidArgument("mae: empty input");
  double sum = 0.0;
  for (std::size_t k = 0; k < predictions.data.size(); ++k) {
    sum += std::abs(predictions.data[k] - targets.data[k]);
  }
  return sum / static_cast<double>(predictions.data.size());
}

// MAE of `weights` on `data`, the quantity every sample and ES step scores.
inline double evaluate_mae(const Architecture& arch, const WeightSet& weights, const WindowedDataset& data) {
  return mae(predict(arch, weights, data), targets_matrix(data));
}

}  // namespace neuroevo
