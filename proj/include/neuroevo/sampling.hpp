#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "neuroevo/architecture.hpp"
#include "neuroevo/data.hpp"
#include "neuroevo/errors.hpp"
#include "neuroevo/nelder_mead.hpp"
#include "neuroevo/normal.hpp"
#include "neuroevo/parallel.hpp"
#include "neuroevo/random.hpp"
#include "neuroevo/rnn_engine.hpp"
#include "neuroevo/weight_set.hpp"

namespace neuroevo {

// Draws every weight i.i.d. N(0, stddev^2), consuming exactly
// param_count(arch) variates in WeightSet::for_each_tensor order.
inline WeightSet sample_weights(const Architecture& arch, Rng& rng, double stddev = 1.0) {
  WeightSet ws = zero_weights(arch);
  std::normal_distribution<double> normal(0.0, stddev);
  ws.for_each_tensor([&](std::vector<double>& t) {
    for (double& v : t) v = normal(rng);
  });
  return ws;
}

struct SampleMoments {
  double mean = 0.0;
  double std = 0.0;  // population (n divisor)
};

inline SampleMoments sample_moments(std::span<const double> xs) {
  if (xs.empty()) throw DegenerateSamplesError("no samples");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

// Log-likelihood of a normal(mu, sigma) truncated below at `lower`.
inline double truncated_normal_log_likelihood(std::span<const double> xs, double mu, double sigma,
                                              double lower = 0.0) {
  if (!(sigma > 0.0)) return -std::numeric_limits<double>::infinity();
  const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi) + std::log(sigma);
  double ll = 0.0;
  for (double x : xs) {
    const double z = (x - mu) / sigma;
    ll -= 0.5 * z * z + log_norm;
  }
  return ll - static_cast<double>(xs.size()) * log_normal_cdf((mu - lower) / sigma);
}

struct TruncatedNormalFit {
  double mu = 0.0;
  double sigma = 1.0;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Maximum-likelihood (mu, sigma) of a lower-truncated normal. Simplex search
// over (mu, log sigma) starting at the sample mean and population std.
inline TruncatedNormalFit fit_truncated_normal(std::span<const double> xs, double lower = 0.0) {
  if (xs.size() < 2) throw DegenerateSamplesError("truncated-normal fit needs at least 2 samples");
  for (double x : xs) {
    if (!std::isfinite(x)) throw DegenerateSamplesError("non-finite sample");
    if (x < lower) throw InvalidArgument("sample below truncation point");
  }
  const auto m = sample_moments(xs);
  if (!(m.std > 0.0)) throw DegenerateSamplesError("samples have zero variance");

  auto neg_ll = [&](const std::vector<double>& p) {
    return -truncated_normal_log_likelihood(xs, p[0], std::exp(p[1]), lower);
  };
  NelderMeadOptions opt;
  opt.x_tolerance = 1e-8;
  opt.max_iterations = 2000;
  const auto r = nelder_mead(neg_ll, {m.mean, std::log(m.std)}, {0.1 * m.std, 0.1}, opt);
  return {r.x[0], std::exp(r.x[1]), -r.value, r.iterations, r.converged};
}

struct TailProbability {
  double p = 0.0;
  double log_p = -std::numeric_limits<double>::infinity();
};

// P(X < threshold) for X ~ normal(mu, sigma) truncated below at `lower`,
// computed in log space so deep-tail values stay finite.
inline TailProbability truncated_tail_log_prob(double threshold, double mu, double sigma, double lower = 0.0) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive and finite");
  if (std::isnan(threshold) || std::isnan(mu) || std::isnan(lower)) throw InvalidArgument("NaN argument");
  if (threshold <= lower) return {};
  if (threshold == std::numeric_limits<double>::infinity()) return {1.0, 0.0};
  const double a = (lower - mu) / sigma;
  const double b = (threshold - mu) / sigma;
  double log_p = log_normal_interval(a, b) - log_normal_cdf(-a);
  log_p = std::min(log_p, 0.0);
  return {std::clamp(std::exp(log_p), 0.0, 1.0), log_p};
}

struct MaeSamplingStats {
  std::vector<double> samples;
  double mean = 0.0;
  double std = 0.0;
  double trunc_mu = 0.0;
  double trunc_sigma = 0.0;
  double threshold = 0.0;
  double p = 0.0;
  double log_p = 0.0;

  bool operator==(const MaeSamplingStats&) const = default;
};

struct SamplingOptions {
  std::size_t workers = 1;     // 0 = hardware concurrency
  double weight_stddev = 1.0;  // weights drawn from N(0, weight_stddev^2)
};

// Sample i uses the stream derive_seed(seed, i), so the result does not
// depend on the worker count.
inline MaeSamplingStats mae_random_sampling(const Architecture& arch, const WindowedDataset& data,
                                            std::size_t n_samples, double threshold, std::uint64_t seed,
                                            const SamplingOptions& opt = {}) {
  check_architecture(arch);
  if (n_samples < 2) throw InvalidArgument("n_samples must be >= 2");
  if (!(threshold > 0.0)) throw InvalidArgument("threshold must be positive");
  if (data.look_back() != static_cast<std::size_t>(arch.look_back) ||
      data.features() != static_cast<std::size_t>(arch.input_dim()) ||
      data.features() != static_cast<std::size_t>(arch.output_dim())) {
    throw ShapeError("dataset is incompatible with the architecture");
  }
  const Matrix targets = targets_matrix(data);

  MaeSamplingStats s;
  s.samples = parallel_map<double>(n_samples, opt.workers, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const WeightSet w = sample_weights(arch, rng, opt.weight_stddev);
    return mae(predict(arch, w, data), targets);
  });
  const auto m = sample_moments(s.samples);
  s.mean = m.mean;
  s.std = m.std;
  if (!(s.std > 0.0)) throw DegenerateSamplesError("all sampled MAE values are identical");
  const auto fit = fit_truncated_normal(s.samples, 0.0);
  s.trunc_mu = fit.mu;
  s.trunc_sigma = fit.sigma;
  s.threshold = threshold;
  const auto tail = truncated_tail_log_prob(threshold, fit.mu, fit.sigma, 0.0);
  s.p = tail.p;
  s.log_p = tail.log_p;
  return s;
}

}  // namespace neuroevo
