#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "neuroevo/architecture.hpp"
#include "neuroevo/core_model.hpp"
#include "neuroevo/data.hpp"
#include "neuroevo/errors.hpp"
#include "neuroevo/parallel.hpp"
#include "neuroevo/random.hpp"
#include "neuroevo/rnn_engine.hpp"
#include "neuroevo/sampling.hpp"
#include "neuroevo/weight_set.hpp"

namespace neuroevo {

struct Individual {
  Genome genome;
  std::optional<double> fitness;
  std::size_t eval_count_at_birth = 0;
};

struct EvolutionConfig {
  std::size_t population_size = 10;  // mu
  std::size_t offspring_per_generation = 10;  // lambda
  std::size_t max_evaluations = 300;
  std::size_t tournament_size = 2;
  std::size_t elitism_count = 1;
  double p_resize_layer = 0.3;
  double p_add_layer = 0.1;
  double p_remove_layer = 0.1;
  double neuron_mutation_sigma = 2.0;
  int look_back_step = 2;
  bool crossover_enabled = false;
  std::size_t samples_per_evaluation = 30;
  double threshold = 0.01;
  std::uint64_t seed = 0;
  SearchSpace space;
  std::size_t workers = 1;  // concurrent genome evaluations; 0 = hardware concurrency
  // Stop after this many consecutive generations that produce no unseen genome.
  std::size_t stall_generations = 20;
};

inline std::vector<std::string> config_errors(const EvolutionConfig& c) {
  std::vector<std::string> out = space_errors(c.space);
  auto prob = [&](const char* name, double p) {
    if (!(p >= 0.0 && p <= 1.0)) out.push_back(std::string(name) + " must lie in [0, 1]");
  };
  if (c.population_size < 1) out.push_back("population_size must be >= 1");
  if (c.offspring_per_generation < 1) out.push_back("offspring_per_generation must be >= 1");
  if (c.max_evaluations < 1) out.push_back("max_evaluations must be >= 1");
  if (c.tournament_size < 2) out.push_back("tournament_size must be >= 2");
  if (c.elitism_count >= c.population_size) out.push_back("elitism_count must be < population_size");
  prob("p_resize_layer", c.p_resize_layer);
  prob("p_add_layer", c.p_add_layer);
  prob("p_remove_layer", c.p_remove_layer);
  if (!(c.neuron_mutation_sigma > 0.0)) out.push_back("neuron_mutation_sigma must be positive");
  if (c.look_back_step < 1) out.push_back("look_back_step must be >= 1");
  if (c.samples_per_evaluation < 2) out.push_back("samples_per_evaluation must be >= 2");
  if (!(c.threshold > 0.0)) out.push_back("threshold must be positive");
  return out;
}

inline Individual random_individual(const SearchSpace& space, Rng& rng) {
  Individual ind;
  const int layers = uniform_int(rng, space.min_hidden_layers, space.max_hidden_layers);
  ind.genome.hidden_layers.resize(static_cast<std::size_t>(layers));
  for (int& w : ind.genome.hidden_layers) w = uniform_int(rng, space.min_neurons, space.max_neurons);
  ind.genome.look_back = uniform_int(rng, space.min_look_back, space.max_look_back);
  return ind;
}

namespace detail {

// Uniform over [lo, hi] \ {current}; requires lo < hi.
inline int resample_other(Rng& rng, int lo, int hi, int current) {
  int v = uniform_int(rng, lo, hi - 1);
  if (v >= current) ++v;
  return std::clamp(v, lo, hi);
}

}  // namespace detail

inline Individual mutate(const Individual& ind, const EvolutionConfig& cfg, Rng& rng) {
  const SearchSpace& s = cfg.space;
  Genome g = ind.genome;
  std::normal_distribution<double> step(0.0, cfg.neuron_mutation_sigma);

  for (int& w : g.hidden_layers) {
    if (bernoulli(rng, cfg.p_resize_layer)) {
      w = std::clamp(w + static_cast<int>(std::lround(step(rng))), s.min_neurons, s.max_neurons);
    }
  }
  const auto n_layers = static_cast<int>(g.hidden_layers.size());
  if (bernoulli(rng, cfg.p_add_layer) && n_layers < s.max_hidden_layers) {
    const int pos = uniform_int(rng, 0, n_layers);
    g.hidden_layers.insert(g.hidden_layers.begin() + pos, uniform_int(rng, s.min_neurons, s.max_neurons));
  }
  const auto n_now = static_cast<int>(g.hidden_layers.size());
  if (bernoulli(rng, cfg.p_remove_layer) && n_now > s.min_hidden_layers) {
    g.hidden_layers.erase(g.hidden_layers.begin() + uniform_int(rng, 0, n_now - 1));
  }
  if (cfg.look_back_step > 0) {
    g.look_back = std::clamp(g.look_back + uniform_int(rng, -cfg.look_back_step, cfg.look_back_step),
                             s.min_look_back, s.max_look_back);
  }

  if (g == ind.genome) {
    // Forced change: one width, else look_back, else layer count.
    if (s.max_neurons > s.min_neurons && !g.hidden_layers.empty()) {
      const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(g.hidden_layers.size()) - 1));
      g.hidden_layers[j] = detail::resample_other(rng, s.min_neurons, s.max_neurons, g.hidden_layers[j]);
    } else if (s.max_look_back > s.min_look_back) {
      g.look_back = detail::resample_other(rng, s.min_look_back, s.max_look_back, g.look_back);
    } else if (static_cast<int>(g.hidden_layers.size()) < s.max_hidden_layers) {
      g.hidden_layers.push_back(uniform_int(rng, s.min_neurons, s.max_neurons));
    } else if (static_cast<int>(g.hidden_layers.size()) > s.min_hidden_layers) {
      g.hidden_layers.pop_back();
    }
  }
  return Individual{std::move(g), std::nullopt, ind.eval_count_at_birth};
}

// Joins a.hidden_layers[0, cut_a) with b.hidden_layers[cut_b, end), then
// repairs the layer count: too long is truncated, too short is padded with
// uniformly drawn widths.
inline Individual splice(const Individual& a, const Individual& b, std::size_t cut_a, std::size_t cut_b,
                         bool look_back_from_a, const SearchSpace& space, Rng& rng) {
  const auto& la = a.genome.hidden_layers;
  const auto& lb = b.genome.hidden_layers;
  cut_a = std::min(cut_a, la.size());
  cut_b = std::min(cut_b, lb.size());
  Individual child;
  auto& h = child.genome.hidden_layers;
  h.assign(la.begin(), la.begin() + static_cast<std::ptrdiff_t>(cut_a));
  h.insert(h.end(), lb.begin() + static_cast<std::ptrdiff_t>(cut_b), lb.end());
  if (static_cast<int>(h.size()) > space.max_hidden_layers) h.resize(static_cast<std::size_t>(space.max_hidden_layers));
  while (static_cast<int>(h.size()) < space.min_hidden_layers) {
    h.push_back(uniform_int(rng, space.min_neurons, space.max_neurons));
  }
  for (int& w : h) w = std::clamp(w, space.min_neurons, space.max_neurons);
  child.genome.look_back = std::clamp(look_back_from_a ? a.genome.look_back : b.genome.look_back,
                                      space.min_look_back, space.max_look_back);
  return child;
}

inline Individual cut_splice_crossover(const Individual& a, const Individual& b, const SearchSpace& space,
                                       Rng& rng) {
  const auto cut_a = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(a.genome.hidden_layers.size())));
  const auto cut_b = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(b.genome.hidden_layers.size())));
  const bool from_a = bernoulli(rng, 0.5);
  return splice(a, b, cut_a, cut_b, from_a, space, rng);
}

// Strict "x ranks ahead of y": higher fitness, then elder, then smaller genome.
inline bool ranks_ahead(const Individual& x, const Individual& y) {
  if (!x.fitness || !y.fitness) throw InvalidArgument("unevaluated individual in selection");
  if (*x.fitness != *y.fitness) return *x.fitness > *y.fitness;
  if (x.eval_count_at_birth != y.eval_count_at_birth) return x.eval_count_at_birth < y.eval_count_at_birth;
  return x.genome < y.genome;
}

inline const Individual& tournament_select(std::span<const Individual> population, std::size_t k, Rng& rng) {
  if (population.empty()) throw InvalidArgument("tournament over an empty population");
  for (const auto& ind : population) {
    if (!ind.fitness) throw InvalidArgument("unevaluated individual in tournament");
  }
  std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
  const Individual* best = &population[pick(rng)];
  for (std::size_t i = 1; i < k; ++i) {
    const Individual& c = population[pick(rng)];
    if (ranks_ahead(c, *best)) best = &c;
  }
  return *best;
}

struct GenerationRecord {
  std::size_t generation = 0;
  double best_log_p = 0.0;
  double mean_log_p = 0.0;
  std::size_t evaluations_used = 0;
};

struct ArchitectureSearchResult {
  Solution best;
  std::vector<GenerationRecord> history;
  std::size_t evaluations = 0;
};

struct EvolutionObserver {
  std::function<void(const GenerationRecord&)> on_generation;
  std::function<void(const Architecture&, const Metrics&)> on_evaluation;
};

// Seed for evaluating `g`: a pure function of the run seed and the genome.
inline std::uint64_t genome_seed(std::uint64_t run_seed, const Genome& g) {
  std::vector<int> key;
  key.reserve(g.hidden_layers.size() + 1);
  key.push_back(g.look_back);
  key.insert(key.end(), g.hidden_layers.begin(), g.hidden_layers.end());
  return derive_seed(run_seed, hash_ints(key));
}

// Adapts a plain callable (architecture, seed) -> metrics to ArchitectureProblem.
struct FunctionProblem {
  int input_dim = 1;
  int output_dim = 1;
  std::function<Metrics(const Architecture&, std::uint64_t)> fn;

  Architecture decode(const Genome& g) const { return to_architecture(g, input_dim, output_dim); }
  Metrics evaluate(const Architecture& a, std::uint64_t seed) const { return fn(a, seed); }
};

// Architecture fitness by MAE random sampling on a fixed series.
struct SamplingProblem {
  TimeSeriesDataset series;
  std::size_t n_samples = 30;
  double threshold = 0.01;
  SamplingOptions options;

  Architecture decode(const Genome& g) const {
    const auto f = static_cast<int>(series.features());
    return to_architecture(g, f, f);
  }
  Metrics evaluate(const Architecture& a, std::uint64_t seed) const {
    const auto stats = mae_random_sampling(a, window(series, static_cast<std::size_t>(a.look_back)), n_samples,
                                           threshold, seed, options);
    return {{"log_p", stats.log_p}, {"p", stats.p}, {"mean", stats.mean}, {"std", stats.std}};
  }
};

static_assert(ArchitectureProblem<FunctionProblem>);
static_assert(ArchitectureProblem<SamplingProblem>);

// Generational (mu + lambda) search over genomes with log_p fitness. Fitness
// is memoized per genome and seeded by genome_seed, so duplicates are free and
// the outcome is independent of cfg.workers.
template <ArchitectureProblem P>
ArchitectureSearchResult evolve_architecture(const P& problem, const EvolutionConfig& cfg,
                                             const EvolutionObserver& observer = {}) {
  if (auto errs = config_errors(cfg); !errs.empty()) throw ConfigError("invalid evolution config: " + errs.front());

  Rng rng(cfg.seed);
  std::map<Genome, Metrics> memo;
  std::size_t evaluations = 0;
  std::optional<Individual> best;
  Metrics best_metrics;

  auto fitness_of = [](const Metrics& m) {
    auto it = m.find("log_p");
    if (it == m.end()) throw MissingKeyError("log_p");
    return it->second;
  };

  // Evaluates unseen genomes (at most `budget` of them, in first-seen order)
  // and assigns fitness to every individual that has a memoized result.
  auto evaluate = [&](std::vector<Individual>& inds, std::size_t budget) {
    std::vector<Genome> fresh;
    std::set<Genome> queued;
    for (const auto& ind : inds) {
      if (fresh.size() >= budget) break;
      if (!memo.contains(ind.genome) && queued.insert(ind.genome).second) fresh.push_back(ind.genome);
    }
    std::vector<Architecture> archs;
    archs.reserve(fresh.size());
    for (const auto& g : fresh) archs.push_back(problem.decode(g));
    auto results = parallel_map<Metrics>(fresh.size(), cfg.workers, [&](std::size_t i) {
      return Metrics(problem.evaluate(archs[i], genome_seed(cfg.seed, fresh[i])));
    });
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      fitness_of(results[i]);
      if (observer.on_evaluation) observer.on_evaluation(archs[i], results[i]);
      memo.emplace(fresh[i], std::move(results[i]));
    }
    evaluations += fresh.size();
    std::erase_if(inds, [&](const Individual& ind) { return !memo.contains(ind.genome); });
    for (auto& ind : inds) {
      const Metrics& m = memo.at(ind.genome);
      ind.fitness = fitness_of(m);
      if (!best || ranks_ahead(ind, *best)) {
        best = ind;
        best_metrics = m;
      }
    }
    return fresh.size();
  };

  ArchitectureSearchResult result;
  auto record = [&](std::size_t gen, const std::vector<Individual>& pop) {
    double sum = 0.0;
    for (const auto& ind : pop) sum += *ind.fitness;
    GenerationRecord r{gen, *best->fitness, sum / static_cast<double>(pop.size()), evaluations};
    result.history.push_back(r);
    if (observer.on_generation) observer.on_generation(r);
  };

  std::vector<Individual> population;
  for (std::size_t i = 0; i < cfg.population_size; ++i) population.push_back(random_individual(cfg.space, rng));
  evaluate(population, std::numeric_limits<std::size_t>::max());
  record(0, population);

  std::size_t stall = 0;
  for (std::size_t gen = 1; evaluations < cfg.max_evaluations && stall < cfg.stall_generations; ++gen) {
    std::vector<Individual> offspring;
    offspring.reserve(cfg.offspring_per_generation);
    for (std::size_t k = 0; k < cfg.offspring_per_generation; ++k) {
      const Individual& pa = tournament_select(population, cfg.tournament_size, rng);
      Individual child;
      if (cfg.crossover_enabled) {
        const Individual& pb = tournament_select(population, cfg.tournament_size, rng);
        child = cut_splice_crossover(pa, pb, cfg.space, rng);
      } else {
        child = pa;
      }
      child = mutate(child, cfg, rng);
      child.eval_count_at_birth = evaluations;
      offspring.push_back(std::move(child));
    }
    const std::size_t fresh = evaluate(offspring, cfg.max_evaluations - evaluations);
    stall = fresh == 0 ? stall + 1 : 0;

    // Elites of the current population first, then the best of parents and
    // offspring; distinct genomes preferred, duplicates only as filler.
    std::vector<Individual> parents = population;
    std::stable_sort(parents.begin(), parents.end(), ranks_ahead);
    std::vector<Individual> pool = parents;
    pool.insert(pool.end(), offspring.begin(), offspring.end());
    std::stable_sort(pool.begin(), pool.end(), ranks_ahead);

    std::vector<Individual> next;
    std::set<Genome> taken;
    for (std::size_t e = 0; e < cfg.elitism_count && e < parents.size(); ++e) {
      if (taken.insert(parents[e].genome).second) next.push_back(parents[e]);
    }
    for (const auto& ind : pool) {
      if (next.size() >= cfg.population_size) break;
      if (taken.insert(ind.genome).second) next.push_back(ind);
    }
    for (const auto& ind : pool) {
      if (next.size() >= cfg.population_size) break;
      next.push_back(ind);
    }
    std::stable_sort(next.begin(), next.end(), ranks_ahead);
    population = std::move(next);
    record(gen, population);
  }

  result.best = make_solution(problem.decode(best->genome), best_metrics);
  result.evaluations = evaluations;
  return result;
}

struct WeightEsConfig {
  std::size_t mu = 10;
  std::size_t lambda = 10;
  double sigma = 0.1;
  std::size_t max_evaluations = 1000;
  std::uint64_t seed = 0;
  double init_stddev = 1.0;
  std::size_t workers = 1;
};

struct WeightSearchResult {
  WeightSet weights;
  double mae = 0.0;
  std::vector<double> best_mae_history;  // best-so-far after each generation, initial parents first
  std::size_t evaluations = 0;
};

// (mu + lambda) evolution strategy on the flattened weight vector. Offspring
// are generated sequentially from one stream and scored in parallel.
inline WeightSearchResult evolve_weights(const Architecture& arch, const WindowedDataset& data,
                                         const WeightEsConfig& cfg) {
  check_architecture(arch);
  if (cfg.mu < 1 || cfg.lambda < 1) throw InvalidArgument("mu and lambda must be >= 1");
  if (!(cfg.sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
  if (cfg.max_evaluations < cfg.mu) throw InvalidArgument("max_evaluations must cover the initial parents");
  const Matrix targets = targets_matrix(data);

  struct Member {
    std::vector<double> x;
    double mae;
  };
  auto score = [&](const std::vector<double>& x) {
    const double v = mae(predict(arch, unflatten(arch, x), data), targets);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<Member> parents(cfg.mu);
  parallel_for(cfg.mu, cfg.workers, [&](std::size_t i) {
    Rng init(derive_seed(cfg.seed, i));
    parents[i].x = flatten(sample_weights(arch, init, cfg.init_stddev));
    parents[i].mae = score(parents[i].x);
  });
  auto by_mae = [](const Member& a, const Member& b) { return a.mae < b.mae; };
  std::stable_sort(parents.begin(), parents.end(), by_mae);

  WeightSearchResult res;
  res.evaluations = cfg.mu;
  res.best_mae_history.push_back(parents.front().mae);

  Rng rng(derive_seed(cfg.seed, std::numeric_limits<std::uint64_t>::max()));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, cfg.mu - 1);
  while (res.evaluations < cfg.max_evaluations) {
    const std::size_t n = std::min(cfg.lambda, cfg.max_evaluations - res.evaluations);
    std::vector<Member> kids(n);
    for (auto& k : kids) {
      k.x = parents[pick(rng)].x;
      for (double& v : k.x) v += cfg.sigma * noise(rng);
    }
    parallel_for(n, cfg.workers, [&](std::size_t i) { kids[i].mae = score(kids[i].x); });
    res.evaluations += n;
    parents.insert(parents.end(), kids.begin(), kids.end());
    std::stable_sort(parents.begin(), parents.end(), by_mae);
    parents.resize(cfg.mu);
    res.best_mae_history.push_back(parents.front().mae);
  }
  res.weights = unflatten(arch, parents.front().x);
  res.mae = parents.front().mae;
  return res;
}

}  // namespace neuroevo
