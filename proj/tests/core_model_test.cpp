#include <gtest/gtest.h>

#include <random>

#include "neuroevo/core_model.hpp"

using namespace neuroevo;

namespace {

SearchSpace reference_space() {
  SearchSpace s;
  s.min_hidden_layers = 1;
  s.max_hidden_layers = 8;
  s.min_neurons = 1;
  s.max_neurons = 16;
  s.min_look_back = 1;
  s.max_look_back = 30;
  s.input_dim = 1;
  s.output_dim = 1;
  return s;
}

Architecture arch(std::vector<int> layers, int look_back) {
  Architecture a;
  a.layer_sizes = std::move(layers);
  a.look_back = look_back;
  return a;
}

}  // namespace

TEST(ValidateArchitecture, ListingTwoArchitectureIsInside) {
  EXPECT_TRUE(validate_architecture(arch({1, 2, 2, 1}, 2), reference_space()).empty());
}

TEST(ValidateArchitecture, MinimalArchitectureIsInside) {
  EXPECT_TRUE(validate_architecture(arch({1, 1, 1}, 1), reference_space()).empty());
}

TEST(ValidateArchitecture, OneViolationPerBound) {
  const auto v = validate_architecture(arch({1, 20, 1}, 2), reference_space());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "neurons 20 > max 16");

  const auto many = validate_architecture(arch({2, 0, 17, 1, 1, 1, 1, 1, 1, 1, 3}, 31), reference_space());
  // input, output, layer count, two widths, look_back
  EXPECT_EQ(many.size(), 6u);
}

// Exhaustive check over a small universe of architectures.
TEST(ValidateArchitecture, EmptyIffEveryFieldInBounds) {
  SearchSpace s;
  s.min_hidden_layers = 1;
  s.max_hidden_layers = 2;
  s.min_neurons = 2;
  s.max_neurons = 3;
  s.min_look_back = 2;
  s.max_look_back = 3;
  for (int in = 1; in <= 2; ++in) {
    for (int out = 1; out <= 2; ++out) {
      for (int lb = 1; lb <= 4; ++lb) {
        for (int layers = 0; layers <= 3; ++layers) {
          const int combos = layers == 0 ? 1 : static_cast<int>(std::pow(4, layers));
          for (int code = 0; code < combos; ++code) {
            std::vector<int> sizes{in};
            bool inside = in == 1 && out == 1 && lb >= 2 && lb <= 3 && layers >= 1 && layers <= 2;
            int c = code;
            for (int l = 0; l < layers; ++l) {
              const int w = 1 + c % 4;  // 1..4
              c /= 4;
              sizes.push_back(w);
              inside = inside && w >= 2 && w <= 3;
            }
            sizes.push_back(out);
            EXPECT_EQ(validate_architecture(arch(sizes, lb), s).empty(), inside);
          }
        }
      }
    }
  }
}

TEST(SearchSpace, ErrorsForInvertedAndNonPositiveBounds) {
  SearchSpace s = reference_space();
  EXPECT_TRUE(space_errors(s).empty());
  s.min_neurons = 5;
  s.max_neurons = 4;
  s.min_look_back = 0;
  EXPECT_EQ(space_errors(s).size(), 2u);
}

TEST(GenomeDecode, AffixesInputAndOutputDims) {
  Genome g{{12, 13, 9, 10, 12, 6}, 17};
  const auto a = to_architecture(g, 1, 1);
  EXPECT_EQ(a.layer_sizes, (std::vector<int>{1, 12, 13, 9, 10, 12, 6, 1}));
  EXPECT_EQ(a.look_back, 17);
  EXPECT_EQ(to_genome(a), g);
}

TEST(SolutionFitness, ReturnsStoredMetric) {
  Solution sol{arch({1, 12, 13, 9, 10, 12, 6, 1}, 17), std::nullopt, {{"log_p", -12.215031852558125}}};
  EXPECT_EQ(solution_fitness(sol, "log_p"), -12.215031852558125);
  sol.metrics["log_p"] = 0.0;
  EXPECT_EQ(solution_fitness(sol, "log_p"), 0.0);
}

TEST(SolutionFitness, MissingKeyNamesTheKey) {
  Solution sol{arch({1, 2, 2, 1}, 2), std::nullopt, {}};
  try {
    solution_fitness(sol, "log_p");
    FAIL() << "expected MissingKeyError";
  } catch (const MissingKeyError& e) {
    EXPECT_EQ(e.key(), "log_p");
    EXPECT_NE(std::string(e.what()).find("log_p"), std::string::npos);
  }
}

TEST(Solution, RejectsMismatchedWeights) {
  EXPECT_THROW(make_solution(arch({1, 2, 1}, 1), {}, zero_weights(arch({1, 3, 1}, 1))), ShapeError);
  EXPECT_NO_THROW(make_solution(arch({1, 2, 1}, 1), {}, zero_weights(arch({1, 2, 1}, 1))));
}
