#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "neuroevo/data.hpp"
#include "oracles.hpp"

using namespace neuroevo;

namespace {

TimeSeriesDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_series(in);
}

}  // namespace

TEST(GenerateSine, QuarterPeriodGrid) {
  const auto s = generate_sine({4, 4.0, 1.0, 0.0, 0.0, 0});
  ASSERT_EQ(s.steps(), 4u);
  EXPECT_NEAR(s.at(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(s.at(1, 0), 1.0, 1e-12);
  EXPECT_NEAR(s.at(2, 0), 0.0, 1e-12);
  EXPECT_NEAR(s.at(3, 0), -1.0, 1e-12);
}

TEST(GenerateSine, NoiseFreeIgnoresSeed) {
  const auto a = generate_sine({100, 7.0, 2.0, 0.5, 0.0, 1});
  const auto b = generate_sine({100, 7.0, 2.0, 0.5, 0.0, 999});
  EXPECT_EQ(a.values(), b.values());
}

TEST(GenerateSine, NoiseIsSeeded) {
  const auto a = generate_sine({100, 7.0, 2.0, 0.5, 0.1, 1});
  const auto b = generate_sine({100, 7.0, 2.0, 0.5, 0.1, 1});
  const auto c = generate_sine({100, 7.0, 2.0, 0.5, 0.1, 2});
  EXPECT_EQ(a.values(), b.values());
  EXPECT_NE(a.values(), c.values());
}

TEST(GenerateSine, MeanAbsoluteValueOverFullPeriods) {
  const auto s = generate_sine({1000, 100.0, 1.0, 0.0, 0.0, 0});
  double m = 0.0;
  for (double v : s.values()) m += std::abs(v);
  m /= 1000.0;
  EXPECT_NEAR(m, 2.0 / std::numbers::pi, 1e-3);
  EXPECT_NEAR(m, oracle::mean_abs_sine(1000, 100.0), 1e-12);
}

TEST(GenerateSine, RejectsTooShort) { EXPECT_THROW(generate_sine({1, 4.0, 1.0, 0.0, 0.0, 0}), InvalidArgument); }

TEST(LoadSeries, SingleColumn) {
  const auto s = parse("1.0\n2.0\n3.0\n");
  EXPECT_EQ(s.steps(), 3u);
  EXPECT_EQ(s.features(), 1u);
  EXPECT_EQ(s.at(2, 0), 3.0);
}

TEST(LoadSeries, HeaderDetected) {
  const auto s = parse("a,b\n1,2\n3,4\n");
  EXPECT_EQ(s.steps(), 2u);
  EXPECT_EQ(s.features(), 2u);
  EXPECT_EQ(s.at(1, 1), 4.0);
}

TEST(LoadSeries, RaggedRowsNamesRow) {
  try {
    parse("1,2\n3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(LoadSeries, ErrorsForEmptyAndGarbage) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("x,y\n"), ParseError);
  try {
    parse("1\n2\nfoo\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(LoadSeries, ReadsFileFromDisk) {
  const auto path = std::filesystem::temp_directory_path() / "neuroevo_series_test.csv";
  {
    std::ofstream f(path);
    f << "value\r\n0.5\r\n-0.25\r\n\r\n1.5\r\n";
  }
  const auto s = load_series(path.string());
  EXPECT_EQ(s.steps(), 3u);
  EXPECT_EQ(s.at(1, 0), -0.25);
  std::filesystem::remove(path);
  EXPECT_THROW(load_series(path.string()), ParseError);
}

TEST(Window, DirectConstruction) {
  const auto w = window(TimeSeriesDataset({1, 2, 3, 4}, 1), 2);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w.inputs(), (std::vector<double>{1, 2, 2, 3}));
  EXPECT_EQ(w.targets(), (std::vector<double>{3, 4}));
}

TEST(Window, CountAndBoundary) {
  const auto s = generate_sine({10, 5.0, 1.0, 0.0, 0.0, 0});
  EXPECT_EQ(window(s, 2).size(), 8u);
  EXPECT_EQ(window(s, 9).size(), 1u);
  EXPECT_THROW(window(s, 10), InvalidArgument);
  EXPECT_THROW(window(s, 0), InvalidArgument);
}

// Window i followed by its target reproduces rows i..i+look_back.
TEST(Window, PropertyContiguousAndNoOffByOne) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t t_len = std::uniform_int_distribution<std::size_t>(2, 60)(rng);
    const std::size_t f = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    const std::size_t lb = std::uniform_int_distribution<std::size_t>(1, t_len - 1)(rng);
    std::vector<double> v(t_len * f);
    std::iota(v.begin(), v.end(), 0.0);
    const TimeSeriesDataset s(v, f);
    const auto w = window(s, lb);
    ASSERT_EQ(w.size(), t_len - lb);
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t k = 0; k < lb; ++k) {
        for (std::size_t j = 0; j < f; ++j) EXPECT_EQ(w.input(i, k)[j], s.at(i + k, j));
      }
      for (std::size_t j = 0; j < f; ++j) EXPECT_EQ(w.target(i)[j], s.at(i + lb, j));
    }
  }
}

TEST(ChronologicalSplit, SeventyThirty) {
  const auto s = generate_sine({1000, 100.0, 1.0, 0.0, 0.0, 0});
  const auto split = chronological_split(s, 0.7);
  EXPECT_EQ(split.train.steps(), 700u);
  EXPECT_EQ(split.test.steps(), 300u);
  EXPECT_EQ(split.test.at(0, 0), s.at(700, 0));
  EXPECT_THROW(chronological_split(s, 1.0), InvalidArgument);
}
