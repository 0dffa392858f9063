#include <gtest/gtest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "extremal/density.hpp"
#include "extremal/errors.hpp"
#include "extremal/parallel.hpp"
#include "extremal/rng.hpp"
#include "extremal/sampler.hpp"
#include "extremal/suites.hpp"
#include "extremal/verify.hpp"

using namespace extremal;

namespace {

std::vector<double> exponentials(std::size_t n, double rate, RngSeed seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = rng.exponential() / rate;
  return out;
}

DensityGrid uniform_grid(std::size_t cells) {
  DensityGrid grid;
  grid.axes.push_back({0.0, 1.0, cells});
  grid.values.assign(cells, 1.0);
  return grid;
}

MeasureTable square_offset(double delta, std::size_t cells) {
  return build_measure_table(BoxDomain::unit_interval(cells), ScalarField::constant(1.0 / delta),
                             ScalarField::polynomial_1d({0.0, 0.0, 1.0}));
}

SuiteOptions small_suite(std::uint64_t seed) {
  SuiteOptions o;
  o.seed = seed;
  o.replicates = 2000;
  o.construction_n = 10'000;
  o.pairs = 5000;
  return o;
}

}  // namespace

TEST(KsExponential, AcceptsTheRightRate) {
  const auto r = ks_exponential(exponentials(100'000, 1.0, {1, 0}), 1.0);
  EXPECT_TRUE(r.pass) << r.statistic;
  EXPECT_NEAR(r.threshold, 1.628 / std::sqrt(1e5), 1e-15);
  EXPECT_EQ(r.sample_size, 100'000u);
}

TEST(KsExponential, RejectsWrongRateAndConstants) {
  EXPECT_FALSE(ks_exponential(exponentials(100'000, 2.0, {2, 0}), 1.0).pass);
  EXPECT_FALSE(ks_exponential(std::vector<double>(1000, 0.7), 1.0).pass);
}

TEST(KsExponential, InputErrors) {
  EXPECT_THROW(ks_exponential(std::vector<double>{}, 1.0), InputError);
  EXPECT_THROW(ks_exponential(exponentials(99, 1.0, {3, 0}), 1.0), SampleSizeError);
  EXPECT_THROW(ks_exponential(exponentials(200, 1.0, {3, 0}), 0.0), InputError);
}

TEST(KsTwoSample, SameLawShiftedLawIdenticalArrays) {
  const auto a = exponentials(10'000, 1.0, {4, 0});
  const auto b = exponentials(10'000, 1.0, {4, 1});
  EXPECT_TRUE(ks_two_sample(a, b).pass);
  auto shifted = b;
  for (auto& v : shifted) v += 0.5;
  EXPECT_FALSE(ks_two_sample(a, shifted).pass);
  const auto same = ks_two_sample(a, a);
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_TRUE(same.pass);
  EXPECT_THROW(ks_two_sample(a, std::vector<double>{}), InputError);
}

TEST(KsTwoSample, StatisticMatchesHandComputation) {
  // Empirical CDFs of {1,2,3} and {2.5} differ most just after 2: 2/3 - 0.
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{2.5};
  EXPECT_NEAR(ks_two_sample(a, b).statistic, 2.0 / 3.0, 1e-15);
}

TEST(Independence, DependentAndIndependentPairs) {
  Rng rng({5, 0});
  std::vector<std::pair<double, double>> same;
  std::vector<std::pair<double, double>> indep;
  for (int i = 0; i < 100'000; ++i) {
    const double u = rng.uniform();
    same.push_back({u, u});
    indep.push_back({u, rng.uniform()});
  }
  EXPECT_FALSE(independence_check(same, 10).pass);
  const auto r = independence_check(indep, 10);
  EXPECT_TRUE(r.pass) << r.statistic;
  EXPECT_EQ(r.metadata["degrees_of_freedom"].get<double>(), 81.0);
  EXPECT_NEAR(r.threshold, 113.51, 0.01);
}

TEST(Independence, SampleSizeAndBinErrors) {
  std::vector<std::pair<double, double>> pairs(999, {0.1, 0.2});
  EXPECT_THROW(independence_check(pairs, 10), SampleSizeError);
  EXPECT_THROW(independence_check(pairs, 1), InputError);
}

TEST(Independence, DefinitionOnePropertyTwoOnConstructionA) {
  const auto r = definition1_property2(small_suite(7));
  EXPECT_TRUE(r.pass) << r.statistic;
}

TEST(Histogram, UniformSamplesAgainstUniformDensity) {
  Rng rng({6, 0});
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = rng.uniform();
  const auto r = histogram_vs_density(xs, uniform_grid(50), 20);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.statistic, 0.01);
  EXPECT_EQ(r.threshold, 0.05);
}

TEST(Histogram, MismatchedConcentrationFails) {
  const auto narrow = square_offset(0.1, 1000);
  const auto xs = parallel_map(20'000, 1, [&](std::size_t r) {
    return sample_W_records(narrow, 1, {8, r})[0].argmins[0][0];
  });
  EXPECT_FALSE(histogram_vs_density(xs, marginal_argmin_density(square_offset(10.0, 1000)), 20).pass);
  EXPECT_TRUE(histogram_vs_density(xs, marginal_argmin_density(narrow), 20).pass);
}

TEST(Histogram, InputErrors) {
  auto grid = uniform_grid(10);
  grid.values[0] = 3.0;
  const std::vector<double> xs{0.1, 0.2};
  EXPECT_THROW(histogram_vs_density(xs, grid, 5), InputError);
  EXPECT_THROW(histogram_vs_density(std::vector<double>{}, uniform_grid(10), 5), InputError);
  DensityGrid square;
  square.axes = {{0, 1, 4}, {0, 1, 4}};
  square.values.assign(16, 1.0);
  EXPECT_THROW(histogram_vs_density(std::vector<double>{0.1, 0.2, 0.3}, square, 2), InputError);
}

TEST(Histogram, BinnedMassSplitsStraddlingCells) {
  DensityGrid grid;
  grid.axes.push_back({0.0, 1.0, 3});
  grid.values = {3.0, 0.0, 0.0};
  const auto mass = binned_mass(grid, 2);
  EXPECT_NEAR(mass[0], 1.0, 1e-15);
  EXPECT_NEAR(mass[1], 0.0, 1e-15);
  grid.values = {0.0, 3.0, 0.0};
  const auto middle = binned_mass(grid, 2);
  EXPECT_NEAR(middle[0], 0.5, 1e-15);
  EXPECT_NEAR(middle[1], 0.5, 1e-15);
}

TEST(Calibration, NullRejectionRatesOverTwoHundredSeeds) {
  constexpr int kSeeds = 200;
  int ks_one = 0, ks_two = 0, indep = 0, hist = 0;
  for (int s = 0; s < kSeeds; ++s) {
    const std::uint64_t seed = 1000 + s;
    ks_one += !ks_exponential(exponentials(1000, 2.0, {seed, 0}), 2.0).pass;
    ks_two += !ks_two_sample(exponentials(1000, 1.0, {seed, 1}), exponentials(700, 1.0, {seed, 2})).pass;
    Rng rng({seed, 3});
    std::vector<std::pair<double, double>> pairs(2000);
    for (auto& p : pairs) p = {rng.uniform(), rng.exponential()};
    indep += !independence_check(pairs, 10).pass;
    std::vector<double> xs(10'000);
    for (auto& x : xs) x = rng.uniform();
    hist += !histogram_vs_density(xs, uniform_grid(20), 20).pass;
  }
  EXPECT_LE(ks_one, kSeeds / 20);
  EXPECT_LE(ks_two, kSeeds / 20);
  EXPECT_LE(indep, kSeeds / 20);
  EXPECT_LE(hist, kSeeds / 20);
}

TEST(Reports, JsonLineAndDeterminism) {
  const auto a = ks_exponential(exponentials(500, 1.0, {9, 0}), 1.0);
  const auto b = ks_exponential(exponentials(500, 1.0, {9, 0}), 1.0);
  EXPECT_EQ(to_json_line(a), to_json_line(b));
  const auto j = nlohmann::ordered_json::parse(to_json_line(a));
  EXPECT_EQ(j["name"], "ks_exponential");
  EXPECT_EQ(j["sample_size"], 500);
  EXPECT_EQ(j["pass"], a.pass);
  EXPECT_EQ(j["pass"].get<bool>(), a.statistic < a.threshold);
}

TEST(Suites, DefinitionOneIsReproducibleAndPasses) {
  const auto a = run_suite("definition1", small_suite(7));
  const auto b = run_suite("definition1", small_suite(7));
  ASSERT_EQ(a.size(), b.size());
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(to_json_line(a[i]), to_json_line(b[i]));
    EXPECT_TRUE(a[i].pass) << a[i].name;
  }
}

TEST(Suites, ThreadCountDoesNotChangeReports) {
  auto one = small_suite(11);
  auto four = one;
  four.threads = 4;
  const auto a = run_suite("definition1", one);
  const auto b = run_suite("definition1", four);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(to_json_line(a[i]), to_json_line(b[i]));
}

TEST(Suites, WrongRateFails) {
  auto o = small_suite(7);
  o.rate_factor = 3.0;
  for (const auto& r : definition1_property1(o)) EXPECT_FALSE(r.pass) << r.name;
}

TEST(Suites, NormalizationAndClosedFormPass) {
  for (const auto& name : {"normalization", "sec4"}) {
    auto o = small_suite(7);
    o.histogram_samples = 20'000;
    for (const auto& r : run_suite(name, o)) EXPECT_TRUE(r.pass) << r.name << " " << r.statistic;
  }
}

TEST(Suites, UnknownNameIsAConfigError) {
  EXPECT_THROW(run_suite("nope", SuiteOptions{}), ConfigError);
  EXPECT_EQ(suite_names().back(), "acceptance");
}
