#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>

#include "extremal/density.hpp"
#include "json.hpp"

namespace extremal {

/// Outcome of one statistical check. `pass` holds iff the statistic is
/// within its threshold (and any secondary condition in metadata holds).
struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t sample_size = 0;
  bool pass = false;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

nlohmann::ordered_json to_json(const TestReport& report);
/// One JSON object per line, no trailing newline.
std::string to_json_line(const TestReport& report);

/// Asymptotic Kolmogorov critical value at α = 0.01.
inline constexpr double kKsCritical = 1.628;

/// One-sample KS test of `samples` against a continuous CDF.
TestReport ks_one_sample(std::span<const double> samples,
                         const std::function<double(double)>& cdf, std::string name = "ks");

/// One-sample KS test against Exp(rate). Needs at least 100 samples.
TestReport ks_exponential(std::span<const double> samples, double rate);

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Chi-square test of independence on a bins x bins contingency table built
/// from marginal ranks, plus Pearson |r| < 3/√N. Needs 10·bins² pairs.
TestReport independence_check(std::span<const std::pair<double, double>> pairs, std::size_t bins);

/// Total variation between the binned empirical measure of `points` and the
/// binned mass of `density`, `bins` equal bins per grid axis. `points` holds
/// one coordinate tuple per sample, flattened with stride = number of axes.
/// Passes iff TV ≤ max(0.05, 3 √(bins / N)).
TestReport histogram_vs_density(std::span<const double> points, const DensityGrid& density,
                                std::size_t bins);

/// Mass of `density` collected into `bins` equal bins per axis.
std::vector<double> binned_mass(const DensityGrid& density, std::size_t bins);

}  // namespace extremal
