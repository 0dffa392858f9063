#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "extremal/config.hpp"
#include "extremal/field.hpp"
#include "extremal/verify.hpp"

namespace extremal {

/// Sizes and seed shared by the built-in statistical suites.
struct SuiteOptions {
  std::uint64_t seed = 7;
  unsigned threads = 1;
  /// Multiplies every hypothesized exponential rate; 1 is the true model.
  double rate_factor = 1.0;
  std::size_t replicates = 10'000;
  std::size_t construction_n = 100'000;
  std::size_t pairs = 100'000;
  std::size_t histogram_samples = 100'000;
  std::size_t fn_n = 10'000;
  std::size_t fn_replicates = 100'000;

  static SuiteOptions from(const VerifyOptions& v, std::uint64_t seed, unsigned threads);
};

struct NamedTable {
  std::string name;
  MeasureTable table;
};

/// Unit interval, 100 cells: λ≡1 g≡0; λ=1+x with a two-level g; λ≡1 g=x².
std::vector<NamedTable> reference_scenarios();

/// Mins over D̄, [0, 0.5], [0.25, 0.75] of construction A, KS against Exp(λ_C).
std::vector<TestReport> definition1_property1(const SuiteOptions& o);
/// Mins over [0, 0.4] and [0.6, 1] of construction A, independence check.
TestReport definition1_property2(const SuiteOptions& o);
/// First argmin location and value: construction A against the record sampler.
std::vector<TestReport> construction_equivalence(const SuiteOptions& o);
/// Argmin of f_n with uniform noise against the limit marginal density.
TestReport theorem2_argmin(const SuiteOptions& o);
/// Record-sampler histograms against the marginal and min-value densities.
std::vector<TestReport> theorem1_k1(const SuiteOptions& o);
/// Two-argmin histogram against the joint density, plus its x2-marginal.
std::vector<TestReport> theorem1_k2(const SuiteOptions& o);
/// Closed-form curve of the quadratic example, its normalization and erratum.
std::vector<TestReport> sec4_reproduction(const SuiteOptions& o);
/// Total mass of every density grid the suites and CLI emit.
std::vector<TestReport> normalization_checks(const SuiteOptions& o);

std::vector<std::string> suite_names();
/// Runs a named suite; "acceptance" runs all of them. Unknown names throw ConfigError.
std::vector<TestReport> run_suite(std::string_view name, const SuiteOptions& o);

}  // namespace extremal
