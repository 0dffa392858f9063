#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "extremal/field.hpp"
#include "extremal/noise.hpp"

namespace extremal {

struct DomainSpec {
  int dim = 1;
  Location lower{0.0, 0.0};
  Location upper{1.0, 0.0};
  std::size_t cells = 100;

  BoxDomain build() const { return BoxDomain(dim, lower, upper, cells); }
};

/// Field declaration: `constant` (value), `poly` (coeffs, or terms [[c, i, j], ...])
/// or `grid` (inline values or a CSV of cell values, row-major, axis 0 fastest).
struct FieldSpec {
  std::string kind = "constant";
  double value = 0.0;
  std::vector<double> coeffs;
  std::vector<Monomial> terms;
  std::vector<double> grid_values;

  ScalarField build(const BoxDomain& domain) const;
};

struct SampleOptions {
  std::string mode = "records";  // records | construction_a | fn
  std::size_t n = 1000;
  std::size_t k = 1;
  std::size_t replicates = 10;
  bool export_points = false;
};

struct DensityOptions {
  std::string kind = "marginal";  // marginal | joint | min_value | joint_value
  std::size_t k = 2;
  std::size_t value_cells = 200;
};

struct VerifyOptions {
  std::string suite = "definition1";
  double rate_factor = 1.0;
  std::size_t replicates = 10'000;
  std::size_t construction_n = 100'000;
  std::size_t pairs = 100'000;
  std::size_t histogram_samples = 100'000;
  std::size_t fn_n = 10'000;
  std::size_t fn_replicates = 100'000;
};

struct Sec4Options {
  std::vector<double> deltas{0.01, 0.1, 1.0, 10.0};
  std::size_t samples = 100'000;
  std::size_t bins = 20;
  std::size_t cells = 2000;
  std::size_t curve_points = 201;
};

/// One scenario, fully validated. Sections that were absent stay nullopt.
struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double delta = 1.0;  // λ is replaced by λ / delta

  std::optional<DomainSpec> domain;
  std::optional<FieldSpec> lambda;
  std::optional<FieldSpec> rho;
  std::optional<FieldSpec> g;
  std::string noise = "exponential";
  std::vector<double> noise_t;
  std::vector<double> noise_cdf;

  SampleOptions sample;
  DensityOptions density;
  VerifyOptions verify;
  Sec4Options sec4;

  NoiseSpec noise_spec() const;
  /// Throws ConfigError naming the first missing section.
  void require(std::initializer_list<std::string_view> sections) const;
};

/// Parses TOML text. Relative grid CSV paths resolve against `base_dir`.
/// Unknown keys, wrong types and out-of-range values throw ConfigError.
ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Reads all numbers from a CSV file, skipping '#' comment lines.
std::vector<double> read_csv_values(const std::filesystem::path& path);

}  // namespace extremal
