#include "extremal/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "extremal/errors.hpp"
#include "toml.hpp"

namespace extremal {

namespace {

using KeySet = std::set<std::string, std::less<>>;

void reject_unknown(const toml::table& table, const KeySet& allowed, std::string_view where) {
  for (const auto& [key, node] : table) {
    if (!allowed.count(key.str())) {
      throw ConfigError(fmt::format("unknown key '{}' in {}", key.str(), where));
    }
  }
}

const toml::table* section(const toml::table& root, std::string_view name) {
  const auto* node = root.get(name);
  if (!node) return nullptr;
  const auto* table = node->as_table();
  if (!table) throw ConfigError(fmt::format("'{}' must be a table", name));
  return table;
}

double get_double(const toml::table& t, std::string_view key, double fallback,
                  std::string_view where) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  auto v = node->value<double>();
  if (!v || !std::isfinite(*v)) {
    throw ConfigError(fmt::format("{}.{} must be a finite number", where, key));
  }
  return *v;
}

std::int64_t get_int(const toml::table& t, std::string_view key, std::int64_t fallback,
                     std::string_view where) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (!node->is_integer()) throw ConfigError(fmt::format("{}.{} must be an integer", where, key));
  return *node->value<std::int64_t>();
}

std::size_t get_count(const toml::table& t, std::string_view key, std::size_t fallback,
                      std::string_view where) {
  const auto v = get_int(t, key, static_cast<std::int64_t>(fallback), where);
  if (v <= 0) throw ConfigError(fmt::format("{}.{} must be positive", where, key));
  return static_cast<std::size_t>(v);
}

std::string get_string(const toml::table& t, std::string_view key, std::string fallback,
                       std::string_view where) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (!node->is_string()) throw ConfigError(fmt::format("{}.{} must be a string", where, key));
  return *node->value<std::string>();
}

bool get_bool(const toml::table& t, std::string_view key, bool fallback, std::string_view where) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (!node->is_boolean()) throw ConfigError(fmt::format("{}.{} must be true or false", where, key));
  return *node->value<bool>();
}

std::vector<double> get_doubles(const toml::table& t, std::string_view key,
                                std::string_view where) {
  std::vector<double> out;
  const auto* node = t.get(key);
  if (!node) return out;
  const auto* arr = node->as_array();
  if (!arr) throw ConfigError(fmt::format("{}.{} must be an array of numbers", where, key));
  for (const auto& elem : *arr) {
    auto v = elem.value<double>();
    if (!v || !std::isfinite(*v)) {
      throw ConfigError(fmt::format("{}.{} must contain finite numbers only", where, key));
    }
    out.push_back(*v);
  }
  return out;
}

DomainSpec parse_domain(const toml::table& t) {
  reject_unknown(t, {"dim", "lower", "upper", "cells"}, "[domain]");
  DomainSpec d;
  d.dim = static_cast<int>(get_int(t, "dim", 1, "domain"));
  if (d.dim != 1 && d.dim != 2) throw ConfigError("domain.dim must be 1 or 2");
  const auto lower = get_doubles(t, "lower", "domain");
  const auto upper = get_doubles(t, "upper", "domain");
  const auto dim = static_cast<std::size_t>(d.dim);
  if (!lower.empty() && lower.size() != dim) throw ConfigError("domain.lower needs dim entries");
  if (!upper.empty() && upper.size() != dim) throw ConfigError("domain.upper needs dim entries");
  for (std::size_t a = 0; a < dim; ++a) {
    d.lower[a] = lower.empty() ? 0.0 : lower[a];
    d.upper[a] = upper.empty() ? 1.0 : upper[a];
    if (!(d.upper[a] > d.lower[a])) throw ConfigError("domain.upper must exceed domain.lower");
  }
  d.cells = get_count(t, "cells", 100, "domain");
  return d;
}

FieldSpec parse_field(const toml::table& t, std::string_view name,
                      const std::filesystem::path& base_dir) {
  const std::string where = std::string(name);
  reject_unknown(t, {"kind", "value", "coeffs", "terms", "values", "csv"}, "[" + where + "]");
  FieldSpec f;
  f.kind = get_string(t, "kind", "", where);
  if (f.kind == "constant") {
    if (!t.contains("value")) throw ConfigError(where + ".value is required for a constant field");
    f.value = get_double(t, "value", 0.0, where);
  } else if (f.kind == "poly") {
    f.coeffs = get_doubles(t, "coeffs", where);
    if (const auto* node = t.get("terms")) {
      const auto* arr = node->as_array();
      if (!arr) throw ConfigError(where + ".terms must be an array of [c, i, j]");
      for (const auto& elem : *arr) {
        const auto* term = elem.as_array();
        if (!term || term->size() != 3) {
          throw ConfigError(where + ".terms entries must be [coefficient, power_x, power_y]");
        }
        auto c = term->get(0)->value<double>();
        auto i = term->get(1)->value<std::int64_t>();
        auto j = term->get(2)->value<std::int64_t>();
        if (!c || !i || !j || *i < 0 || *j < 0 || !term->get(1)->is_integer() ||
            !term->get(2)->is_integer()) {
          throw ConfigError(where + ".terms powers must be non-negative integers");
        }
        f.terms.push_back({*c, static_cast<unsigned>(*i), static_cast<unsigned>(*j)});
      }
    }
    if (f.coeffs.empty() == f.terms.empty()) {
      throw ConfigError(where + " needs exactly one of coeffs or terms");
    }
  } else if (f.kind == "grid") {
    f.grid_values = get_doubles(t, "values", where);
    const auto csv = get_string(t, "csv", "", where);
    if (f.grid_values.empty() == csv.empty()) {
      throw ConfigError(where + " needs exactly one of values or csv");
    }
    if (!csv.empty()) {
      std::filesystem::path p(csv);
      if (p.is_relative()) p = base_dir / p;
      f.grid_values = read_csv_values(p);
    }
  } else {
    throw ConfigError(where + ".kind must be constant, poly or grid");
  }
  return f;
}

}  // namespace

ScalarField FieldSpec::build(const BoxDomain& domain) const {
  if (kind == "constant") return ScalarField::constant(value);
  if (kind == "poly") {
    return coeffs.empty() ? ScalarField::polynomial(terms) : ScalarField::polynomial_1d(coeffs);
  }
  if (grid_values.size() != domain.cell_count()) {
    throw ConfigError(fmt::format("grid field has {} values but the domain has {} cells",
                                  grid_values.size(), domain.cell_count()));
  }
  return ScalarField::grid(domain, grid_values);
}

NoiseSpec ScenarioConfig::noise_spec() const {
  try {
    if (noise == "table") return NoiseSpec::table(noise_t, noise_cdf);
    return NoiseSpec::from_name(noise);
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid noise: ") + e.what());
  }
}

void ScenarioConfig::require(std::initializer_list<std::string_view> sections) const {
  for (auto s : sections) {
    const bool present = (s == "domain" && domain) || (s == "lambda" && lambda) ||
                         (s == "rho" && rho) || (s == "g" && g);
    if (!present) throw ConfigError(fmt::format("missing required section [{}]", s));
  }
}

std::vector<double> read_csv_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string token;
    while (fields >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", path.string(), token));
      }
      out.push_back(v);
    }
  }
  return out;
}

ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(fmt::format("TOML syntax error at line {}: {}", e.source().begin.line,
                                  e.description()));
  }
  reject_unknown(root,
                 {"name", "seed", "threads", "delta", "domain", "lambda", "rho", "g", "noise",
                  "sample", "density", "verify", "example_sec4"},
                 "top level");

  ScenarioConfig c;
  c.name = get_string(root, "name", c.name, "name");
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("name must be a nonempty file-name-safe string");
  }
  const auto seed = get_int(root, "seed", 1, "seed");
  if (seed < 0) throw ConfigError("seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.threads = static_cast<unsigned>(get_count(root, "threads", 1, "threads"));
  c.delta = get_double(root, "delta", 1.0, "delta");
  if (!(c.delta > 0.0)) throw ConfigError("delta must be positive");

  if (const auto* t = section(root, "domain")) c.domain = parse_domain(*t);
  if (const auto* t = section(root, "lambda")) c.lambda = parse_field(*t, "lambda", base_dir);
  if (const auto* t = section(root, "rho")) c.rho = parse_field(*t, "rho", base_dir);
  if (const auto* t = section(root, "g")) c.g = parse_field(*t, "g", base_dir);

  if (const auto* t = section(root, "noise")) {
    reject_unknown(*t, {"family", "t", "cdf"}, "[noise]");
    c.noise = get_string(*t, "family", c.noise, "noise");
    c.noise_t = get_doubles(*t, "t", "noise");
    c.noise_cdf = get_doubles(*t, "cdf", "noise");
    c.noise_spec();
  }

  if (const auto* t = section(root, "sample")) {
    reject_unknown(*t, {"mode", "n", "k", "replicates", "export_points"}, "[sample]");
    auto& s = c.sample;
    s.mode = get_string(*t, "mode", s.mode, "sample");
    if (s.mode != "records" && s.mode != "construction_a" && s.mode != "fn") {
      throw ConfigError("sample.mode must be records, construction_a or fn");
    }
    s.n = get_count(*t, "n", s.n, "sample");
    s.k = get_count(*t, "k", s.k, "sample");
    s.replicates = get_count(*t, "replicates", s.replicates, "sample");
    s.export_points = get_bool(*t, "export_points", s.export_points, "sample");
  }

  if (const auto* t = section(root, "density")) {
    reject_unknown(*t, {"kind", "k", "value_cells"}, "[density]");
    auto& d = c.density;
    d.kind = get_string(*t, "kind", d.kind, "density");
    if (d.kind != "marginal" && d.kind != "joint" && d.kind != "min_value" &&
        d.kind != "joint_value") {
      throw ConfigError("density.kind must be marginal, joint, min_value or joint_value");
    }
    d.k = get_count(*t, "k", d.k, "density");
    d.value_cells = get_count(*t, "value_cells", d.value_cells, "density");
  }

  if (const auto* t = section(root, "verify")) {
    reject_unknown(*t,
                   {"suite", "rate_factor", "replicates", "construction_n", "pairs",
                    "histogram_samples", "fn_n", "fn_replicates"},
                   "[verify]");
    auto& v = c.verify;
    v.suite = get_string(*t, "suite", v.suite, "verify");
    v.rate_factor = get_double(*t, "rate_factor", v.rate_factor, "verify");
    if (!(v.rate_factor > 0.0)) throw ConfigError("verify.rate_factor must be positive");
    v.replicates = get_count(*t, "replicates", v.replicates, "verify");
    v.construction_n = get_count(*t, "construction_n", v.construction_n, "verify");
    v.pairs = get_count(*t, "pairs", v.pairs, "verify");
    v.histogram_samples = get_count(*t, "histogram_samples", v.histogram_samples, "verify");
    v.fn_n = get_count(*t, "fn_n", v.fn_n, "verify");
    v.fn_replicates = get_count(*t, "fn_replicates", v.fn_replicates, "verify");
  }

  if (const auto* t = section(root, "example_sec4")) {
    reject_unknown(*t, {"deltas", "samples", "bins", "cells", "curve_points"}, "[example_sec4]");
    auto& e = c.sec4;
    if (t->contains("deltas")) e.deltas = get_doubles(*t, "deltas", "example_sec4");
    if (e.deltas.empty()) throw ConfigError("example_sec4.deltas must be nonempty");
    for (double d : e.deltas) {
      if (!(d > 0.0)) throw ConfigError("example_sec4.deltas must be positive");
    }
    e.samples = get_count(*t, "samples", e.samples, "example_sec4");
    e.bins = get_count(*t, "bins", e.bins, "example_sec4");
    e.cells = get_count(*t, "cells", e.cells, "example_sec4");
    e.curve_points = get_count(*t, "curve_points", e.curve_points, "example_sec4");
    if (e.curve_points < 2) throw ConfigError("example_sec4.curve_points must be at least 2");
  }

  if (c.domain) {
    const auto domain = c.domain->build();
    for (const auto* f : {&c.lambda, &c.rho, &c.g}) {
      if (*f && (*f)->kind == "grid") (*f)->build(domain);
    }
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace extremal
