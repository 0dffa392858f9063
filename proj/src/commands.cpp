#include "extremal/commands.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "extremal/density.hpp"
#include "extremal/errors.hpp"
#include "extremal/io.hpp"
#include "extremal/parallel.hpp"
#include "extremal/quadrature.hpp"
#include "extremal/sampler.hpp"
#include "extremal/suites.hpp"

namespace extremal {

namespace {

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct Context {
  std::filesystem::path out_dir;
  std::uint64_t seed;
  unsigned threads;
  std::ostream* log;

  void note(const std::string& line) const {
    if (log) *log << line << '\n';
  }
  std::filesystem::path file(const ScenarioConfig& c, std::string_view suffix) const {
    return out_dir / fmt::format("{}_{}", c.name, suffix);
  }
  void write(const std::filesystem::path& path, std::string_view contents) const {
    write_file_atomic(path, contents);
    note("wrote " + path.string());
  }
};

Context context(const ScenarioConfig& c, const CommandOptions& o) {
  return {o.resolved_out_dir(), o.seed.value_or(c.seed), o.threads.value_or(c.threads), o.log};
}

MeasureTable scenario_table(const ScenarioConfig& c) {
  c.require({"domain", "lambda", "g"});
  const auto domain = c.domain->build();
  return build_measure_table(domain, c.lambda->build(domain).scaled(1.0 / c.delta),
                             c.g->build(domain));
}

Metadata base_metadata(const ScenarioConfig& c, const Context& ctx, std::string command) {
  return {{"tool", "extremal"},
          {"command", std::move(command)},
          {"scenario", c.name},
          {"seed", std::to_string(ctx.seed)},
          {"delta", format_double(c.delta)}};
}

}  // namespace

std::filesystem::path CommandOptions::resolved_out_dir() const {
  if (out_dir) return *out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return ".";
}

int cmd_sample(const ScenarioConfig& c, const CommandOptions& options) {
  const auto ctx = context(c, options);
  const auto& s = c.sample;
  const auto table = scenario_table(c);
  const auto domain = table.domain();
  const RngSeed base{ctx.seed, 0};

  std::vector<KArgminRecord> records;
  std::vector<SampleFunction> functions;
  if (s.mode == "records") {
    records = parallel_map(s.replicates, ctx.threads, [&](std::size_t r) {
      return sample_W_records(table, s.k, base.with_stream(r));
    });
  } else if (s.mode == "construction_a") {
    functions = parallel_map(s.replicates, ctx.threads, [&](std::size_t r) {
      return sample_W_construction_a(table, s.n, base.with_stream(r));
    });
  } else {
    c.require({"rho"});
    const auto model = FnModel::build(domain, c.lambda->build(domain).scaled(1.0 / c.delta),
                                      c.rho->build(domain), c.g->build(domain));
    const auto noise = c.noise_spec();
    if (s.export_points) {
      functions = parallel_map(s.replicates, ctx.threads, [&](std::size_t r) {
        return sample_fn(model, s.n, noise, base.with_stream(r));
      });
    } else {
      records = parallel_map(s.replicates, ctx.threads, [&](std::size_t r) {
        return fn_first_k(model, s.n, s.k, noise, base.with_stream(r));
      });
    }
  }
  if (records.empty()) {
    records = parallel_map(functions.size(), ctx.threads,
                           [&](std::size_t r) { return extract_k_argmins(functions[r], s.k); });
  }

  auto meta = base_metadata(c, ctx, "sample");
  meta.emplace_back("mode", s.mode);
  meta.emplace_back("k", std::to_string(s.k));
  meta.emplace_back("replicates", std::to_string(s.replicates));
  if (s.mode != "records") meta.emplace_back("n", std::to_string(s.n));
  if (s.mode == "fn") meta.emplace_back("noise", c.noise_spec().name());

  ctx.write(ctx.file(c, "argmins.csv"), records_csv(records, domain.dim(), meta));
  if (s.export_points && !functions.empty()) {
    ctx.write(ctx.file(c, "points.csv"), points_csv(functions, domain.dim(), meta));
  }
  return kExitOk;
}

int cmd_density(const ScenarioConfig& c, const CommandOptions& options) {
  const auto ctx = context(c, options);
  const auto& d = c.density;
  const auto table = scenario_table(c);

  DensityGrid grid;
  std::string x_label = "x";
  if (d.kind == "marginal" || (d.kind == "joint" && d.k == 1)) {
    grid = marginal_argmin_density(table);
  } else if (d.kind == "joint") {
    grid = joint_density_grid(table, d.k, ctx.threads);
  } else if (d.kind == "min_value") {
    grid = min_value_grid(table, d.value_cells);
    x_label = "t";
  } else {
    grid = joint_location_value_grid(table, d.value_cells);
  }
  const double mass = grid.total_mass();
  if (std::abs(mass - 1.0) > 1e-4) {
    throw ConsistencyError(fmt::format("density grid mass {} is not 1 within 1e-4", mass));
  }

  auto meta = base_metadata(c, ctx, "density");
  meta.emplace_back("requested", d.kind);
  if (d.kind == "joint") meta.emplace_back("k", std::to_string(d.k));
  meta.emplace_back("total_mass", format_double(mass));
  ctx.write(ctx.file(c, "density.csv"), density_grid_csv(grid, meta));

  if (grid.axes.size() == 1) {
    PlotSeries series;
    series.label = to_string(grid.kind);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      series.x.push_back(grid.axes[0].center(i));
      series.y.push_back(grid.values[i]);
    }
    PlotSpec plot{fmt::format("{} ({})", c.name, to_string(grid.kind)), x_label, "density",
                  {series}};
    ctx.write(ctx.file(c, "density.svg"), svg_line_plot(plot));
  }
  return kExitOk;
}

int cmd_verify(const ScenarioConfig& c, const CommandOptions& options) {
  const auto ctx = context(c, options);
  const auto reports = run_suite(c.verify.suite, SuiteOptions::from(c.verify, ctx.seed, ctx.threads));

  std::string lines;
  CsvWriter csv;
  for (const auto& [k, v] : base_metadata(c, ctx, "verify")) csv.comment(k, v);
  csv.comment("suite", c.verify.suite);
  csv.header({"name", "statistic", "threshold", "sample_size", "pass"});
  bool all_pass = true;
  for (const auto& r : reports) {
    lines += to_json_line(r);
    lines += '\n';
    csv.row({r.name, format_double(r.statistic), format_double(r.threshold),
             std::to_string(r.sample_size), r.pass ? "true" : "false"});
    all_pass = all_pass && r.pass;
    ctx.note(fmt::format("{:<4} {} statistic={:.6g} threshold={:.6g}", r.pass ? "PASS" : "FAIL",
                         r.name, r.statistic, r.threshold));
  }
  ctx.write(ctx.file(c, "reports.jsonl"), lines);
  ctx.write(ctx.file(c, "summary.csv"), csv.str());
  return all_pass ? kExitOk : kExitVerificationFailed;
}

int cmd_example_sec4(const ScenarioConfig& c, const CommandOptions& options) {
  const auto ctx = context(c, options);
  const auto& e = c.sec4;
  const auto g = ScalarField::polynomial_1d({0.0, 0.0, 1.0});
  const bool printed = options.printed_term;
  const std::array<const char*, 6> colors{"#1f77b4", "#d62728", "#2ca02c",
                                          "#9467bd", "#ff7f0e", "#8c564b"};

  std::vector<double> ys(e.curve_points);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    ys[i] = static_cast<double>(i) / static_cast<double>(ys.size() - 1);
  }

  CsvWriter curves;
  CsvWriter hist_csv;
  CsvWriter terms;
  auto meta = base_metadata(c, ctx, "example-sec4");
  meta.emplace_back("final_term", printed ? "printed exp(-2 delta / 3)" : "exp(-2 / (3 delta))");
  for (const auto& [k, v] : meta) {
    curves.comment(k, v);
    hist_csv.comment(k, v);
    terms.comment(k, v);
  }
  hist_csv.comment("samples", std::to_string(e.samples));
  terms.comment("histogram_tv", "against the normalized curve, threshold max(0.05, 3 sqrt(bins/N))");

  std::vector<std::string> curve_header{"y"};
  std::vector<std::string> hist_header{"bin_lower", "bin_upper"};
  std::vector<std::vector<double>> curve_cols;
  std::vector<std::vector<double>> hist_cols;
  PlotSpec plot{"Minimizer density of x^2 + delta W on [0, 1]", "y", "density", {}};
  terms.header({"delta", "corrected_term", "printed_term", "corrected_mass", "printed_mass",
                "histogram_tv", "tv_threshold"});

  for (std::size_t di = 0; di < e.deltas.size(); ++di) {
    const double delta = e.deltas[di];
    const auto label = fmt::format("delta={}", delta);
    curve_header.push_back("rho_" + label);
    hist_header.push_back("hist_" + label);

    std::vector<double> curve(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
      curve[i] = closed_form_rho_delta(delta, ys[i], printed);
    }

    const auto table = build_measure_table(BoxDomain::unit_interval(e.cells),
                                           ScalarField::constant(1.0 / delta), g);
    const RngSeed base{ctx.seed, 0};
    const RngSeed stream_base{base.seed + 0x9E3779B97F4A7C15ull * (di + 1), 0};
    const auto xs = parallel_map(e.samples, ctx.threads, [&](std::size_t r) {
      return sample_W_records(table, 1, stream_base.with_stream(r))[0].argmins.front()[0];
    });
    std::vector<double> counts(e.bins, 0.0);
    for (double x : xs) {
      const auto b = std::min<std::size_t>(
          e.bins - 1, static_cast<std::size_t>(std::floor(x * static_cast<double>(e.bins))));
      counts[b] += 1.0;
    }
    const double bin_w = 1.0 / static_cast<double>(e.bins);
    std::vector<double> hist(e.bins);
    double tv = 0.0;
    for (std::size_t b = 0; b < e.bins; ++b) {
      hist[b] = counts[b] / static_cast<double>(xs.size()) / bin_w;
      auto rho = [delta](double y) { return closed_form_rho_delta(delta, y); };
      const double lo = bin_w * static_cast<double>(b);
      const double mass = adaptive_simpson(rho, lo, std::min(1.0, lo + bin_w), 1e-9).value;
      tv += std::abs(counts[b] / static_cast<double>(xs.size()) - mass);
    }
    tv *= 0.5;
    const double tv_threshold =
        std::max(0.05, 3.0 * std::sqrt(static_cast<double>(e.bins) / static_cast<double>(xs.size())));

    terms.row(std::vector<double>{delta, std::exp(-2.0 / (3.0 * delta)), std::exp(-2.0 * delta / 3.0),
                                  rho_delta_total_mass(delta, false),
                                  rho_delta_total_mass(delta, true), tv, tv_threshold});
    curve_cols.push_back(curve);
    hist_cols.push_back(hist);

    PlotSeries line{label, ys, curve, colors[di % colors.size()], false};
    auto bars = histogram_series("MC " + label, hist, 0.0, 1.0);
    bars.color = colors[di % colors.size()];
    bars.dashed = true;
    plot.series.push_back(std::move(line));
    plot.series.push_back(std::move(bars));
    ctx.note(fmt::format("delta={} histogram TV {:.4f} (threshold {:.4f})", delta, tv,
                         tv_threshold));
  }

  curves.header(curve_header);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    std::vector<double> row{ys[i]};
    for (const auto& col : curve_cols) row.push_back(col[i]);
    curves.row(row);
  }
  hist_csv.header(hist_header);
  for (std::size_t b = 0; b < e.bins; ++b) {
    const double w = 1.0 / static_cast<double>(e.bins);
    std::vector<double> row{w * static_cast<double>(b), w * static_cast<double>(b + 1)};
    for (const auto& col : hist_cols) row.push_back(col[b]);
    hist_csv.row(row);
  }

  ctx.write(ctx.file(c, "sec4_curves.csv"), curves.str());
  ctx.write(ctx.file(c, "sec4_histograms.csv"), hist_csv.str());
  ctx.write(ctx.file(c, "sec4_terms.csv"), terms.str());
  ctx.write(ctx.file(c, "sec4_figure.svg"), svg_line_plot(plot));
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial extreme-value process sampler, densities and verification", "extremal"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  bool printed_term = false;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"sample", "Draw argmin records (and optionally whole realizations) to CSV"},
      {"density", "Evaluate an analytic density grid to CSV and SVG"},
      {"verify", "Run a statistical verification suite"},
      {"example-sec4", "Reproduce the quadratic-offset example: curves, histograms, terms"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Scenario file (TOML)")->required();
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--paper-printed-term", printed_term,
                  "Use exp(-2 delta / 3) as the final term of the closed-form curve");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  CommandOptions options;
  options.seed = seed;
  options.threads = threads;
  options.printed_term = printed_term;
  options.log = &out;
  if (out_dir) options.out_dir = *out_dir;

  try {
    const auto config = load_config(config_path);
    if (command == "sample") return cmd_sample(config, options);
    if (command == "density") return cmd_density(config, options);
    if (command == "verify") return cmd_verify(config, options);
    return cmd_example_sec4(config, options);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const UnsupportedModeError& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InvalidFieldError& e) {
    err << "invalid field: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const RatePositivityError& e) {
    err << "invalid rate: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InvalidNoiseError& e) {
    err << "invalid noise: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerificationFailed;
  }
}

}  // namespace extremal
