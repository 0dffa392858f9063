#include "extremal/verify.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "extremal/errors.hpp"

namespace extremal {

nlohmann::ordered_json to_json(const TestReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["statistic"] = report.statistic;
  j["threshold"] = report.threshold;
  j["sample_size"] = report.sample_size;
  j["pass"] = report.pass;
  j["metadata"] = report.metadata;
  return j;
}

std::string to_json_line(const TestReport& report) { return to_json(report).dump(); }

TestReport ks_one_sample(std::span<const double> samples,
                         const std::function<double(double)>& cdf, std::string name) {
  if (samples.empty()) throw InputError("KS test needs samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  TestReport r;
  r.name = std::move(name);
  r.statistic = d;
  r.threshold = kKsCritical / std::sqrt(n);
  r.sample_size = sorted.size();
  r.pass = d < r.threshold;
  return r;
}

TestReport ks_exponential(std::span<const double> samples, double rate) {
  if (samples.empty()) throw InputError("KS test needs samples");
  if (samples.size() < 100) throw SampleSizeError("KS exponential test needs at least 100 samples");
  if (!(rate > 0.0)) throw InputError("exponential rate must be positive");
  auto report = ks_one_sample(
      samples, [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); },
      "ks_exponential");
  report.metadata["rate"] = rate;
  return report;
}

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("two-sample KS test needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  TestReport r;
  r.name = "ks_two_sample";
  r.statistic = d;
  r.threshold = kKsCritical * std::sqrt((n + m) / (n * m));
  r.sample_size = x.size() + y.size();
  r.pass = d < r.threshold;
  r.metadata["n_a"] = x.size();
  r.metadata["n_b"] = y.size();
  return r;
}

namespace {

std::vector<std::size_t> rank_bins(std::span<const std::pair<double, double>> pairs, bool second,
                                   std::size_t bins) {
  const std::size_t n = pairs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) { return second ? pairs[i].second : pairs[i].first; };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return key(l) < key(r); });
  std::vector<std::size_t> bin(n);
  for (std::size_t rank = 0; rank < n; ++rank) bin[order[rank]] = rank * bins / n;
  return bin;
}

}  // namespace

TestReport independence_check(std::span<const std::pair<double, double>> pairs, std::size_t bins) {
  if (bins < 2) throw InputError("independence check needs at least two bins");
  if (pairs.size() < 10 * bins * bins) {
    throw SampleSizeError("independence check needs at least 10 * bins^2 pairs");
  }
  const std::size_t n = pairs.size();
  const auto row = rank_bins(pairs, false, bins);
  const auto col = rank_bins(pairs, true, bins);

  std::vector<double> table(bins * bins, 0.0);
  std::vector<double> row_total(bins, 0.0);
  std::vector<double> col_total(bins, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    table[row[i] * bins + col[i]] += 1.0;
    row_total[row[i]] += 1.0;
    col_total[col[i]] += 1.0;
  }
  const double total = static_cast<double>(n);
  double chi2 = 0.0;
  for (std::size_t r = 0; r < bins; ++r) {
    for (std::size_t c = 0; c < bins; ++c) {
      const double expected = row_total[r] * col_total[c] / total;
      const double diff = table[r * bins + c] - expected;
      chi2 += diff * diff / expected;
    }
  }
  const double df = static_cast<double>((bins - 1) * (bins - 1));
  const double critical = boost::math::quantile(boost::math::chi_squared(df), 0.99);

  long double mx = 0.0L;
  long double my = 0.0L;
  for (const auto& [x, y] : pairs) {
    mx += x;
    my += y;
  }
  mx /= total;
  my /= total;
  long double sxy = 0.0L;
  long double sxx = 0.0L;
  long double syy = 0.0L;
  for (const auto& [x, y] : pairs) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
  }
  const double pearson = sxx > 0.0L && syy > 0.0L
                             ? static_cast<double>(sxy / std::sqrt(sxx * syy))
                             : 1.0;
  const double r_threshold = 3.0 / std::sqrt(total);

  TestReport report;
  report.name = "independence_chi_square";
  report.statistic = chi2;
  report.threshold = critical;
  report.sample_size = n;
  report.pass = chi2 < critical && std::abs(pearson) < r_threshold;
  report.metadata["bins"] = bins;
  report.metadata["degrees_of_freedom"] = df;
  report.metadata["pearson_r"] = pearson;
  report.metadata["pearson_threshold"] = r_threshold;
  return report;
}

std::vector<double> binned_mass(const DensityGrid& density, std::size_t bins) {
  const std::size_t dims = density.axes.size();
  // Per axis: for each grid cell, the (bin, fraction of cell) pieces it covers.
  std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>> split(dims);
  for (std::size_t a = 0; a < dims; ++a) {
    const auto& axis = density.axes[a];
    const double bin_width = (axis.upper - axis.lower) / static_cast<double>(bins);
    split[a].resize(axis.cells);
    for (std::size_t c = 0; c < axis.cells; ++c) {
      const double lo = axis.lower + axis.width() * static_cast<double>(c);
      const double hi = lo + axis.width();
      // One bin of slack below guards against rounding in the floor.
      const auto first = static_cast<std::size_t>(
          std::clamp(std::floor((lo - axis.lower) / bin_width) - 1.0, 0.0, double(bins - 1)));
      for (std::size_t b = first; b < bins; ++b) {
        const double blo = axis.lower + bin_width * static_cast<double>(b);
        const double bhi = b + 1 == bins ? axis.upper : blo + bin_width;
        if (blo >= hi) break;
        const double overlap = std::min(hi, bhi) - std::max(lo, blo);
        if (overlap > 0.0) split[a][c].push_back({b, overlap / axis.width()});
      }
    }
  }

  std::size_t total_bins = 1;
  for (std::size_t a = 0; a < dims; ++a) total_bins *= bins;
  std::vector<double> mass(total_bins, 0.0);
  const double vol = density.cell_volume();
  std::vector<std::size_t> idx(dims);
  for (std::size_t flat = 0; flat < density.values.size(); ++flat) {
    const double cell_mass = density.values[flat] * vol;
    if (cell_mass == 0.0) continue;
    std::size_t rest = flat;
    for (std::size_t a = 0; a < dims; ++a) {
      idx[a] = rest % density.axes[a].cells;
      rest /= density.axes[a].cells;
    }
    // Enumerate the product of per-axis pieces.
    std::vector<std::size_t> cursor(dims, 0);
    for (;;) {
      double fraction = 1.0;
      std::size_t bin = 0;
      std::size_t stride = 1;
      for (std::size_t a = 0; a < dims; ++a) {
        const auto& piece = split[a][idx[a]][cursor[a]];
        fraction *= piece.second;
        bin += piece.first * stride;
        stride *= bins;
      }
      mass[bin] += cell_mass * fraction;
      std::size_t a = 0;
      while (a < dims && ++cursor[a] == split[a][idx[a]].size()) cursor[a++] = 0;
      if (a == dims) break;
    }
  }
  return mass;
}

TestReport histogram_vs_density(std::span<const double> points, const DensityGrid& density,
                                std::size_t bins) {
  const std::size_t dims = density.axes.size();
  if (dims == 0 || bins == 0) throw InputError("histogram comparison needs axes and bins");
  if (points.empty() || points.size() % dims != 0) {
    throw InputError("sample coordinates must be a nonempty multiple of the grid dimension");
  }
  const double mass_total = density.total_mass();
  if (!(std::abs(mass_total - 1.0) <= 1e-3)) {
    throw InputError("density grid is not normalized (mass " + std::to_string(mass_total) + ")");
  }

  const auto expected = binned_mass(density, bins);
  std::vector<double> counts(expected.size(), 0.0);
  const std::size_t n = points.size() / dims;
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t bin = 0;
    std::size_t stride = 1;
    for (std::size_t a = 0; a < dims; ++a) {
      const auto& axis = density.axes[a];
      const double u = (points[s * dims + a] - axis.lower) / (axis.upper - axis.lower);
      const auto b = static_cast<std::size_t>(
          std::clamp(std::floor(u * static_cast<double>(bins)), 0.0, double(bins - 1)));
      bin += b * stride;
      stride *= bins;
    }
    counts[bin] += 1.0;
  }

  const double total = static_cast<double>(n);
  double tv = 0.0;
  double max_z = 0.0;
  for (std::size_t b = 0; b < expected.size(); ++b) {
    const double p = expected[b] / mass_total;
    tv += std::abs(counts[b] / total - p);
    const double sd = std::sqrt(total * p * (1.0 - p));
    if (sd > 0.0) max_z = std::max(max_z, std::abs(counts[b] - total * p) / sd);
  }
  tv *= 0.5;

  TestReport report;
  report.name = "histogram_tv";
  report.statistic = tv;
  report.threshold = std::max(0.05, 3.0 * std::sqrt(static_cast<double>(bins) / total));
  report.sample_size = n;
  report.pass = tv <= report.threshold;
  report.metadata["bins_per_axis"] = bins;
  report.metadata["density_kind"] = to_string(density.kind);
  report.metadata["max_abs_z"] = max_z;
  return report;
}

}  // namespace extremal
