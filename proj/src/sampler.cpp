#include "extremal/sampler.hpp"

#include <algorithm>
#include <limits>

#include "extremal/errors.hpp"

namespace extremal {

namespace {

struct CellPoint {
  Location x;
  std::size_t cell;
};

CellPoint draw_cell_point(const BoxDomain& domain, std::span<const double> cumulative, Rng& rng) {
  const double u = rng.uniform();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const std::size_t cell =
      std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
  Location x = domain.cell_lower(cell);
  x[0] += rng.uniform() * domain.cell_width(0);
  if (domain.dim() == 2) x[1] += rng.uniform() * domain.cell_width(1);
  return {x, cell};
}

}  // namespace

Location sample_location(const BoxDomain& domain, std::span<const double> cumulative, Rng& rng) {
  return draw_cell_point(domain, cumulative, rng).x;
}

FnModel FnModel::build(const BoxDomain& domain, const ScalarField& lambda,
                       const ScalarField& rho, const ScalarField& g) {
  // Validates λ and g (positivity, finiteness) through the table constructor.
  MeasureTable check = build_measure_table(domain, lambda, g);
  FnModel model{domain,
                {check.cell_lambda().begin(), check.cell_lambda().end()},
                {check.cell_g().begin(), check.cell_g().end()},
                {},
                {}};
  const auto density = rho.cell_values(domain);
  model.point_weights = normalized_cell_weights(domain, density);
  model.point_cumulative.resize(model.point_weights.size());
  double running = 0.0;
  for (std::size_t c = 0; c < model.point_weights.size(); ++c) {
    running += model.point_weights[c];
    model.point_cumulative[c] = running;
  }
  model.point_cumulative.back() = 1.0;
  return model;
}

MeasureTable FnModel::limit_table() const {
  const double vol = domain.cell_volume();
  std::vector<double> effective(cell_lambda.size());
  for (std::size_t c = 0; c < effective.size(); ++c) {
    effective[c] = cell_lambda[c] * point_weights[c] / vol;
  }
  return MeasureTable::from_cells(domain, std::move(effective), cell_g);
}

SampleFunction sample_fn(const FnModel& model, std::size_t n, const NoiseSpec& noise,
                         RngSeed seed) {
  Rng rng(seed);
  SampleFunction f;
  f.reserve(n);
  const double scale = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = draw_cell_point(model.domain, model.point_cumulative, rng);
    const double xi = noise.sample(rng);
    f.push_back(p.x, scale / model.cell_lambda[p.cell] * xi + model.cell_g[p.cell]);
  }
  return f;
}

SampleFunction sample_fn(const BoxDomain& domain, const ScalarField& lambda,
                         const ScalarField& rho, const ScalarField& g, std::size_t n,
                         const NoiseSpec& noise, RngSeed seed) {
  return sample_fn(FnModel::build(domain, lambda, rho, g), n, noise, seed);
}

KArgminRecord fn_first_k(const FnModel& model, std::size_t n, std::size_t k,
                         const NoiseSpec& noise, RngSeed seed) {
  Rng rng(seed);
  TopK top(k);
  const double scale = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = draw_cell_point(model.domain, model.point_cumulative, rng);
    const double xi = noise.sample(rng);
    top.offer(scale / model.cell_lambda[p.cell] * xi + model.cell_g[p.cell], p.x);
  }
  return top.record();
}

SampleFunction sample_W_construction_a(const MeasureTable& table, std::size_t n, RngSeed seed) {
  Rng rng(seed);
  SampleFunction f;
  f.reserve(n);
  const double scale = static_cast<double>(n) / table.lambda_bar();
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = draw_cell_point(table.domain(), table.cumulative_weights(), rng);
    const double xi = rng.exponential();
    f.push_back(p.x, scale * xi + table.cell_g()[p.cell]);
  }
  return f;
}

ConstructionAStream::ConstructionAStream(const MeasureTable& table, std::size_t n, RngSeed seed)
    : table_(&table),
      n_(n),
      scale_(static_cast<double>(n) / table.lambda_bar()),
      rng_(seed) {}

bool ConstructionAStream::advance() {
  if (emitted_ == n_) return false;
  order_stat_ += rng_.exponential() / static_cast<double>(n_ - emitted_);
  ++emitted_;
  return true;
}

void ConstructionAStream::place(Location& x, double& value) {
  const auto p = draw_cell_point(table_->domain(), table_->cumulative_weights(), rng_);
  x = p.x;
  value = scale_ * order_stat_ + table_->cell_g()[p.cell];
}

KArgminRecord construction_a_first_k(const MeasureTable& table, std::size_t n, std::size_t k,
                                     RngSeed seed) {
  ConstructionAStream stream(table, n, seed);
  TopK top(k);
  Location x{};
  double value = 0.0;
  while (stream.advance()) {
    if (stream.floor() >= top.threshold()) break;
    stream.place(x, value);
    top.offer(value, x);
  }
  return top.record();
}

std::vector<double> construction_a_region_mins(const MeasureTable& table, std::size_t n,
                                               std::span<const Box> boxes, RngSeed seed) {
  const int dim = table.domain().dim();
  std::vector<double> best(boxes.size(), std::numeric_limits<double>::infinity());
  ConstructionAStream stream(table, n, seed);
  Location x{};
  double value = 0.0;
  while (stream.advance()) {
    const double floor = stream.floor();
    const bool settled =
        std::all_of(best.begin(), best.end(), [floor](double b) { return floor >= b; });
    if (settled) break;
    stream.place(x, value);
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      if (value < best[b] && box_contains(boxes[b], x, dim)) best[b] = value;
    }
  }
  return best;
}

KArgminRecord sample_W_records(const MeasureTable& table, std::size_t k, RngSeed seed,
                               std::size_t max_points) {
  if (k == 0) throw InputError("k must be positive");
  Rng rng(seed);
  TopK top(k);
  const double rate = table.lambda_bar();
  const double min_g = table.min_g();
  double arrival = 0.0;
  for (std::size_t i = 0;; ++i) {
    arrival += rng.exponential() / rate;
    if (arrival + min_g >= top.threshold()) break;
    if (i == max_points) {
      throw NonterminationError("record sampler exceeded its iteration cap", i, top.threshold());
    }
    const auto p = draw_cell_point(table.domain(), table.cumulative_weights(), rng);
    top.offer(arrival + table.cell_g()[p.cell], p.x);
  }
  return top.record();
}

}  // namespace extremal
