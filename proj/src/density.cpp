#include "extremal/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "extremal/errors.hpp"
#include "extremal/parallel.hpp"
#include "extremal/quadrature.hpp"

namespace extremal {

double eval_Phi(const MeasureTable& table, const Location& x) {
  return std::exp(table.log_tail(table.g_at(x)));
}

double eval_Psi(const MeasureTable& table, const Location& x, double t) {
  if (!(t > table.g_at(x))) return 0.0;
  return std::exp(-table.lambda_bar() * table.I(t));
}

// ---------------------------------------------------------------------------

double ShiftedOffset::g_at(const Location& x) const {
  return std::max(base_->g_at(x) - level_, 0.0);
}

double ShiftedOffset::H(double s) const { return s < 0.0 ? 0.0 : base_->H(s + level_); }

double ShiftedOffset::I(double t) const {
  return t < 0.0 ? 0.0 : base_->I(t + level_) - base_->I(level_);
}

double ShiftedOffset::Phi(const Location& x) const {
  const double start = std::max(base_->g_at(x), level_);
  return std::exp(base_->log_tail(start) + base_->lambda_bar() * base_->I(level_));
}

double ShiftedOffset::Psi(const Location& x, double t) const {
  if (!(t > g_at(x))) return 0.0;
  return std::exp(-base_->lambda_bar() * (base_->I(t + level_) - base_->I(level_)));
}

MeasureTable ShiftedOffset::materialize() const {
  std::vector<double> g(base_->cell_g().begin(), base_->cell_g().end());
  for (auto& v : g) v = std::max(v - level_, 0.0);
  return MeasureTable::from_cells(base_->domain(),
                                  {base_->cell_lambda().begin(), base_->cell_lambda().end()},
                                  std::move(g));
}

// ---------------------------------------------------------------------------

std::string to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::Marginal:
      return "marginal-1";
    case DensityKind::JointLocationValue:
      return "joint-1";
    case DensityKind::MinValue:
      return "marginal-min-value";
    case DensityKind::JointK:
      return "joint-k";
  }
  return "unknown";
}

double DensityGrid::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes) v *= a.width();
  return v;
}

double DensityGrid::total_mass() const {
  long double sum = 0.0L;
  for (double v : values) sum += v;
  return static_cast<double>(sum) * cell_volume();
}

std::vector<double> DensityGrid::cell_center(std::size_t index) const {
  std::vector<double> c(axes.size());
  for (std::size_t a = 0; a < axes.size(); ++a) {
    c[a] = axes[a].center(index % axes[a].cells);
    index /= axes[a].cells;
  }
  return c;
}

namespace {

std::vector<GridAxis> domain_axes(const BoxDomain& d) {
  std::vector<GridAxis> axes;
  for (int a = 0; a < d.dim(); ++a) {
    const auto i = static_cast<std::size_t>(a);
    axes.push_back({d.lower()[i], d.upper()[i], d.cells_per_axis()});
  }
  return axes;
}

void check_normalized(const DensityGrid& grid, double tolerance) {
  const double mass = grid.total_mass();
  if (!(std::abs(mass - 1.0) <= tolerance)) {
    std::ostringstream msg;
    msg << to_string(grid.kind) << " density integrates to " << mass;
    throw ConsistencyError(msg.str());
  }
}

}  // namespace

DensityGrid marginal_argmin_density(const MeasureTable& table) {
  DensityGrid grid{DensityKind::Marginal, domain_axes(table.domain()), {}};
  grid.values.resize(table.domain().cell_count());
  for (std::size_t c = 0; c < grid.values.size(); ++c) {
    grid.values[c] = table.cell_lambda()[c] * std::exp(table.log_tail(table.cell_g()[c]));
  }
  check_normalized(grid, 1e-3);
  return grid;
}

DensityGrid marginal_argmin_density(const ShiftedOffset& offset) {
  const MeasureTable& base = offset.base();
  DensityGrid grid{DensityKind::Marginal, domain_axes(base.domain()), {}};
  grid.values.resize(base.domain().cell_count());
  const double shift = base.lambda_bar() * base.I(offset.level());
  for (std::size_t c = 0; c < grid.values.size(); ++c) {
    const double start = std::max(base.cell_g()[c], offset.level());
    grid.values[c] = base.cell_lambda()[c] * std::exp(base.log_tail(start) + shift);
  }
  check_normalized(grid, 1e-3);
  return grid;
}

double MinValueDensity::pdf(double t) const {
  const double lb = table_->lambda_bar();
  return lb * table_->H(t) * std::exp(-lb * table_->I(t));
}

double MinValueDensity::cdf(double t) const {
  return -std::expm1(-table_->lambda_bar() * table_->I(t));
}

double MinValueDensity::quantile(double p) const {
  if (p <= 0.0) return table_->min_g();
  return table_->I_inverse(-std::log1p(-p) / table_->lambda_bar());
}

DensityGrid min_value_grid(const MeasureTable& table, std::size_t cells, double tail_exponent) {
  const GridAxis axis{table.min_g(), table.tail_cutoff(tail_exponent), cells};
  DensityGrid grid{DensityKind::MinValue, {axis}, std::vector<double>(cells)};
  const MinValueDensity law(table);
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = axis.lower + axis.width() * static_cast<double>(i);
    const double b = i + 1 == cells ? axis.upper : a + axis.width();
    grid.values[i] = (law.cdf(b) - law.cdf(a)) / axis.width();
  }
  return grid;
}

DensityGrid joint_location_value_grid(const MeasureTable& table, std::size_t value_cells,
                                      double tail_exponent) {
  const GridAxis value_axis{table.min_g(), table.tail_cutoff(tail_exponent), value_cells};
  DensityGrid grid{DensityKind::JointLocationValue, domain_axes(table.domain()), {}};
  grid.axes.push_back(value_axis);
  const std::size_t cells = table.domain().cell_count();
  grid.values.assign(cells * value_cells, 0.0);
  for (std::size_t t = 0; t < value_cells; ++t) {
    const double a = value_axis.lower + value_axis.width() * static_cast<double>(t);
    const double b = a + value_axis.width();
    for (std::size_t c = 0; c < cells; ++c) {
      const double g = table.cell_g()[c];
      if (b <= g) continue;
      const double mass = std::exp(table.log_tail(std::max(a, g))) - std::exp(table.log_tail(b));
      grid.values[c + cells * t] = table.cell_lambda()[c] * mass / value_axis.width();
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------

namespace {

// Conditional density of argmins j..k-1 given that argmin j-1 took value
// `previous`, where the remaining process is W + (g - previous)^+.
class JointIntegrand {
 public:
  static constexpr double kInnerTighten = 1e-2;
  static constexpr std::ptrdiff_t kMaxCuts = 64;

  JointIntegrand(const MeasureTable& table, std::span<const Location> xs,
                 const JointDensityOptions& options)
      : table_(table), xs_(xs), options_(options) {
    for (const auto& x : xs) {
      lambda_.push_back(table.lambda_at(x));
      g_.push_back(table.g_at(x));
    }
  }

  double from(std::size_t j, double previous, double rel_tol) const {
    const ShiftedOffset offset(table_, previous);
    if (j + 1 == xs_.size()) return lambda_[j] * offset.Phi(xs_[j]);

    const double lb = table_.lambda_bar();
    const double base_i = table_.I(previous);
    const double lo = std::max(g_[j], previous);
    const double hi = table_.I_inverse(table_.I(lo) + options_.tail_exponent / lb);
    const double inner_tol = rel_tol * kInnerTighten;
    auto integrand = [&](double r) {
      if (r < lo) return 0.0;
      return lambda_[j] * std::exp(-lb * (table_.I(r) - base_i)) * from(j + 1, r, inner_tol);
    };

    // The integrand has kinks where H jumps; cutting there keeps each piece smooth.
    std::vector<double> cuts{lo};
    const auto bp = table_.breakpoints();
    auto first = std::upper_bound(bp.begin(), bp.end(), lo);
    auto last = std::lower_bound(bp.begin(), bp.end(), hi);
    if (last - first <= kMaxCuts) cuts.insert(cuts.end(), first, last);
    cuts.push_back(hi);

    double total = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const auto q = adaptive_simpson(integrand, cuts[p], cuts[p + 1], rel_tol, 4);
      if (!q.converged) {
        throw ToleranceError("joint argmin density quadrature did not converge", q.value);
      }
      total += q.value;
    }
    return total;
  }

 private:
  const MeasureTable& table_;
  std::span<const Location> xs_;
  JointDensityOptions options_;
  std::vector<double> lambda_;
  std::vector<double> g_;
};

}  // namespace

double joint_density_k(const MeasureTable& table, std::span<const Location> xs,
                       const JointDensityOptions& options) {
  if (xs.empty()) throw InputError("joint density needs at least one location");
  if (xs.size() > 3) {
    throw UnsupportedModeError(
        "quadrature is limited to k <= 3; use joint_density_k_mc for larger k");
  }
  for (const auto& x : xs) {
    if (!table.domain().contains(x)) throw DomainError("location outside the domain");
  }
  return JointIntegrand(table, xs, options).from(0, table.min_g(), options.rel_tol);
}

McEstimate joint_density_k_mc(const MeasureTable& table, std::span<const Location> xs,
                              std::size_t mc_n, RngSeed seed) {
  if (xs.empty()) throw InputError("joint density needs at least one location");
  if (mc_n < 2) throw SampleSizeError("Monte Carlo estimate needs at least two samples");
  for (const auto& x : xs) {
    if (!table.domain().contains(x)) throw DomainError("location outside the domain");
  }
  const std::size_t k = xs.size();
  const double lb = table.lambda_bar();
  Rng rng(seed);

  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  for (std::size_t i = 0; i < mc_n; ++i) {
    double weight = 1.0;
    double previous = table.min_g();
    for (std::size_t j = 0; j + 1 < k && weight > 0.0; ++j) {
      const double e =
          j == 0 ? -std::log1p(-(static_cast<double>(i) + rng.uniform()) / static_cast<double>(mc_n))
                 : rng.exponential();
      const double r = table.I_inverse(table.I(previous) + e / lb);
      if (!(r > std::max(table.g_at(xs[j]), previous))) {
        weight = 0.0;
        break;
      }
      weight *= table.lambda_at(xs[j]) / (lb * table.H(r));
      previous = r;
    }
    if (weight > 0.0) {
      weight *= table.lambda_at(xs[k - 1]) * ShiftedOffset(table, previous).Phi(xs[k - 1]);
    }
    sum += weight;
    sum_sq += static_cast<long double>(weight) * weight;
  }
  const long double n = static_cast<long double>(mc_n);
  const long double mean = sum / n;
  const long double var = std::max(0.0L, (sum_sq - n * mean * mean) / (n - 1));
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n))};
}

DensityGrid joint_density_grid(const MeasureTable& table, std::size_t k, unsigned threads,
                               const JointDensityOptions& options) {
  const auto& d = table.domain();
  if (d.dim() != 1) throw UnsupportedModeError("joint density grids need a 1-D domain");
  if (k < 2 || k > 3) {
    throw UnsupportedModeError(
        "joint density grids support k = 2 or 3; evaluate larger k pointwise with Monte Carlo");
  }
  const std::size_t m = d.cells_per_axis();
  DensityGrid grid{DensityKind::JointK, std::vector<GridAxis>(k, domain_axes(d).front()), {}};
  std::size_t total = 1;
  for (std::size_t j = 0; j < k; ++j) total *= m;

  grid.values = parallel_map(total, threads, [&](std::size_t index) {
    std::vector<Location> xs(k);
    std::size_t rest = index;
    for (std::size_t j = 0; j < k; ++j) {
      xs[j] = d.cell_center(rest % m);
      rest /= m;
    }
    return joint_density_k(table, xs, options);
  });
  return grid;
}

// ---------------------------------------------------------------------------

double closed_form_rho_delta(double delta, double y, bool printed_term) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("delta must be positive");
  if (!(y >= 0.0 && y <= 1.0)) throw DomainError("y must lie in [0, 1]");
  auto integrand = [delta](double x) { return x * std::exp(-2.0 * x * x * x / (3.0 * delta)); };
  const auto q = adaptive_simpson(integrand, y, 1.0, 1e-10);
  if (!q.converged) throw ToleranceError("rho_delta quadrature did not converge", q.value);
  const double last = printed_term ? std::exp(-2.0 * delta / 3.0) : std::exp(-2.0 / (3.0 * delta));
  return 2.0 / delta * q.value + last;
}

double rho_delta_total_mass(double delta, bool printed_term) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  const double last = printed_term ? std::exp(-2.0 * delta / 3.0) : std::exp(-2.0 / (3.0 * delta));
  return -std::expm1(-2.0 / (3.0 * delta)) + last;
}

}  // namespace extremal
