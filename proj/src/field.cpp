#include "extremal/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "extremal/errors.hpp"

namespace extremal {

namespace {

double log_add_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// (1 - e^{-z}) / z, continuous at 0.
double one_minus_exp_ratio(double z) {
  if (z < 1e-12) return 1.0 - 0.5 * z;
  return -std::expm1(-z) / z;
}

double integer_power(double base, unsigned power) {
  double result = 1.0;
  for (unsigned i = 0; i < power; ++i) result *= base;
  return result;
}

}  // namespace

BoxDomain::BoxDomain(int dim, Location lower, Location upper, std::size_t cells_per_axis)
    : dim_(dim), lower_(lower), upper_(upper), cells_per_axis_(cells_per_axis) {
  if (dim != 1 && dim != 2) throw InvalidFieldError("domain dimension must be 1 or 2");
  if (cells_per_axis == 0) throw InvalidFieldError("cells_per_axis must be positive");
  for (int a = 0; a < dim; ++a) {
    const auto i = static_cast<std::size_t>(a);
    if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
      throw InvalidFieldError("domain requires lower < upper on every axis");
    }
    widths_[i] = (upper[i] - lower[i]) / static_cast<double>(cells_per_axis);
  }
  if (dim == 1) {
    lower_[1] = 0.0;
    upper_[1] = 0.0;
  }
}

std::size_t BoxDomain::cell_count() const {
  return dim_ == 1 ? cells_per_axis_ : cells_per_axis_ * cells_per_axis_;
}

double BoxDomain::cell_volume() const {
  return dim_ == 1 ? widths_[0] : widths_[0] * widths_[1];
}

double BoxDomain::volume() const {
  double v = upper_[0] - lower_[0];
  if (dim_ == 2) v *= upper_[1] - lower_[1];
  return v;
}

Location BoxDomain::cell_lower(std::size_t cell) const {
  const std::size_t i0 = cell % cells_per_axis_;
  const std::size_t i1 = cell / cells_per_axis_;
  Location x{lower_[0] + static_cast<double>(i0) * widths_[0], 0.0};
  if (dim_ == 2) x[1] = lower_[1] + static_cast<double>(i1) * widths_[1];
  return x;
}

Location BoxDomain::cell_center(std::size_t cell) const {
  Location x = cell_lower(cell);
  x[0] += 0.5 * widths_[0];
  if (dim_ == 2) x[1] += 0.5 * widths_[1];
  return x;
}

std::size_t BoxDomain::cell_of(const Location& x) const {
  const auto n = static_cast<std::ptrdiff_t>(cells_per_axis_);
  auto axis_index = [&](std::size_t a) {
    auto i = static_cast<std::ptrdiff_t>(std::floor((x[a] - lower_[a]) / widths_[a]));
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n - 1));
  };
  const std::size_t i0 = axis_index(0);
  if (dim_ == 1) return i0;
  return i0 + cells_per_axis_ * axis_index(1);
}

bool BoxDomain::contains(const Location& x) const { return box_contains(bounds(), x, dim_); }

double BoxDomain::overlap_volume(std::size_t cell, const Box& box) const {
  const Location lo = cell_lower(cell);
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) {
    const auto i = static_cast<std::size_t>(a);
    const double left = std::max(lo[i], box.lower[i]);
    const double right = std::min(lo[i] + widths_[i], box.upper[i]);
    if (right <= left) return 0.0;
    v *= right - left;
  }
  return v;
}

bool box_contains(const Box& box, const Location& x, int dim) {
  for (int a = 0; a < dim; ++a) {
    const auto i = static_cast<std::size_t>(a);
    if (x[i] < box.lower[i] || x[i] > box.upper[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

ScalarField ScalarField::constant(double value) {
  ScalarField f;
  f.kind_ = Kind::Constant;
  f.constant_ = value;
  return f;
}

ScalarField ScalarField::polynomial_1d(std::vector<double> coefficients) {
  std::vector<Monomial> terms;
  for (std::size_t p = 0; p < coefficients.size(); ++p) {
    terms.push_back({coefficients[p], static_cast<unsigned>(p), 0});
  }
  return polynomial(std::move(terms));
}

ScalarField ScalarField::polynomial(std::vector<Monomial> terms) {
  ScalarField f;
  f.kind_ = Kind::Polynomial;
  f.terms_ = std::move(terms);
  return f;
}

ScalarField ScalarField::grid(const BoxDomain& domain, std::vector<double> values) {
  if (values.size() != domain.cell_count()) {
    std::ostringstream msg;
    msg << "grid field has " << values.size() << " values but the domain has "
        << domain.cell_count() << " cells";
    throw InvalidFieldError(msg.str());
  }
  ScalarField f;
  f.kind_ = Kind::Grid;
  f.grid_domain_.push_back(domain);
  f.grid_values_ = std::move(values);
  return f;
}

double ScalarField::operator()(const Location& x) const {
  double value = 0.0;
  switch (kind_) {
    case Kind::Constant:
      value = constant_;
      break;
    case Kind::Polynomial:
      for (const auto& t : terms_) {
        value += t.coefficient * integer_power(x[0], t.power_x) * integer_power(x[1], t.power_y);
      }
      break;
    case Kind::Grid:
      value = grid_values_[grid_domain_.front().cell_of(x)];
      break;
  }
  return scale_ * value;
}

std::vector<double> ScalarField::cell_values(const BoxDomain& domain) const {
  if (kind_ == Kind::Grid) {
    if (grid_domain_.front() != domain) {
      throw InvalidFieldError("grid field was defined on a different cell layout");
    }
    std::vector<double> out = grid_values_;
    for (auto& v : out) v *= scale_;
    return out;
  }
  std::vector<double> out(domain.cell_count());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = (*this)(domain.cell_center(c));
  return out;
}

ScalarField ScalarField::scaled(double factor) const {
  ScalarField f = *this;
  f.scale_ *= factor;
  return f;
}

// ---------------------------------------------------------------------------

MeasureTable MeasureTable::from_cells(const BoxDomain& domain, std::vector<double> cell_lambda,
                                      std::vector<double> cell_g) {
  const std::size_t cells = domain.cell_count();
  if (cell_lambda.size() != cells || cell_g.size() != cells) {
    throw InvalidFieldError("per-cell field arrays must match the domain cell count");
  }
  for (std::size_t c = 0; c < cells; ++c) {
    if (std::isnan(cell_lambda[c]) || std::isnan(cell_g[c])) {
      throw InvalidFieldError("field evaluates to NaN on cell " + std::to_string(c));
    }
    if (!std::isfinite(cell_g[c])) {
      throw InvalidFieldError("offset field g is not finite on cell " + std::to_string(c));
    }
    if (!(cell_lambda[c] > 0.0) || !std::isfinite(cell_lambda[c])) {
      throw RatePositivityError("rate field must be strictly positive and finite; cell " +
                                std::to_string(c) + " has " + std::to_string(cell_lambda[c]));
    }
  }

  MeasureTable t;
  t.domain_ = domain;
  const double vol = domain.cell_volume();

  long double total = 0.0L;
  for (double l : cell_lambda) total += static_cast<long double>(l) * vol;
  t.lambda_bar_ = static_cast<double>(total);

  t.cell_weights_.resize(cells);
  t.cumulative_weights_.resize(cells);
  long double running = 0.0L;
  for (std::size_t c = 0; c < cells; ++c) {
    const long double w = static_cast<long double>(cell_lambda[c]) * vol / total;
    t.cell_weights_[c] = static_cast<double>(w);
    running += w;
    t.cumulative_weights_[c] = static_cast<double>(running);
  }
  t.cumulative_weights_.back() = 1.0;

  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cell_g[a] < cell_g[b]; });

  long double cumulative = 0.0L;
  for (std::size_t idx = 0; idx < cells; ++idx) {
    const std::size_t c = order[idx];
    cumulative += static_cast<long double>(cell_lambda[c]) * vol / total;
    const bool last_of_level = idx + 1 == cells || cell_g[order[idx + 1]] != cell_g[c];
    if (last_of_level) {
      t.breakpoints_.push_back(cell_g[c]);
      t.h_values_.push_back(static_cast<double>(std::min(cumulative, 1.0L)));
    }
  }
  t.h_values_.back() = 1.0;

  const std::size_t m = t.breakpoints_.size();
  t.i_values_.assign(m, 0.0);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    t.i_values_[j + 1] =
        t.i_values_[j] + t.h_values_[j] * (t.breakpoints_[j + 1] - t.breakpoints_[j]);
  }

  const double lb = t.lambda_bar_;
  t.log_tail_at_breakpoint_.assign(m, 0.0);
  t.log_tail_at_breakpoint_[m - 1] = -lb * t.i_values_[m - 1] - std::log(lb);
  for (std::size_t j = m - 1; j-- > 0;) {
    t.log_tail_at_breakpoint_[j] =
        log_add_exp(t.log_partial(j, t.breakpoints_[j]), t.log_tail_at_breakpoint_[j + 1]);
  }

  t.cell_lambda_ = std::move(cell_lambda);
  t.cell_g_ = std::move(cell_g);
  return t;
}

std::ptrdiff_t MeasureTable::piece_of(double s) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
  return static_cast<std::ptrdiff_t>(it - breakpoints_.begin()) - 1;
}

double MeasureTable::H(double s) const {
  const auto j = piece_of(s);
  return j < 0 ? 0.0 : h_values_[static_cast<std::size_t>(j)];
}

double MeasureTable::I(double t) const {
  const auto j = piece_of(t);
  if (j < 0) return 0.0;
  const auto i = static_cast<std::size_t>(j);
  return i_values_[i] + h_values_[i] * (t - breakpoints_[i]);
}

double MeasureTable::I_inverse(double y) const {
  if (y <= 0.0) return breakpoints_.front();
  auto it = std::upper_bound(i_values_.begin(), i_values_.end(), y);
  const auto j = static_cast<std::size_t>(it - i_values_.begin()) - 1;
  return breakpoints_[j] + (y - i_values_[j]) / h_values_[j];
}

// log ∫_a^{s_{j+1}} exp(-λ̄ I(u)) du for a in piece j (to ∞ on the last piece).
double MeasureTable::log_partial(std::size_t piece, double a) const {
  const double lb = lambda_bar_;
  const double i_a = i_values_[piece] + h_values_[piece] * (a - breakpoints_[piece]);
  if (piece + 1 == breakpoints_.size()) return -lb * i_a - std::log(lb);
  const double len = breakpoints_[piece + 1] - a;
  return -lb * i_a + std::log(len * one_minus_exp_ratio(lb * h_values_[piece] * len));
}

double MeasureTable::log_tail(double a) const {
  const auto j = piece_of(a);
  if (j < 0) {
    return log_add_exp(std::log(breakpoints_.front() - a), log_tail_at_breakpoint_.front());
  }
  const auto i = static_cast<std::size_t>(j);
  if (i + 1 == breakpoints_.size()) return log_partial(i, a);
  return log_add_exp(log_partial(i, a), log_tail_at_breakpoint_[i + 1]);
}

MeasureTable build_measure_table(const BoxDomain& domain, const ScalarField& lambda,
                                 const ScalarField& g) {
  return MeasureTable::from_cells(domain, lambda.cell_values(domain), g.cell_values(domain));
}

double rate_mass(const MeasureTable& table, const Box& box) {
  const auto& d = table.domain();
  double total = 0.0;
  for (std::size_t c = 0; c < d.cell_count(); ++c) {
    const double v = d.overlap_volume(c, box);
    if (v > 0.0) total += table.cell_lambda()[c] * v;
  }
  return total;
}

std::vector<double> normalized_cell_weights(const BoxDomain& domain,
                                            std::span<const double> density) {
  if (density.size() != domain.cell_count()) {
    throw InvalidFieldError("density array must match the domain cell count");
  }
  long double total = 0.0L;
  for (std::size_t c = 0; c < density.size(); ++c) {
    if (std::isnan(density[c])) throw InvalidFieldError("density evaluates to NaN");
    if (!(density[c] > 0.0) || !std::isfinite(density[c])) {
      throw RatePositivityError("point density must be strictly positive on cell " +
                                std::to_string(c));
    }
    total += density[c];
  }
  std::vector<double> weights(density.size());
  for (std::size_t c = 0; c < density.size(); ++c) {
    weights[c] = static_cast<double>(density[c] / total);
  }
  return weights;
}

}  // namespace extremal
