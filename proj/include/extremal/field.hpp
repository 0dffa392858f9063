#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace extremal {

/// A point of the domain. Only the first `dim` coordinates are meaningful.
using Location = std::array<double, 2>;

/// Closed axis-aligned box in one or two dimensions.
struct Box {
  Location lower{0.0, 0.0};
  Location upper{0.0, 0.0};
};

/// Bounded box domain split into cells_per_axis^dim equal closed cells.
///
/// Cells are numbered row-major with axis 0 fastest: c = i0 + n * i1.
class BoxDomain {
 public:
  BoxDomain(int dim, Location lower, Location upper, std::size_t cells_per_axis);

  static BoxDomain unit_interval(std::size_t cells) {
    return BoxDomain(1, {0.0, 0.0}, {1.0, 0.0}, cells);
  }

  int dim() const { return dim_; }
  const Location& lower() const { return lower_; }
  const Location& upper() const { return upper_; }
  std::size_t cells_per_axis() const { return cells_per_axis_; }
  std::size_t cell_count() const;
  double cell_width(int axis) const { return widths_[static_cast<std::size_t>(axis)]; }
  double cell_volume() const;
  double volume() const;

  Location cell_center(std::size_t cell) const;
  Location cell_lower(std::size_t cell) const;
  /// Cell containing x. Points on shared faces go to the upper cell, points on
  /// the outer boundary to the boundary cell.
  std::size_t cell_of(const Location& x) const;
  bool contains(const Location& x) const;
  Box bounds() const { return {lower_, upper_}; }

  /// Volume of cell ∩ box.
  double overlap_volume(std::size_t cell, const Box& box) const;

  bool operator==(const BoxDomain&) const = default;

 private:
  int dim_;
  Location lower_;
  Location upper_;
  std::size_t cells_per_axis_;
  Location widths_{1.0, 1.0};
};

bool box_contains(const Box& box, const Location& x, int dim);

/// One term c * x^px * y^py of a polynomial field.
struct Monomial {
  double coefficient = 0.0;
  unsigned power_x = 0;
  unsigned power_y = 0;
};

/// Scalar field on a box domain: constant, polynomial, or per-cell samples.
class ScalarField {
 public:
  enum class Kind { Constant, Polynomial, Grid };

  static ScalarField constant(double value);
  /// c0 + c1 x + c2 x^2 + ...
  static ScalarField polynomial_1d(std::vector<double> coefficients);
  static ScalarField polynomial(std::vector<Monomial> terms);
  /// Piecewise-constant field with exactly one value per cell of `domain`.
  static ScalarField grid(const BoxDomain& domain, std::vector<double> values);

  Kind kind() const { return kind_; }
  double operator()(const Location& x) const;

  /// Values at cell midpoints (grid fields return their stored values).
  std::vector<double> cell_values(const BoxDomain& domain) const;

  /// Returns a copy multiplied by a positive constant.
  ScalarField scaled(double factor) const;

 private:
  ScalarField() = default;

  Kind kind_ = Kind::Constant;
  double constant_ = 0.0;
  std::vector<Monomial> terms_;
  std::vector<BoxDomain> grid_domain_;  // zero or one element
  std::vector<double> grid_values_;
  double scale_ = 1.0;
};

/// Cell-discretized rate measure and the CDF H of g under it.
///
/// H is a right-continuous step function with jumps at the distinct cell
/// values s_1 < ... < s_m of g. I(t) = ∫_{-∞}^t H is piecewise linear with
/// value I_j and slope H_j on [s_j, s_{j+1}). Immutable after construction.
class MeasureTable {
 public:
  /// Builds from per-cell rate and offset values. Throws on non-positive rates
  /// or non-finite values.
  static MeasureTable from_cells(const BoxDomain& domain, std::vector<double> cell_lambda,
                                 std::vector<double> cell_g);

  const BoxDomain& domain() const { return domain_; }
  double lambda_bar() const { return lambda_bar_; }
  std::span<const double> cell_lambda() const { return cell_lambda_; }
  std::span<const double> cell_g() const { return cell_g_; }
  std::span<const double> cell_weights() const { return cell_weights_; }
  std::span<const double> cumulative_weights() const { return cumulative_weights_; }

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> h_values() const { return h_values_; }
  std::span<const double> i_values() const { return i_values_; }

  double min_g() const { return breakpoints_.front(); }
  double max_g() const { return breakpoints_.back(); }

  double lambda_at(const Location& x) const { return cell_lambda_[domain_.cell_of(x)]; }
  double g_at(const Location& x) const { return cell_g_[domain_.cell_of(x)]; }

  double H(double s) const;
  double I(double t) const;
  /// Smallest t with I(t) = y, for y > 0.
  double I_inverse(double y) const;
  /// log ∫_a^∞ exp(-λ̄ I(u)) du for a ≥ min g.
  double log_tail(double a) const;
  /// Point beyond which exp(-λ̄ I) < exp(-exponent).
  double tail_cutoff(double exponent) const { return I_inverse(exponent / lambda_bar_); }

  /// Index of the last breakpoint ≤ s, or -1.
  std::ptrdiff_t piece_of(double s) const;

 private:
  MeasureTable() : domain_(BoxDomain::unit_interval(1)) {}

  double log_partial(std::size_t piece, double a) const;

  BoxDomain domain_;
  double lambda_bar_ = 0.0;
  std::vector<double> cell_lambda_;
  std::vector<double> cell_g_;
  std::vector<double> cell_weights_;
  std::vector<double> cumulative_weights_;
  std::vector<double> breakpoints_;
  std::vector<double> h_values_;
  std::vector<double> i_values_;
  std::vector<double> log_tail_at_breakpoint_;
};

MeasureTable build_measure_table(const BoxDomain& domain, const ScalarField& lambda,
                                 const ScalarField& g);

inline double eval_H(const MeasureTable& table, double s) { return table.H(s); }
inline double eval_I(const MeasureTable& table, double t) { return table.I(t); }

/// λ_C = ∫_{C ∩ D} λ under the piecewise-constant rate.
double rate_mass(const MeasureTable& table, const Box& box);

/// Per-cell weights ρ_c vol_c normalized to sum to one.
std::vector<double> normalized_cell_weights(const BoxDomain& domain, std::span<const double> density);

}  // namespace extremal
