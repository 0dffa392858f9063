#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "extremal/field.hpp"
#include "extremal/rng.hpp"

namespace extremal {

/// Φ(x, g) = ∫_{g(x)}^∞ exp(-λ̄ I(t)) dt, integrated exactly piece by piece.
double eval_Phi(const MeasureTable& table, const Location& x);

/// Ψ(x, t, g) = 1{t > g(x)} exp(-λ̄ I(t)).
double eval_Psi(const MeasureTable& table, const Location& x, double t);

/// The offset (g - r)^+ viewed through the base table of g.
///
/// Its CDF and running integral follow from the base table without a rebuild:
/// H_r(s) = H(s + r) and I_r(t) = I(t + r) - I(r) for s, t ≥ 0, both zero below.
class ShiftedOffset {
 public:
  ShiftedOffset(const MeasureTable& base, double level) : base_(&base), level_(level) {}

  const MeasureTable& base() const { return *base_; }
  double level() const { return level_; }

  double g_at(const Location& x) const;
  double H(double s) const;
  double I(double t) const;
  double Phi(const Location& x) const;
  double Psi(const Location& x, double t) const;

  /// Same offset as an explicit table: breakpoints shifted by -r, clamped at
  /// zero, masses below r merged into the level 0.
  MeasureTable materialize() const;

 private:
  const MeasureTable* base_;
  double level_;
};

enum class DensityKind { Marginal, JointLocationValue, MinValue, JointK };

std::string to_string(DensityKind kind);

struct GridAxis {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t cells = 1;

  double width() const { return (upper - lower) / static_cast<double>(cells); }
  double center(std::size_t i) const { return lower + (static_cast<double>(i) + 0.5) * width(); }
};

/// Cell-averaged density on a tensor grid. Axis 0 varies fastest.
struct DensityGrid {
  DensityKind kind = DensityKind::Marginal;
  std::vector<GridAxis> axes;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double cell_volume() const;
  double total_mass() const;
  std::vector<double> cell_center(std::size_t index) const;
};

/// Density of the first argmin, λ(x) Φ(x, g), one value per domain cell.
DensityGrid marginal_argmin_density(const MeasureTable& table);
/// Same for the offset (g - r)^+: λ(x) Φ(x, (g - r)^+).
DensityGrid marginal_argmin_density(const ShiftedOffset& offset);

/// Law of the minimum value τ: density λ̄ H(t) exp(-λ̄ I(t)), CDF 1 - exp(-λ̄ I(t)).
class MinValueDensity {
 public:
  explicit MinValueDensity(const MeasureTable& table) : table_(&table) {}

  double pdf(double t) const;
  double cdf(double t) const;
  double quantile(double p) const;

 private:
  const MeasureTable* table_;
};

inline MinValueDensity min_value_density(const MeasureTable& table) {
  return MinValueDensity(table);
}

/// Min-value density averaged over `cells` bins on [min g, t*], where t* is
/// the point beyond which exp(-λ̄ I) < exp(-tail_exponent).
DensityGrid min_value_grid(const MeasureTable& table, std::size_t cells,
                           double tail_exponent = 12.0);

/// Joint (location, value) density λ(x) Ψ(x, t, g), averaged over value bins.
DensityGrid joint_location_value_grid(const MeasureTable& table, std::size_t value_cells,
                                      double tail_exponent = 12.0);

struct JointDensityOptions {
  double rel_tol = 1e-6;
  /// The r-integrals stop where exp(-λ̄ ΔI) falls below exp(-tail_exponent).
  double tail_exponent = 40.0;
};

/// Joint density of the first k = xs.size() argmins, k in {1, 2, 3}.
///
/// The r-integrals run through adaptive Simpson quadrature while every Ψ and Φ
/// factor is evaluated exactly. Throws ToleranceError if the quadrature does
/// not converge and UnsupportedModeError for k > 3.
double joint_density_k(const MeasureTable& table, std::span<const Location> xs,
                       const JointDensityOptions& options = {});

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of the same joint density for any k ≥ 2.
///
/// Draws r_1 < ... < r_{k-1} from the successive min-value laws, so the
/// exponential factors cancel and each sample weighs
/// Π λ(x_j) 1{r_j > g(x_j) ∨ r_{j-1}} / (λ̄ H(r_j)) · λ(x_k) Φ(x_k, (g - r_{k-1})^+).
/// The first coordinate is stratified into mc_n equal-probability strata.
McEstimate joint_density_k_mc(const MeasureTable& table, std::span<const Location> xs,
                              std::size_t mc_n, RngSeed seed);

/// Joint argmin density on the k-fold product of a 1-D domain's cells.
DensityGrid joint_density_grid(const MeasureTable& table, std::size_t k, unsigned threads = 1,
                               const JointDensityOptions& options = {});

/// Density of the minimizer of δ W_1 + x^2 on [0, 1].
///
/// ρ_δ(y) = (2/δ) ∫_y^1 x exp(-2x³/(3δ)) dx + exp(-2/(3δ)). With
/// printed_term the last summand is exp(-2δ/3) instead; that variant only
/// normalizes at δ = 1 and is kept for comparison.
double closed_form_rho_delta(double delta, double y, bool printed_term = false);

/// ∫_0^1 ρ_δ in closed form: 1 - exp(-2/(3δ)) plus the chosen final term.
double rho_delta_total_mass(double delta, bool printed_term = false);

}  // namespace extremal
