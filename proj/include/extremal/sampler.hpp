#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "extremal/field.hpp"
#include "extremal/kargmin.hpp"
#include "extremal/noise.hpp"
#include "extremal/rng.hpp"

namespace extremal {

/// Draws a cell by inverse CDF on `cumulative` and a uniform point inside it.
Location sample_location(const BoxDomain& domain, std::span<const double> cumulative, Rng& rng);

/// Cell-discretized inputs of the discrete process f_n.
struct FnModel {
  BoxDomain domain;
  std::vector<double> cell_lambda;
  std::vector<double> cell_g;
  std::vector<double> point_weights;  // normalized ρ mass per cell
  std::vector<double> point_cumulative;

  static FnModel build(const BoxDomain& domain, const ScalarField& lambda, const ScalarField& rho,
                       const ScalarField& g);

  /// Table of the limit process W_{λρ} + g, with ρ normalized to a density.
  MeasureTable limit_table() const;
};

/// f_n: n locations i.i.d. from ρ, values (n / λ(x_i)) ξ_i + g(x_i).
SampleFunction sample_fn(const FnModel& model, std::size_t n, const NoiseSpec& noise,
                         RngSeed seed);
SampleFunction sample_fn(const BoxDomain& domain, const ScalarField& lambda,
                         const ScalarField& rho, const ScalarField& g, std::size_t n,
                         const NoiseSpec& noise, RngSeed seed);

/// First k argmins of f_n without materializing it. Consumes the generator
/// exactly like sample_fn, so both agree draw for draw.
KArgminRecord fn_first_k(const FnModel& model, std::size_t n, std::size_t k,
                         const NoiseSpec& noise, RngSeed seed);

/// Construction A: n points i.i.d. from μ_λ with values (n / λ̄) ξ_i + g(x_i),
/// ξ_i ~ Exp(1).
SampleFunction sample_W_construction_a(const MeasureTable& table, std::size_t n, RngSeed seed);

/// Construction A emitted in increasing order of its noise term.
///
/// The sorted Exp(1) sample is generated through its spacings,
/// ξ_(j) = ξ_(j-1) + E_j / (n - j + 1), and paired with i.i.d. locations. The
/// resulting point set has the same law as sample_W_construction_a, but the
/// caller can stop as soon as no remaining point can matter.
class ConstructionAStream {
 public:
  ConstructionAStream(const MeasureTable& table, std::size_t n, RngSeed seed);

  /// Lower bound on every value not yet emitted.
  double floor() const { return scale_ * order_stat_ + table_->min_g(); }
  bool exhausted() const { return emitted_ == n_; }
  /// Advances the noise order statistic. Returns false once n points are out.
  bool advance();
  /// Location and value of the point produced by the last advance().
  void place(Location& x, double& value);

 private:
  const MeasureTable* table_;
  std::size_t n_;
  double scale_;
  Rng rng_;
  std::size_t emitted_ = 0;
  double order_stat_ = 0.0;
};

/// Exact first k (value, argmin) pairs of construction A with n points.
KArgminRecord construction_a_first_k(const MeasureTable& table, std::size_t n, std::size_t k,
                                     RngSeed seed);

/// Exact min over each box of one construction-A realization with n points.
/// Boxes that receive no point report +∞.
std::vector<double> construction_a_region_mins(const MeasureTable& table, std::size_t n,
                                               std::span<const Box> boxes, RngSeed seed);

/// Record construction: x_i i.i.d. μ_λ, values S_i + g(x_i) with S_i the
/// partial sums of Exp(λ̄) variables. Stops once S_i + min g reaches the
/// current k-th smallest value, which makes the result an exact sample of the
/// first k argmins of W_λ + g.
KArgminRecord sample_W_records(const MeasureTable& table, std::size_t k, RngSeed seed,
                               std::size_t max_points = 10'000'000);

}  // namespace extremal
