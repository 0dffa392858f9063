#pragma once

#include <string>
#include <vector>

#include "extremal/rng.hpp"

namespace extremal {

/// Law of the non-negative noise ξ. Every family satisfies F(t) = t + O(t^2)
/// near zero; construction rejects tables that do not.
class NoiseSpec {
 public:
  enum class Family { Exponential, Uniform, Ratio, Table };

  /// Exp(1): F(t) = 1 - e^{-t}.
  static NoiseSpec exponential() { return NoiseSpec(Family::Exponential); }
  /// Uniform(0,1): F(t) = t.
  static NoiseSpec uniform() { return NoiseSpec(Family::Uniform); }
  /// Heavy-tailed F(t) = t / (1 + t).
  static NoiseSpec ratio() { return NoiseSpec(Family::Ratio); }
  /// Piecewise-linear CDF through (t_i, F_i); must start at (0, 0) and end at F = 1.
  static NoiseSpec table(std::vector<double> t, std::vector<double> cdf);

  static NoiseSpec from_name(const std::string& name);

  Family family() const { return family_; }
  std::string name() const;

  double cdf(double t) const;
  double inverse_cdf(double u) const;
  double sample(Rng& rng) const { return inverse_cdf(rng.uniform()); }

  /// max over t in {1e-3, 1e-4, 1e-5} of |F(t)/t - 1| / t.
  double first_order_constant() const;

  /// Bound on first_order_constant() accepted at construction.
  static constexpr double kFirstOrderBound = 10.0;

 private:
  explicit NoiseSpec(Family family) : family_(family) {}

  Family family_;
  std::vector<double> table_t_;
  std::vector<double> table_f_;
};

}  // namespace extremal
