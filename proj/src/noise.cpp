#include "extremal/noise.hpp"

#include <algorithm>
#include <cmath>

#include "extremal/errors.hpp"

namespace extremal {

NoiseSpec NoiseSpec::table(std::vector<double> t, std::vector<double> cdf) {
  if (t.size() != cdf.size() || t.size() < 2) {
    throw InvalidNoiseError("noise table needs at least two (t, F) pairs of equal length");
  }
  if (t.front() != 0.0 || cdf.front() != 0.0) {
    throw InvalidNoiseError("noise table must start at (0, 0)");
  }
  if (cdf.back() != 1.0) throw InvalidNoiseError("noise table must end at F = 1");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1]) || cdf[i] < cdf[i - 1] || !std::isfinite(t[i])) {
      throw InvalidNoiseError("noise table must have increasing t and nondecreasing F");
    }
  }
  NoiseSpec spec(Family::Table);
  spec.table_t_ = std::move(t);
  spec.table_f_ = std::move(cdf);
  if (!(spec.first_order_constant() <= kFirstOrderBound)) {
    throw InvalidNoiseError("noise table violates F(t) = t + O(t^2) near zero");
  }
  return spec;
}

NoiseSpec NoiseSpec::from_name(const std::string& name) {
  if (name == "exponential") return exponential();
  if (name == "uniform") return uniform();
  if (name == "ratio") return ratio();
  throw InvalidNoiseError("unknown noise family '" + name + "'");
}

std::string NoiseSpec::name() const {
  switch (family_) {
    case Family::Exponential:
      return "exponential";
    case Family::Uniform:
      return "uniform";
    case Family::Ratio:
      return "ratio";
    case Family::Table:
      return "table";
  }
  return "unknown";
}

double NoiseSpec::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  switch (family_) {
    case Family::Exponential:
      return -std::expm1(-t);
    case Family::Uniform:
      return std::min(t, 1.0);
    case Family::Ratio:
      return t / (1.0 + t);
    case Family::Table: {
      if (t >= table_t_.back()) return 1.0;
      auto it = std::upper_bound(table_t_.begin(), table_t_.end(), t);
      const auto j = static_cast<std::size_t>(it - table_t_.begin()) - 1;
      const double frac = (t - table_t_[j]) / (table_t_[j + 1] - table_t_[j]);
      return table_f_[j] + frac * (table_f_[j + 1] - table_f_[j]);
    }
  }
  return 0.0;
}

double NoiseSpec::inverse_cdf(double u) const {
  switch (family_) {
    case Family::Exponential:
      return -std::log1p(-u);
    case Family::Uniform:
      return u;
    case Family::Ratio:
      return u / (1.0 - u);
    case Family::Table: {
      auto it = std::upper_bound(table_f_.begin(), table_f_.end(), u);
      if (it == table_f_.end()) return table_t_.back();
      const auto j = static_cast<std::size_t>(it - table_f_.begin()) - 1;
      const double frac = (u - table_f_[j]) / (table_f_[j + 1] - table_f_[j]);
      return table_t_[j] + frac * (table_t_[j + 1] - table_t_[j]);
    }
  }
  return 0.0;
}

double NoiseSpec::first_order_constant() const {
  double worst = 0.0;
  for (double t : {1e-3, 1e-4, 1e-5}) {
    worst = std::max(worst, std::abs(cdf(t) / t - 1.0) / t);
  }
  return worst;
}

}  // namespace extremal
