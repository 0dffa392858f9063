#pragma once

#include <cstddef>
#include <vector>

#include "extremal/field.hpp"

namespace extremal {

/// A finite point set with values; +∞ everywhere else.
struct SampleFunction {
  std::vector<Location> points;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  void reserve(std::size_t n) {
    points.reserve(n);
    values.reserve(n);
  }
  void push_back(const Location& x, double value) {
    points.push_back(x);
    values.push_back(value);
  }
  /// Throws InvalidFieldError if lengths differ, a value is not finite, or a
  /// point lies outside the domain.
  void validate(const BoxDomain& domain) const;
};

/// i-th smallest distinct value m_i and the set M_i of points attaining it.
struct KArgminEntry {
  double value = 0.0;
  std::vector<Location> argmins;
};

/// Ordered (m_i, M_i) for i = 1..k.
struct KArgminRecord {
  std::vector<KArgminEntry> entries;
  std::size_t requested_k = 0;
  /// Set when fewer than requested_k distinct values exist.
  bool truncated = false;

  std::size_t size() const { return entries.size(); }
  const KArgminEntry& operator[](std::size_t i) const { return entries[i]; }
};

/// Groups the k smallest distinct values of f with all points attaining them.
/// Ties are exact floating-point equality. Locations inside each M_i are
/// sorted lexicographically so the result does not depend on input order.
KArgminRecord extract_k_argmins(const SampleFunction& f, std::size_t k);

/// Keeps the k smallest (value, location) pairs seen so far, sorted by value.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { items_.reserve(k + 1); }

  /// Current k-th smallest value, +∞ while fewer than k values were offered.
  double threshold() const;
  void offer(double value, const Location& x);
  KArgminRecord record() const;

 private:
  struct Item {
    double value;
    Location location;
  };
  std::size_t k_;
  std::vector<Item> items_;
};

}  // namespace extremal
