#include "extremal/kargmin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "extremal/errors.hpp"

namespace extremal {

void SampleFunction::validate(const BoxDomain& domain) const {
  if (points.size() != values.size()) {
    throw InvalidFieldError("sample function has mismatched point and value counts");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw InvalidFieldError("sample function value is not finite");
    if (!domain.contains(points[i])) throw InvalidFieldError("sample point outside the domain");
  }
}

KArgminRecord extract_k_argmins(const SampleFunction& f, std::size_t k) {
  if (f.empty()) throw EmptyFunctionError("cannot extract argmins of an empty point set");
  if (f.points.size() != f.values.size()) {
    throw InvalidFieldError("sample function has mismatched point and value counts");
  }

  // k smallest distinct values.
  std::set<double> smallest;
  for (double v : f.values) {
    if (smallest.size() < k) {
      smallest.insert(v);
    } else if (v < *smallest.rbegin() && !smallest.contains(v)) {
      smallest.insert(v);
      smallest.erase(std::prev(smallest.end()));
    }
  }

  KArgminRecord record;
  record.requested_k = k;
  record.truncated = smallest.size() < k;
  std::vector<double> levels(smallest.begin(), smallest.end());
  record.entries.resize(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) record.entries[i].value = levels[i];

  for (std::size_t p = 0; p < f.values.size(); ++p) {
    auto it = std::lower_bound(levels.begin(), levels.end(), f.values[p]);
    if (it != levels.end() && *it == f.values[p]) {
      record.entries[static_cast<std::size_t>(it - levels.begin())].argmins.push_back(f.points[p]);
    }
  }
  for (auto& e : record.entries) std::sort(e.argmins.begin(), e.argmins.end());
  return record;
}

double TopK::threshold() const {
  return items_.size() < k_ ? std::numeric_limits<double>::infinity() : items_.back().value;
}

void TopK::offer(double value, const Location& x) {
  if (items_.size() == k_ && value >= items_.back().value) return;
  auto it = std::upper_bound(items_.begin(), items_.end(), value,
                             [](double v, const Item& item) { return v < item.value; });
  items_.insert(it, Item{value, x});
  if (items_.size() > k_) items_.pop_back();
}

KArgminRecord TopK::record() const {
  KArgminRecord record;
  record.requested_k = k_;
  for (const auto& item : items_) {
    if (!record.entries.empty() && record.entries.back().value == item.value) {
      record.entries.back().argmins.push_back(item.location);
    } else {
      record.entries.push_back({item.value, {item.location}});
    }
  }
  record.truncated = record.entries.size() < k_;
  return record;
}

}  // namespace extremal
