#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tempoloop {

// Ordered list of (c_s, gamma_bar) samples of the averaged growth rate,
// collected on the fly across parareal iterations and queried by linear
// interpolation. Keys are strictly increasing; inserting within
// kDuplicateTolerance of an existing key replaces that entry (newest wins),
// which keeps the interpolation denominators away from zero.
class GrowthTable {
 public:
  struct Entry {
    double c_s;
    double gamma_bar;
  };

  static constexpr double kDuplicateTolerance = 1e-12;

  void insert(double c_s, double gamma_bar) {
    auto pos = std::lower_bound(
        entries_.begin(), entries_.end(), c_s,
        [](const Entry& e, double key) { return e.c_s < key; });

    // Nearest existing key within tolerance, if any.
    auto match = entries_.end();
    if (pos != entries_.end() && std::abs(pos->c_s - c_s) <= kDuplicateTolerance)
      match = pos;
    if (pos != entries_.begin()) {
      auto prev = std::prev(pos);
      if (std::abs(prev->c_s - c_s) <= kDuplicateTolerance &&
          (match == entries_.end() ||
           std::abs(prev->c_s - c_s) < std::abs(match->c_s - c_s)))
        match = prev;
    }

    if (match != entries_.end()) {
      // Move the key only while strict ordering with the neighbors survives.
      const bool below_ok =
          match == entries_.begin() || std::prev(match)->c_s < c_s;
      const bool above_ok =
          std::next(match) == entries_.end() || c_s < std::next(match)->c_s;
      if (below_ok && above_ok) match->c_s = c_s;
      match->gamma_bar = gamma_bar;
      return;
    }
    entries_.insert(pos, Entry{c_s, gamma_bar});
  }

  // Linear interpolation between the two stored keys bracketing the query;
  // outside the key range, linear extrapolation from the two nearest entries.
  // A query at a stored key returns its stored value exactly.
  double interpolate(double c_s) const {
    if (entries_.size() < 2)
      throw std::invalid_argument(
          "GrowthTable: interpolation needs at least 2 entries");

    auto pos = std::lower_bound(
        entries_.begin(), entries_.end(), c_s,
        [](const Entry& e, double key) { return e.c_s < key; });
    if (pos != entries_.end() && pos->c_s == c_s) return pos->gamma_bar;

    const Entry* lo;
    const Entry* hi;
    if (pos == entries_.begin()) {
      lo = &entries_[0];
      hi = &entries_[1];
    } else if (pos == entries_.end()) {
      lo = &entries_[entries_.size() - 2];
      hi = &entries_[entries_.size() - 1];
    } else {
      hi = &*pos;
      lo = hi - 1;
    }
    // Affine in c_s, so the same expression extrapolates beyond the range.
    return ((hi->c_s - c_s) * lo->gamma_bar + (c_s - lo->c_s) * hi->gamma_bar) /
           (hi->c_s - lo->c_s);
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  double min_key() const { return entries_.front().c_s; }
  double max_key() const { return entries_.back().c_s; }

 private:
  std::vector<Entry> entries_;
};

}  // namespace tempoloop
