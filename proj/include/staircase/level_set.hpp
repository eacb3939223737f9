#pragma once

#include <algorithm>
#include <vector>

#include "staircase/numeric.hpp"

namespace staircase {

/// A union of levels of a single tower.
struct LevelSet {
  int stage = 1;
  std::vector<Int> levels;  // strictly increasing

  bool empty() const noexcept { return levels.empty(); }
  std::size_t size() const noexcept { return levels.size(); }
  bool contains(const Int& n) const { return std::binary_search(levels.begin(), levels.end(), n); }

  friend bool operator==(const LevelSet&, const LevelSet&) = default;
};

/// Closed interval with exact rational endpoints.
struct Interval {
  Rational lo, hi;

  static Interval point(const Rational& x) { return {x, x}; }

  Rational width() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  bool is_point() const { return lo == hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Certified enclosure of a measure; lo >= 0.
using MeasureInterval = Interval;

inline Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Interval operator-(const Interval& a, const Rational& c) { return {a.lo - c, a.hi - c}; }

/// Scales by a nonnegative factor.
inline Interval scale(const Interval& a, const Rational& c) { return {a.lo * c, a.hi * c}; }

/// Enclosure of |x| for x in a.
inline Interval abs_interval(const Interval& a) {
  if (a.lo >= 0) return a;
  if (a.hi <= 0) return {-a.hi, -a.lo};
  return {Rational(0), std::max(Rational(-a.lo), a.hi)};
}

}  // namespace staircase
