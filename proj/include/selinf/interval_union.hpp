#pragma once

#include <limits>
#include <span>
#include <vector>

namespace selinf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval [lo, hi]; either end may be infinite.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double x) const { return lo <= x && x <= hi; }
  double length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted union of pairwise disjoint closed intervals with hi_k < lo_{k+1}.
/// The empty union is a valid value.
class IntervalUnion {
 public:
  IntervalUnion() = default;

  /// Takes intervals that already satisfy the invariants; throws otherwise.
  explicit IntervalUnion(std::vector<Interval> intervals);

  static IntervalUnion real_line() { return IntervalUnion({Interval{}}); }

  /// Sorts, drops reversed entries and coalesces overlaps plus gaps smaller
  /// than `gap_tolerance * max(1, |endpoint|)`.
  static IntervalUnion merge(std::vector<Interval> raw, double gap_tolerance = 1e-10);

  const std::vector<Interval>& intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }
  bool empty() const { return intervals_.empty(); }
  auto begin() const { return intervals_.begin(); }
  auto end() const { return intervals_.end(); }

  bool contains(double x) const;
  /// True when x is within `tol` of the union.
  bool contains(double x, double tol) const;
  double infimum() const;
  double supremum() const;
  /// Distance from x to the nearest finite endpoint.
  double distance_to_boundary(double x) const;

  IntervalUnion intersect(const Interval& window) const;

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  std::vector<Interval> intervals_;
};

}  // namespace selinf
