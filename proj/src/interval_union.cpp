#include "selinf/interval_union.hpp"

#include "selinf/error.hpp"

#include <algorithm>
#include <cmath>

namespace selinf {

IntervalUnion::IntervalUnion(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (std::size_t k = 0; k < intervals_.size(); ++k) {
    const Interval& iv = intervals_[k];
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi) {
      throw Error(ErrorCode::validation, "IntervalUnion: interval with lo > hi or NaN endpoint");
    }
    if (k > 0 && !(intervals_[k - 1].hi < iv.lo)) {
      throw Error(ErrorCode::validation, "IntervalUnion: intervals must be disjoint and increasing");
    }
  }
}

IntervalUnion IntervalUnion::merge(std::vector<Interval> raw, double gap_tolerance) {
  std::erase_if(raw, [](const Interval& iv) {
    return std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi;
  });
  std::sort(raw.begin(), raw.end(), [](const Interval& l, const Interval& r) {
    return l.lo < r.lo || (l.lo == r.lo && l.hi < r.hi);
  });
  std::vector<Interval> out;
  for (const Interval& iv : raw) {
    if (!out.empty()) {
      Interval& last = out.back();
      const double slack =
          std::isfinite(last.hi) ? gap_tolerance * std::max(1.0, std::abs(last.hi)) : 0.0;
      if (iv.lo <= last.hi + slack) {
        last.hi = std::max(last.hi, iv.hi);
        continue;
      }
    }
    out.push_back(iv);
  }
  IntervalUnion u;
  u.intervals_ = std::move(out);
  return u;
}

bool IntervalUnion::contains(double x) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [x](const Interval& iv) { return iv.contains(x); });
}

bool IntervalUnion::contains(double x, double tol) const {
  return std::any_of(intervals_.begin(), intervals_.end(), [x, tol](const Interval& iv) {
    return iv.lo - tol <= x && x <= iv.hi + tol;
  });
}

double IntervalUnion::infimum() const { return empty() ? kInf : intervals_.front().lo; }

double IntervalUnion::supremum() const { return empty() ? -kInf : intervals_.back().hi; }

double IntervalUnion::distance_to_boundary(double x) const {
  double best = kInf;
  for (const Interval& iv : intervals_) {
    if (std::isfinite(iv.lo)) best = std::min(best, std::abs(x - iv.lo));
    if (std::isfinite(iv.hi)) best = std::min(best, std::abs(x - iv.hi));
  }
  return best;
}

IntervalUnion IntervalUnion::intersect(const Interval& window) const {
  std::vector<Interval> out;
  for (const Interval& iv : intervals_) {
    const Interval clipped{std::max(iv.lo, window.lo), std::min(iv.hi, window.hi)};
    if (clipped.lo <= clipped.hi) out.push_back(clipped);
  }
  return IntervalUnion(std::move(out));
}

}  // namespace selinf
