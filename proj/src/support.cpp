#include "selinf/support.hpp"

#include "selinf/error.hpp"
#include "selinf/selection.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <tuple>

namespace selinf {

std::string_view to_string(EventKind k) { return k == EventKind::equal ? "equal" : "superset"; }

namespace {

std::vector<int> normalized(std::vector<int> set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

}  // namespace

SelectionEvent SelectionEvent::equal(std::vector<int> set) {
  return SelectionEvent{EventKind::equal, normalized(std::move(set))};
}

SelectionEvent SelectionEvent::superset(std::vector<int> set) {
  return SelectionEvent{EventKind::superset, normalized(std::move(set))};
}

bool SelectionEvent::contains(int h) const {
  return std::binary_search(target.begin(), target.end(), h);
}

Decomposition decompose(const Eigen::VectorXd& x, const Eigen::MatrixXd& omega, int s) {
  const Eigen::Index m = x.size();
  if (omega.rows() != m || omega.cols() != m) {
    throw Error(ErrorCode::dimension_mismatch, "decompose: omega must be m x m");
  }
  if (s < 0 || s >= m) throw Error(ErrorCode::dimension_mismatch, "decompose: index out of range");
  Decomposition d;
  d.s = s;
  d.x_s = x[s];
  d.omega_col = omega.col(s);
  d.z = x - d.omega_col * d.x_s;
  d.z[s] = 0.0;
  return d;
}

bool membership_oracle(double x_s, const Decomposition& d, const ThresholdSpec& spec,
                       const SelectionEvent& event) {
  const SelectionOutcome out = select(d.reconstruct(x_s), spec);
  const std::vector<int> selected = out.significant_set();
  if (event.kind == EventKind::equal) return selected == event.target;
  return std::includes(selected.begin(), selected.end(), event.target.begin(),
                       event.target.end());
}

IntervalUnion merge_intervals(std::vector<Interval> raw) {
  return IntervalUnion::merge(std::move(raw));
}

namespace {

// Restricts [lo, hi] to {t : slope * t + intercept >= c} (or <= c).
void restrict(double& lo, double& hi, double slope, double intercept, double c, bool ge) {
  if (slope == 0.0) {
    if (ge ? intercept < c : intercept > c) hi = -kInf, lo = kInf;
    return;
  }
  const double root = (c - intercept) / slope;
  if ((slope > 0.0) == ge) {
    lo = std::max(lo, root);
  } else {
    hi = std::min(hi, root);
  }
}

class SupportSweep {
 public:
  SupportSweep(const Decomposition& d, const ThresholdSpec& spec, const SelectionEvent& event,
               const SupportOptions& options)
      : d_(d), spec_(spec), event_(event), options_(options), m_(d.m()),
        two_sided_(spec.two_sided()), step_down_(spec.procedure() == Procedure::step_down),
        in_target_(m_, 0) {
    for (int h : event.target) {
      if (h < 0 || h >= m_) throw Error(ErrorCode::domain, "selection event: index out of range");
      in_target_[h] = 1;
    }
    for (int h = 0; h < m_; ++h) {
      if (!in_target_[h]) complement_.push_back(h);
    }
  }

  IntervalUnion run() {
    Interval window = options_.initial_bounds ? initial_window() : Interval{};
    if (!(window.lo <= window.hi)) return {};
    choose_tracked();
    const std::vector<double> cuts = breakpoints(window);

    std::vector<Interval> raw;
    order_ = tracked_;
    score_.assign(m_, 0.0);
    sign_.assign(m_, 1.0);
    for (std::size_t k = 0; k <= cuts.size(); ++k) {
      const double lo = k == 0 ? window.lo : cuts[k - 1];
      const double hi = k == cuts.size() ? window.hi : cuts[k];
      evaluate_at(representative(lo, hi));
      pieces(lo, hi, raw);
    }
    std::erase_if(raw, [](const Interval& iv) { return !(iv.lo < iv.hi); });
    return IntervalUnion::merge(std::move(raw));
  }

 private:
  double threshold(std::span<const int> set) const { return spec_.value(set); }

  // Superset of the support built from constraints that are intervals in x_s.
  Interval initial_window() const {
    double lo = -kInf;
    double hi = kInf;
    auto le = [&](int h, double c) {
      restrict(lo, hi, d_.omega_col[h], d_.z[h], c, false);
      if (two_sided_) restrict(lo, hi, d_.omega_col[h], d_.z[h], -c, true);
    };
    auto ge = [&](int h, double c) { restrict(lo, hi, d_.omega_col[h], d_.z[h], c, true); };

    const auto& target = event_.target;
    if (event_.kind == EventKind::equal) {
      if (step_down_) {
        if (!complement_.empty()) {
          const double c = threshold(complement_);
          for (int r : complement_) le(r, c);
        }
        if (!two_sided_) {
          std::vector<int> with(complement_);
          with.push_back(0);
          for (int h : target) {
            with.back() = h;
            ge(h, threshold(with));
          }
        }
      } else {
        const int k = static_cast<int>(complement_.size());
        if (k > 0) {
          for (int r : complement_) le(r, spec_.step_up_value(k));
        }
        if (!two_sided_ && k < m_) {
          for (int h : target) ge(h, spec_.step_up_value(k + 1));
        }
      }
    } else if (!two_sided_) {
      for (int h : target) {
        const int one[] = {h};
        ge(h, step_down_ ? threshold(one) : spec_.step_up_value(1));
      }
    }
    return Interval{lo, hi};
  }

  // Lines whose relative order can change the event on the window.
  void choose_tracked() {
    tracked_.clear();
    if (options_.initial_bounds && event_.kind == EventKind::equal) {
      tracked_ = step_down_ ? event_.target : complement_;
    } else {
      for (int h = 0; h < m_; ++h) tracked_.push_back(h);
    }
  }

  // Point where line i (times si) meets line j (times sj); NaN when parallel.
  // Callers pass i < j so both sweep modes produce bit-identical values.
  double crossing(int i, double si, int j, double sj) const {
    if (i == j) return -d_.z[i] / d_.omega_col[i];
    const double sigma = si * sj;
    const double den = d_.omega_col[i] - sigma * d_.omega_col[j];
    if (den == 0.0) return std::nan("");
    return (sigma * d_.z[j] - d_.z[i]) / den;
  }

  double canonical_crossing(int i, double si, int j, double sj) const {
    if (i > j) std::swap(i, j), std::swap(si, sj);
    return crossing(i, si, j, sj);
  }

  std::vector<double> breakpoints(const Interval& window) const {
    std::vector<double> pts;
    auto keep = [&](double t) {
      if (std::isfinite(t) && t > window.lo && t < window.hi) pts.push_back(t);
    };
    if (two_sided_) {
      for (int h = 0; h < m_; ++h) {
        if (d_.omega_col[h] != 0.0) keep(crossing(h, 1.0, h, -1.0));
      }
    }
    if (options_.sweep_line) {
      kinetic_sweep(window, keep);
    } else {
      for (std::size_t p = 0; p < tracked_.size(); ++p) {
        for (std::size_t q = p + 1; q < tracked_.size(); ++q) {
          keep(crossing(tracked_[p], 1.0, tracked_[q], 1.0));
          if (two_sided_) keep(crossing(tracked_[p], 1.0, tracked_[q], -1.0));
        }
      }
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double t : pts) {
      if (out.empty() || t - out.back() > 1e-12 * std::max(1.0, std::abs(t))) out.push_back(t);
    }
    return out;
  }

  // Bentley-Ottmann style sweep: keep the signed lines sorted by value and
  // swap adjacent pairs at their crossing times, in time order.
  template <class Keep>
  void kinetic_sweep(const Interval& window, Keep& keep) const {
    struct Signed {
      int line;
      double sign;
      double slope;
      double intercept;
    };
    std::vector<Signed> lines;
    for (int h : tracked_) {
      lines.push_back({h, 1.0, d_.omega_col[h], d_.z[h]});
      if (two_sided_) lines.push_back({h, -1.0, -d_.omega_col[h], -d_.z[h]});
    }
    const int n = static_cast<int>(lines.size());
    std::vector<int> seq(n);
    for (int k = 0; k < n; ++k) seq[k] = k;
    if (std::isinf(window.lo)) {
      std::sort(seq.begin(), seq.end(), [&](int l, int r) {
        return std::tie(lines[r].slope, lines[l].intercept, l) <
               std::tie(lines[l].slope, lines[r].intercept, r);
      });
    } else {
      const double t0 = window.lo;
      auto value = [&](int k) { return lines[k].slope * t0 + lines[k].intercept; };
      std::sort(seq.begin(), seq.end(), [&](int l, int r) {
        const double vl = value(l);
        const double vr = value(r);
        if (vl != vr) return vl < vr;
        if (lines[l].slope != lines[r].slope) return lines[l].slope < lines[r].slope;
        return l < r;
      });
    }
    std::vector<int> pos(n);
    for (int k = 0; k < n; ++k) pos[seq[k]] = k;

    using Event = std::tuple<double, int, int>;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> heap;
    double now = window.lo;
    auto schedule = [&](int p) {
      if (p < 0 || p + 1 >= n) return;
      const Signed& lower = lines[seq[p]];
      const Signed& upper = lines[seq[p + 1]];
      if (!(lower.slope > upper.slope)) return;
      double t = canonical_crossing(lower.line, lower.sign, upper.line, upper.sign);
      if (std::isnan(t)) return;
      t = std::max(t, now);
      if (t < window.hi) heap.emplace(t, seq[p], seq[p + 1]);
    };
    for (int p = 0; p + 1 < n; ++p) schedule(p);
    while (!heap.empty()) {
      const auto [t, l, r] = heap.top();
      heap.pop();
      if (pos[r] != pos[l] + 1) continue;
      now = t;
      keep(t);
      const int p = pos[l];
      std::swap(seq[p], seq[p + 1]);
      pos[seq[p]] = p;
      pos[seq[p + 1]] = p + 1;
      schedule(p - 1);
      schedule(p + 1);
    }
  }

  static double representative(double lo, double hi) {
    if (std::isinf(lo) && std::isinf(hi)) return 0.0;
    if (std::isinf(lo)) return hi - 1.0;
    if (std::isinf(hi)) return lo + 1.0;
    return lo + 0.5 * (hi - lo);
  }

  void evaluate_at(double t) {
    for (int h = 0; h < m_; ++h) {
      const double v = d_.omega_col[h] * t + d_.z[h];
      sign_[h] = two_sided_ && v < 0.0 ? -1.0 : 1.0;
      score_[h] = two_sided_ ? std::abs(v) : v;
    }
    // Insertion sort from the previous interval's order: few swaps per cut.
    auto before = [&](int l, int r) {
      if (score_[l] != score_[r]) return step_down_ ? score_[l] > score_[r] : score_[l] < score_[r];
      return l < r;
    };
    for (std::size_t k = 1; k < order_.size(); ++k) {
      const int v = order_[k];
      std::size_t j = k;
      while (j > 0 && before(v, order_[j - 1])) {
        order_[j] = order_[j - 1];
        --j;
      }
      order_[j] = v;
    }
  }

  void bound(double& lo, double& hi, int h, double c, bool ge) const {
    restrict(lo, hi, sign_[h] * d_.omega_col[h], sign_[h] * d_.z[h], c, ge);
  }

  void pieces(double lo0, double hi0, std::vector<Interval>& out) {
    double lo = lo0;
    double hi = hi0;
    if (event_.kind == EventKind::equal) {
      if (step_down_) {
        equal_step_down(lo, hi);
      } else {
        equal_step_up(lo, hi);
      }
      if (lo <= hi) out.push_back({lo, hi});
      return;
    }
    if (step_down_) {
      superset_step_down(lo, hi);
      if (lo <= hi) out.push_back({lo, hi});
    } else {
      superset_step_up(lo0, hi0, out);
    }
  }

  void equal_step_down(double& lo, double& hi) {
    seq_.clear();
    for (int h : order_) {
      if (in_target_[h]) seq_.push_back(h);
    }
    const std::size_t k = seq_.size();
    seq_.insert(seq_.end(), complement_.begin(), complement_.end());
    const std::vector<double> t = spec_.suffix_values(seq_);
    for (std::size_t j = 0; j < k; ++j) bound(lo, hi, seq_[j], t[j], true);
    if (k < seq_.size()) {
      for (std::size_t j = k; j < seq_.size(); ++j) bound(lo, hi, seq_[j], t[k], false);
    }
  }

  void equal_step_up(double& lo, double& hi) {
    int j = 0;
    for (int h : order_) {
      if (!in_target_[h]) bound(lo, hi, h, spec_.step_up_value(++j), false);
    }
    if (j < m_) {
      const double c = spec_.step_up_value(j + 1);
      for (int h : event_.target) bound(lo, hi, h, c, true);
    }
  }

  void superset_step_down(double& lo, double& hi) {
    int last = -1;
    for (int p = 0; p < m_; ++p) {
      if (in_target_[order_[p]]) last = p;
    }
    if (last < 0) return;
    const std::vector<double> t = spec_.suffix_values(order_);
    for (int p = 0; p <= last; ++p) bound(lo, hi, order_[p], t[p], true);
  }

  void superset_step_up(double lo0, double hi0, std::vector<Interval>& out) {
    int first = m_;
    for (int p = 0; p < m_; ++p) {
      if (in_target_[order_[p]]) {
        first = p;
        break;
      }
    }
    if (first == m_) {
      out.push_back({lo0, hi0});
      return;
    }
    for (int p = 0; p <= first; ++p) {
      double lo = lo0;
      double hi = hi0;
      bound(lo, hi, order_[p], spec_.step_up_value(p + 1), true);
      if (lo <= hi) out.push_back({lo, hi});
    }
  }

  const Decomposition& d_;
  const ThresholdSpec& spec_;
  const SelectionEvent& event_;
  SupportOptions options_;
  int m_;
  bool two_sided_;
  bool step_down_;
  std::vector<char> in_target_;
  std::vector<int> complement_;
  std::vector<int> tracked_;
  std::vector<int> order_;
  std::vector<int> seq_;
  std::vector<double> score_;
  std::vector<double> sign_;
};

}  // namespace

IntervalUnion conditional_support(const Decomposition& d, const ThresholdSpec& spec,
                                  const SelectionEvent& event, const SupportOptions& options) {
  if (d.m() != spec.m() || d.omega_col.size() != d.z.size()) {
    throw Error(ErrorCode::dimension_mismatch, "conditional_support: dimension differs from m");
  }
  IntervalUnion support = SupportSweep(d, spec, event, options).run();
  if (support.empty()) {
    throw Error(ErrorCode::degenerate, "conditional support is empty");
  }
  if (options.check_observed &&
      !support.contains(d.x_s, 1e-9 * std::max(1.0, std::abs(d.x_s)))) {
    throw Error(ErrorCode::inconsistent_event,
                "observed statistic is not compatible with the selection event");
  }
  return support;
}

}  // namespace selinf
