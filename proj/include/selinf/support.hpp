#pragma once

#include "selinf/interval_union.hpp"
#include "selinf/thresholds.hpp"

#include <Eigen/Dense>

#include <vector>

namespace selinf {

/// X = omega_col * x_s + z, with z independent of X_s under joint normality.
struct Decomposition {
  int s = 0;
  double x_s = 0.0;
  Eigen::VectorXd z;
  Eigen::VectorXd omega_col;

  int m() const { return static_cast<int>(z.size()); }
  /// Statistics implied by X_s = value with the nuisance direction held fixed.
  Eigen::VectorXd reconstruct(double value) const { return omega_col * value + z; }
};

/// Throws Error(dimension_mismatch) on shape errors or an out-of-range s.
Decomposition decompose(const Eigen::VectorXd& x, const Eigen::MatrixXd& omega, int s);

enum class EventKind { equal, superset };

std::string_view to_string(EventKind k);

/// Conditioning event: the selected set equals `target`, or contains it.
struct SelectionEvent {
  EventKind kind = EventKind::equal;
  std::vector<int> target;  // ascending

  static SelectionEvent equal(std::vector<int> set);
  static SelectionEvent superset(std::vector<int> set);
  bool contains(int h) const;
};

/// Runs the selection procedure on decomposition.reconstruct(x_s) and checks
/// whether the outcome satisfies the event.
bool membership_oracle(double x_s, const Decomposition& d, const ThresholdSpec& spec,
                       const SelectionEvent& event);

struct SupportOptions {
  /// Restrict the sweep to the window implied by the constraints that do not
  /// depend on the ordering, and track only the lines whose relative order
  /// matters for the event.
  bool initial_bounds = true;
  /// Find the breakpoints with a kinetic (Bentley-Ottmann) sweep instead of
  /// enumerating all pairs.
  bool sweep_line = false;
  /// Require the observed x_s to lie in the result.
  bool check_observed = true;
};

/// Closure of {x : membership_oracle(x)} as a disjoint union of intervals.
///
/// The real line is cut at every point where two lines x_h(x_s) cross (and,
/// for two-sided rules, where a line crosses the mirror image of another or
/// the axis). The ordering of the statistics is constant between cuts, so
/// the event reduces to linear inequalities in x_s on each piece.
///
/// Throws Error(degenerate) if the support is empty and
/// Error(inconsistent_event) if the observed x_s is not in it.
IntervalUnion conditional_support(const Decomposition& d, const ThresholdSpec& spec,
                                  const SelectionEvent& event,
                                  const SupportOptions& options = {});

/// Sorted disjoint union of `raw`; gaps below 1e-10 (relative) are closed.
IntervalUnion merge_intervals(std::vector<Interval> raw);

}  // namespace selinf
