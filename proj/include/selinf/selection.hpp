#pragma once

#include "selinf/thresholds.hpp"

#include <Eigen/Dense>

#include <vector>

namespace selinf {

struct SelectionOutcome {
  /// Significant effects in detection order (largest statistic first).
  std::vector<int> significant;
  /// Critical value each significant effect was compared against.
  std::vector<double> thresholds;
  /// Complement of `significant`, ascending.
  std::vector<int> insignificant;
  Procedure procedure = Procedure::step_down;

  bool empty() const { return significant.empty(); }
  bool contains(int h) const;
  /// Significant set in ascending index order.
  std::vector<int> significant_set() const;
};

/// Generalised step-down testing: walk the statistics from the largest
/// |x| (x for one-sided tests) downwards and stop at the first one below
/// xbar of the untested remainder. Every position, including the last, is
/// tested. Ties are broken by ascending index.
SelectionOutcome step_down_select(const Eigen::VectorXd& x, const ThresholdSpec& spec);

/// Step-up testing: accept from the smallest statistic upward while
/// x_(<,j) < xbar_j; the first statistic meeting its threshold and all larger
/// ones are significant. The m-th statistic is tested as well.
SelectionOutcome step_up_select(const Eigen::VectorXd& x, const ThresholdSpec& spec);

/// Dispatches on spec.procedure().
SelectionOutcome select(const Eigen::VectorXd& x, const ThresholdSpec& spec);

/// Ordering of the statistics used by the procedures: descending by score
/// for step-down, ascending for step-up, ties by index.
std::vector<int> testing_order(const Eigen::VectorXd& x, Sidedness sided, Procedure procedure);

}  // namespace selinf
