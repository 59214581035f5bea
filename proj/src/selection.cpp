#include "selinf/selection.hpp"

#include "selinf/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace selinf {

bool SelectionOutcome::contains(int h) const {
  return std::find(significant.begin(), significant.end(), h) != significant.end();
}

std::vector<int> SelectionOutcome::significant_set() const {
  std::vector<int> out = significant;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> testing_order(const Eigen::VectorXd& x, Sidedness sided, Procedure procedure) {
  const int m = static_cast<int>(x.size());
  std::vector<double> score(m);
  for (int h = 0; h < m; ++h) score[h] = sided == Sidedness::two ? std::abs(x[h]) : x[h];
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  if (procedure == Procedure::step_down) {
    std::sort(order.begin(), order.end(), [&](int l, int r) {
      return score[l] > score[r] || (score[l] == score[r] && l < r);
    });
  } else {
    std::sort(order.begin(), order.end(), [&](int l, int r) {
      return score[l] < score[r] || (score[l] == score[r] && l < r);
    });
  }
  return order;
}

namespace {

void check_dimensions(const Eigen::VectorXd& x, const ThresholdSpec& spec) {
  if (x.size() != spec.m()) {
    throw Error(ErrorCode::dimension_mismatch, "selection: statistic count differs from m");
  }
}

void fill_insignificant(SelectionOutcome& out, int m) {
  std::vector<char> flag(m, 0);
  for (int h : out.significant) flag[h] = 1;
  for (int h = 0; h < m; ++h) {
    if (!flag[h]) out.insignificant.push_back(h);
  }
}

}  // namespace

SelectionOutcome step_down_select(const Eigen::VectorXd& x, const ThresholdSpec& spec) {
  check_dimensions(x, spec);
  if (spec.procedure() != Procedure::step_down) {
    throw Error(ErrorCode::validation, "step_down_select: threshold family is step-up");
  }
  const int m = spec.m();
  const std::vector<int> order = testing_order(x, spec.sidedness(), Procedure::step_down);
  const std::vector<double> thresholds = spec.suffix_values(order);
  SelectionOutcome out;
  out.procedure = Procedure::step_down;
  for (int j = 0; j < m; ++j) {
    const int h = order[j];
    const double score = spec.two_sided() ? std::abs(x[h]) : x[h];
    if (score < thresholds[j]) break;
    out.significant.push_back(h);
    out.thresholds.push_back(thresholds[j]);
  }
  fill_insignificant(out, m);
  return out;
}

SelectionOutcome step_up_select(const Eigen::VectorXd& x, const ThresholdSpec& spec) {
  check_dimensions(x, spec);
  if (spec.procedure() != Procedure::step_up) {
    throw Error(ErrorCode::validation, "step_up_select: threshold family is step-down");
  }
  const int m = spec.m();
  const std::vector<int> order = testing_order(x, spec.sidedness(), Procedure::step_up);
  SelectionOutcome out;
  out.procedure = Procedure::step_up;
  for (int j = 1; j <= m; ++j) {
    const int h = order[j - 1];
    const double score = spec.two_sided() ? std::abs(x[h]) : x[h];
    const double threshold = spec.step_up_value(j);
    if (score >= threshold) {
      for (int k = m; k >= j; --k) {
        out.significant.push_back(order[k - 1]);
        out.thresholds.push_back(threshold);
      }
      break;
    }
  }
  fill_insignificant(out, m);
  return out;
}

SelectionOutcome select(const Eigen::VectorXd& x, const ThresholdSpec& spec) {
  return spec.procedure() == Procedure::step_down ? step_down_select(x, spec)
                                                  : step_up_select(x, spec);
}

}  // namespace selinf
