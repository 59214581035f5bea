#pragma once

#include "selinf/interval_union.hpp"
#include "selinf/selection.hpp"
#include "selinf/support.hpp"
#include "selinf/thresholds.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace selinf {

/// Estimated effects with their covariance matrix (effect units).
struct EffectEstimates {
  Eigen::VectorXd theta_hat;
  Eigen::MatrixXd cov;
  std::vector<std::string> labels;

  int m() const { return static_cast<int>(theta_hat.size()); }
  /// Label of effect h, or its 1-based position when unlabelled.
  std::string label(int h) const;
  /// Throws Error(dimension_mismatch | validation) on broken invariants.
  void validate() const;
};

struct Studentized {
  Eigen::VectorXd x;      // t-statistics
  Eigen::MatrixXd omega;  // correlation matrix
  Eigen::VectorXd sd;     // standard errors
};

Studentized studentize(const EffectEstimates& e);

/// theta_hat_s -/+ sd_s * Phi^{-1}(1 - alpha/2).
std::pair<double, double> unconditional_ci(const EffectEstimates& e, int s, double alpha);

/// |t| beyond this value cannot be handled by the conditional distribution in
/// double precision; such effects fall back to the unconditional interval.
inline constexpr double kShortCircuitT = 37.0;

enum class InferenceStatus { ok, unconditional_fallback, degenerate };

std::string_view to_string(InferenceStatus s);

struct ConditionalInference {
  int s = 0;
  InferenceStatus status = InferenceStatus::ok;
  std::string diagnostic;
  double estimate_ub = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double naive_estimate = 0.0;
  double naive_ci_lo = 0.0;
  double naive_ci_hi = 0.0;
  IntervalUnion support;  // t-statistic units
  double alpha = 0.1;     // level used for this effect's intervals
  SelectionEvent event;
};

/// Conditional inference on effect s given the event. The naive interval uses
/// the same level. Numerical failures are reported through `status`.
ConditionalInference infer_effect(const EffectEstimates& e, const Studentized& st, int s,
                                  const ThresholdSpec& spec, const SelectionEvent& event,
                                  double alpha, const SupportOptions& options = {});

struct InferenceResult {
  SelectionOutcome selection;
  std::vector<ConditionalInference> effects;  // ascending effect index
};

/// Selects once, then infers each significant effect under the event equal(S)
/// or superset(S) with S the selected set. With `joint` the per-effect level
/// is alpha / |S|, giving a Bonferroni joint region.
InferenceResult infer_significant(const EffectEstimates& e, const ThresholdSpec& spec,
                                  EventKind event_kind, double alpha, bool joint,
                                  const SupportOptions& options = {});

}  // namespace selinf
