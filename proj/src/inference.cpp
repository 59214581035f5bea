#include "selinf/inference.hpp"

#include "selinf/error.hpp"
#include "selinf/normal.hpp"
#include "selinf/truncated_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace selinf {

std::string EffectEstimates::label(int h) const {
  if (h >= 0 && h < static_cast<int>(labels.size())) return labels[h];
  return std::to_string(h + 1);
}

void EffectEstimates::validate() const {
  const Eigen::Index m = theta_hat.size();
  if (m < 1) throw Error(ErrorCode::dimension_mismatch, "estimates: no effects");
  if (cov.rows() != m || cov.cols() != m) {
    throw Error(ErrorCode::dimension_mismatch,
                "estimates: covariance is " + std::to_string(cov.rows()) + "x" +
                    std::to_string(cov.cols()) + " but there are " + std::to_string(m) +
                    " effects");
  }
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != m) {
    throw Error(ErrorCode::dimension_mismatch, "estimates: label count differs from m");
  }
  if (!theta_hat.allFinite() || !cov.allFinite()) {
    throw Error(ErrorCode::validation, "estimates: non-finite entries");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(cov(i, i) > 0.0)) {
      throw Error(ErrorCode::validation,
                  "estimates: variance of effect " + label(static_cast<int>(i)) +
                      " is not positive");
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double scale = std::sqrt(cov(i, i) * cov(j, j));
      if (std::abs(cov(i, j) - cov(j, i)) > 1e-10 * scale) {
        throw Error(ErrorCode::validation, "estimates: covariance is not symmetric");
      }
      if (std::abs(cov(i, j)) / scale > 1.0 + 1e-8) {
        throw Error(ErrorCode::validation, "estimates: implied correlation exceeds 1 in magnitude");
      }
    }
  }
}

Studentized studentize(const EffectEstimates& e) {
  e.validate();
  const Eigen::Index m = e.theta_hat.size();
  Studentized st;
  st.sd = e.cov.diagonal().cwiseSqrt();
  st.x = e.theta_hat.cwiseQuotient(st.sd);
  st.omega.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    st.omega(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double r = 0.5 * (e.cov(i, j) + e.cov(j, i)) / (st.sd[i] * st.sd[j]);
      st.omega(i, j) = st.omega(j, i) = std::clamp(r, -1.0, 1.0);
    }
  }
  return st;
}

std::pair<double, double> unconditional_ci(const EffectEstimates& e, int s, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::domain, "alpha must lie in (0, 1)");
  if (s < 0 || s >= e.m()) throw Error(ErrorCode::dimension_mismatch, "effect index out of range");
  const double half = std::sqrt(e.cov(s, s)) * -normal_quantile(0.5 * alpha);
  return {e.theta_hat[s] - half, e.theta_hat[s] + half};
}

std::string_view to_string(InferenceStatus s) {
  switch (s) {
    case InferenceStatus::ok: return "ok";
    case InferenceStatus::unconditional_fallback: return "unconditional_fallback";
    case InferenceStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

ConditionalInference infer_effect(const EffectEstimates& e, const Studentized& st, int s,
                                  const ThresholdSpec& spec, const SelectionEvent& event,
                                  double alpha, const SupportOptions& options) {
  ConditionalInference out;
  out.s = s;
  out.alpha = alpha;
  out.event = event;
  const auto [naive_lo, naive_hi] = unconditional_ci(e, s, alpha);
  out.naive_estimate = e.theta_hat[s];
  out.naive_ci_lo = naive_lo;
  out.naive_ci_hi = naive_hi;

  const Decomposition d = decompose(st.x, st.omega, s);
  const double sd = st.sd[s];
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    out.support = conditional_support(d, spec, event, options);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::degenerate) throw;
    out.status = InferenceStatus::degenerate;
    out.diagnostic = err.what();
    out.estimate_ub = out.ci_lo = out.ci_hi = nan;
    return out;
  }

  if (std::abs(d.x_s) > kShortCircuitT) {
    out.status = InferenceStatus::unconditional_fallback;
    out.diagnostic = "|t| = " + std::to_string(std::abs(d.x_s)) +
                     " is beyond the range of the truncated distribution; reporting the "
                     "unconditional interval";
    out.estimate_ub = out.naive_estimate;
    out.ci_lo = naive_lo;
    out.ci_hi = naive_hi;
    return out;
  }

  try {
    out.ci_lo = sd * invert_truncated_mu(d.x_s, out.support, 1.0 - 0.5 * alpha);
    out.estimate_ub = sd * invert_truncated_mu(d.x_s, out.support, 0.5);
    out.ci_hi = sd * invert_truncated_mu(d.x_s, out.support, 0.5 * alpha);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::degenerate && err.code() != ErrorCode::bracket_failure) throw;
    out.status = InferenceStatus::degenerate;
    out.diagnostic = err.what();
    out.estimate_ub = out.ci_lo = out.ci_hi = nan;
  }
  return out;
}

InferenceResult infer_significant(const EffectEstimates& e, const ThresholdSpec& spec,
                                  EventKind event_kind, double alpha, bool joint,
                                  const SupportOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::domain, "alpha must lie in (0, 1)");
  const Studentized st = studentize(e);
  if (st.x.size() != spec.m()) {
    throw Error(ErrorCode::dimension_mismatch, "threshold family was built for a different m");
  }
  InferenceResult result;
  result.selection = select(st.x, spec);
  if (result.selection.empty()) return result;

  const std::vector<int> selected = result.selection.significant_set();
  const SelectionEvent event = event_kind == EventKind::equal ? SelectionEvent::equal(selected)
                                                              : SelectionEvent::superset(selected);
  const double level = joint ? alpha / static_cast<double>(selected.size()) : alpha;
  for (int s : selected) {
    result.effects.push_back(infer_effect(e, st, s, spec, event, level, options));
  }
  return result;
}

}  // namespace selinf
