#include "selinf/truncated_gaussian.hpp"

#include "selinf/error.hpp"
#include "selinf/normal.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace selinf {
namespace {

// log(exp(big) - exp(small)) for big >= small.
double log_diff_exp(double big, double small) {
  if (small == -kInf) return big;
  if (small >= big) return -kInf;
  return big + std::log(-std::expm1(small - big));
}

double log_sum_exp(const std::vector<double>& terms) {
  double peak = -kInf;
  for (double t : terms) peak = std::max(peak, t);
  if (peak == -kInf) return -kInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - peak);
  return peak + std::log(acc);
}

struct LogMasses {
  double below;  // log mass of support ∩ (-inf, x]
  double total;
};

LogMasses log_masses(double x, double mu, const IntervalUnion& support) {
  std::vector<double> below;
  std::vector<double> total;
  below.reserve(support.size());
  total.reserve(support.size());
  for (const Interval& iv : support) {
    total.push_back(log_interval_mass(iv, mu));
    if (iv.lo < x) below.push_back(log_interval_mass({iv.lo, std::min(iv.hi, x)}, mu));
  }
  return {log_sum_exp(below), log_sum_exp(total)};
}

// F(x | mu) without the mass floor; used while bracketing, where the far end
// of the bracket routinely puts the support deep in a tail.
double cdf_unfloored(double x, double mu, const IntervalUnion& support) {
  const LogMasses lm = log_masses(x, mu, support);
  if (lm.total == -kInf) {
    throw Error(ErrorCode::degenerate, "truncated_cdf: support has zero mass");
  }
  if (lm.below == -kInf) return 0.0;
  return std::min(1.0, std::exp(lm.below - lm.total));
}

}  // namespace

double log_interval_mass(Interval iv, double mu) {
  const double a = iv.lo - mu;
  const double b = iv.hi - mu;
  if (!(a < b)) return -kInf;
  const bool upper_side = (a == -kInf) ? false : (b == kInf) ? true : (a + b) > 0.0;
  if (upper_side) return log_diff_exp(log_normal_sf(a), log_normal_sf(b));
  return log_diff_exp(log_normal_cdf(b), log_normal_cdf(a));
}

double truncated_cdf(double x, const TruncatedGaussian& dist) {
  if (dist.support.empty()) {
    throw Error(ErrorCode::validation, "truncated_cdf: empty support");
  }
  const LogMasses lm = log_masses(x, dist.mu, dist.support);
  if (!(lm.total >= std::log(kMassFloor))) {
    throw Error(ErrorCode::degenerate,
                "truncated_cdf: support mass below the numeric floor under the given mean");
  }
  if (lm.below == -kInf) return 0.0;
  return std::min(1.0, std::exp(lm.below - lm.total));
}

double invert_truncated_mu(double x_obs, const IntervalUnion& support, double p,
                           const InversionOptions& options) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::domain, "invert_truncated_mu: p must lie in (0, 1)");
  }
  if (!std::isfinite(x_obs) || !support.contains(x_obs, 1e-9 * std::max(1.0, std::abs(x_obs)))) {
    throw Error(ErrorCode::validation, "invert_truncated_mu: x_obs is not inside the support");
  }

  // F is decreasing in mu: F(lo) >= p >= F(hi) brackets the root.
  double half = options.initial_half_width;
  double lo = x_obs - half;
  double hi = x_obs + half;
  for (int attempt = 0;; ++attempt) {
    lo = x_obs - half;
    hi = x_obs + half;
    if (cdf_unfloored(x_obs, lo, support) >= p && cdf_unfloored(x_obs, hi, support) <= p) break;
    if (attempt == options.max_doublings) {
      throw Error(ErrorCode::bracket_failure,
                  "invert_truncated_mu: could not bracket the root; support is numerically "
                  "degenerate");
    }
    half *= 2.0;
  }

  while (hi - lo > options.mu_tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // adjacent doubles
    const double f = cdf_unfloored(x_obs, mid, support);
    if (std::abs(f - p) <= options.cdf_tolerance) return mid;
    if (f > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace selinf
