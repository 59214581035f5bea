#pragma once

#include "selinf/interval_union.hpp"

namespace selinf {

/// N(mu, 1) restricted to a finite union of closed intervals.
struct TruncatedGaussian {
  double mu = 0.0;
  IntervalUnion support;
};

/// Supports whose total mass falls below this are rejected as degenerate.
inline constexpr double kMassFloor = 1e-300;

/// log P(lo <= xi + mu <= hi) for xi ~ N(0,1). Differences are taken between
/// tail probabilities on the side of the smaller mass, so the result is
/// accurate far into either tail. Returns -inf for empty intervals.
double log_interval_mass(Interval iv, double mu);

/// Distribution function of the truncated Gaussian at x.
/// Throws Error(validation) for an empty support and Error(degenerate) when the
/// support mass under N(mu, 1) is below kMassFloor.
double truncated_cdf(double x, const TruncatedGaussian& dist);

struct InversionOptions {
  double initial_half_width = 40.0;
  int max_doublings = 4;
  // Zero tolerances bisect down to adjacent doubles.
  double mu_tolerance = 0.0;
  double cdf_tolerance = 0.0;
};

/// Solves truncated_cdf(x_obs, {mu, support}) = p for mu. The CDF is strictly
/// decreasing in mu, so the root is unique; it is found by bisection on an
/// expanding bracket centred at x_obs.
///
/// Throws Error(domain) when p is not in (0,1), Error(validation) when x_obs is
/// not inside the support and Error(bracket_failure) when the bracket cannot
/// be established.
double invert_truncated_mu(double x_obs, const IntervalUnion& support, double p,
                           const InversionOptions& options = {});

}  // namespace selinf
