#pragma once

namespace selinf {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal distribution function. Both tails keep full relative
/// precision because the upper tail is never formed as 1 - Phi.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), accurate for large positive x.
double normal_sf(double x);

/// log Phi(x); finite for every finite x, including far below the
/// underflow point of normal_cdf.
double log_normal_cdf(double x);

/// log(1 - Phi(x)).
double log_normal_sf(double x);

/// Inverse of normal_cdf on (0, 1). Throws Error(domain) outside it.
double normal_quantile(double p);

}  // namespace selinf
