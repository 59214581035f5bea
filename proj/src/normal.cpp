#include "selinf/normal.hpp"

#include "selinf/error.hpp"

#include <cmath>
#include <limits>

namespace selinf {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Above this point erfc would lose its range; switch to the Mills ratio.
constexpr double kLogTailSwitch = 30.0;

// Mills ratio Q(x)/phi(x) by backward evaluation of its continued fraction;
// 120 terms are ample for x >= 5.
double mills_ratio(double x) {
  double tail = x;
  for (int k = 120; k >= 1; --k) tail = x + k / tail;
  return 1.0 / tail;
}

double polynomial(const double* coeffs, int n, double r) {
  double acc = coeffs[n - 1];
  for (int i = n - 2; i >= 0; --i) acc = acc * r + coeffs[i];
  return acc;
}

// Wichura (1988), algorithm AS241 (PPND16).
double quantile_as241(double p) {
  static constexpr double a[] = {3.3871328727963666080e0, 1.3314166789178437745e+2,
                                 1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                 3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double b[] = {1.0,
                                 4.2313330701600911252e+1, 6.8718700749205790830e+2,
                                 5.3941960214247511077e+3, 2.1213794301586595867e+4,
                                 3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                 5.2264952788528545610e+3};
  static constexpr double c[] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                                 5.76949722146069140550e0, 3.64784832476320460504e0,
                                 1.27045825245236838258e0, 2.41780725177450611770e-1,
                                 2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[] = {1.0,
                                 2.05319162663775882187e0, 1.67638483018380384940e0,
                                 6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                 1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                 1.05075007164441684324e-9};
  static constexpr double e[] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                                 1.78482653991729133580e0, 2.96560571828504891230e-1,
                                 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                 2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[] = {1.0,
                                 5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                 1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                 1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                 2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * polynomial(a, 8, r) / polynomial(b, 8, r);
  }
  double r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = polynomial(c, 8, r) / polynomial(d, 8, r);
  } else {
    r -= 5.0;
    value = polynomial(e, 8, r) / polynomial(f, 8, r);
  }
  return q < 0 ? -value : value;
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

namespace {

// Upper tail for x >= kTailSwitch. Scaling x by 1/sqrt(2) before erfc costs
// about x^2 ulps of relative accuracy, so exp(-x^2/2) is formed from an
// exactly-squared head and a small correction instead.
constexpr double kTailSwitch = 5.0;

double upper_tail(double x) {
  const double head = std::trunc(x * 16.0) / 16.0;
  const double del = (x - head) * (x + head);
  return std::exp(-0.5 * head * head) * std::exp(-0.5 * del) * mills_ratio(x) * kInvSqrt2Pi;
}

}  // namespace

double normal_cdf(double x) {
  if (x <= -kTailSwitch) return upper_tail(-x);
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double normal_sf(double x) {
  if (x >= kTailSwitch) return upper_tail(x);
  return 0.5 * std::erfc(x * kInvSqrt2);
}

double log_normal_sf(double x) {
  if (std::isinf(x)) return x > 0 ? -std::numeric_limits<double>::infinity() : 0.0;
  if (x < 0.0) return std::log1p(-normal_cdf(x));
  if (x < kLogTailSwitch) return std::log(normal_sf(x));
  return -0.5 * x * x - kLogSqrt2Pi + std::log(mills_ratio(x));
}

double log_normal_cdf(double x) { return log_normal_sf(-x); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::domain, "normal_quantile: p must lie in (0, 1)");
  }
  double x = quantile_as241(p);
  // One Halley step against the erfc-based distribution function. For
  // p >= 0.5, 1 - p is exact, so the residual is formed in the upper tail.
  const double residual = p < 0.5 ? normal_cdf(x) - p : (1.0 - p) - normal_sf(x);
  const double density = normal_pdf(x);
  if (density > 1e-300) {
    const double u = residual / density;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace selinf
