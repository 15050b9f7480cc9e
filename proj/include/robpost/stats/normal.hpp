#pragma once

namespace robpost::stats {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_pdf(double z);
double normal_cdf(double z);
/// Upper tail 1 - Phi(z), accurate far into the right tail.
double normal_sf(double z);
/// Inverse of normal_cdf; AS241 starting value polished by one Halley step.
double normal_quantile(double p);
/// phi(z) / Phi(z), stable for very negative z.
double inverse_mills(double z);
/// Survival function of the chi-square distribution with one degree of freedom.
double chi2_1_sf(double x);

}  // namespace robpost::stats
