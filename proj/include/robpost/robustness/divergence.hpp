#pragma once

#include <string>

namespace robpost {

enum class DivergenceFamily { kl, chi2, hellinger, cressie_read };

/// phi(r) = base(r) + nu (r - 1)^2 with base normalized so phi(1) = phi'(1) = 0:
///   chi2          (r - 1)^2
///   kl            r log r - r + 1
///   hellinger     (sqrt(r) - 1)^2
///   cressie_read  (r^(p+1) - 1 - (p+1)(r - 1)) / (p (p+1))
struct DivergenceSpec {
  DivergenceFamily family = DivergenceFamily::chi2;
  double power = 1.0;  // cressie_read only; nonzero and not -1
  double nu = 0.0;

  double phi(double r) const;
  double phi_prime(double r) const;
  double phi_second(double r) const;
  /// phi''(1), including the regularization term.
  double curvature() const;
  /// Inverse of phi' on (0, inf): the likelihood ratio at tilt t, clipped at 0
  /// where phi' is bounded below.
  double ratio_at(double t) const;
  /// Convex conjugate over r >= 0: sup_r {t r - phi(r)}.
  double conjugate(double t) const;
  /// Smallest value phi' takes on [0, inf), or -inf.
  double phi_prime_floor() const;
  void validate() const;

  /// "chi2", "kl", "hellinger" or "cressie_read:<power>", optionally with ",nu=<value>".
  static DivergenceSpec parse(const std::string& text);
  std::string name() const;
};

}  // namespace robpost
