#include "robpost/robustness/divergence.hpp"

#include <cmath>
#include <sstream>

#include "robpost/error.hpp"

namespace robpost {

namespace {

double base_phi(const DivergenceSpec& d, double r) {
  switch (d.family) {
    case DivergenceFamily::chi2:
      return (r - 1.0) * (r - 1.0);
    case DivergenceFamily::kl:
      return r > 0.0 ? r * std::log(r) - r + 1.0 : 1.0;
    case DivergenceFamily::hellinger: {
      const double s = std::sqrt(r) - 1.0;
      return s * s;
    }
    case DivergenceFamily::cressie_read: {
      const double p = d.power;
      return (std::pow(r, p + 1.0) - 1.0 - (p + 1.0) * (r - 1.0)) / (p * (p + 1.0));
    }
  }
  return 0.0;
}

double base_prime(const DivergenceSpec& d, double r) {
  switch (d.family) {
    case DivergenceFamily::chi2:
      return 2.0 * (r - 1.0);
    case DivergenceFamily::kl:
      return std::log(r);
    case DivergenceFamily::hellinger:
      return 1.0 - 1.0 / std::sqrt(r);
    case DivergenceFamily::cressie_read:
      return (std::pow(r, d.power) - 1.0) / d.power;
  }
  return 0.0;
}

double base_curvature(const DivergenceSpec& d) {
  switch (d.family) {
    case DivergenceFamily::chi2:
      return 2.0;
    case DivergenceFamily::hellinger:
      return 0.5;
    default:
      return 1.0;
  }
}

// Closed-form inverse of base_prime; +inf above its range.
double base_inverse(const DivergenceSpec& d, double t) {
  switch (d.family) {
    case DivergenceFamily::chi2:
      return 1.0 + 0.5 * t;
    case DivergenceFamily::kl:
      return std::exp(t);
    case DivergenceFamily::hellinger:
      return t < 1.0 ? 1.0 / ((1.0 - t) * (1.0 - t)) : INFINITY;
    case DivergenceFamily::cressie_read: {
      const double b = 1.0 + d.power * t;
      return b > 0.0 ? std::pow(b, 1.0 / d.power) : (d.power > 0.0 ? 0.0 : INFINITY);
    }
  }
  return 0.0;
}

}  // namespace

void DivergenceSpec::validate() const {
  require(nu >= 0.0 && std::isfinite(nu), "divergence: regularization must be nonnegative");
  if (family == DivergenceFamily::cressie_read)
    require(std::isfinite(power) && power != 0.0 && power != -1.0, "divergence: Cressie-Read power must not be 0 or -1");
}

double DivergenceSpec::phi(double r) const { return base_phi(*this, r) + nu * (r - 1.0) * (r - 1.0); }

double DivergenceSpec::phi_prime(double r) const { return base_prime(*this, r) + 2.0 * nu * (r - 1.0); }

double DivergenceSpec::phi_second(double r) const {
  double base = 0.0;
  switch (family) {
    case DivergenceFamily::chi2:
      base = 2.0;
      break;
    case DivergenceFamily::kl:
      base = 1.0 / r;
      break;
    case DivergenceFamily::hellinger:
      base = 0.5 / (r * std::sqrt(r));
      break;
    case DivergenceFamily::cressie_read:
      base = std::pow(r, power - 1.0);
      break;
  }
  return base + 2.0 * nu;
}

double DivergenceSpec::curvature() const { return base_curvature(*this) + 2.0 * nu; }

double DivergenceSpec::phi_prime_floor() const {
  if (family == DivergenceFamily::chi2) return -2.0 - 2.0 * nu;
  if (family == DivergenceFamily::cressie_read && power > 0.0) return -1.0 / power - 2.0 * nu;
  return -INFINITY;
}

double DivergenceSpec::ratio_at(double t) const {
  if (t <= phi_prime_floor()) return 0.0;
  if (nu == 0.0) return base_inverse(*this, t);
  // phi' is strictly increasing; bracket and bisect in r.
  double lo = 0.0, hi = 1.0;
  while (phi_prime(hi) < t) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi_prime(mid) < t ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double DivergenceSpec::conjugate(double t) const {
  const double r = ratio_at(t);
  if (!std::isfinite(r)) return INFINITY;
  return t * r - phi(r);
}

DivergenceSpec DivergenceSpec::parse(const std::string& text) {
  DivergenceSpec d;
  std::string head = text, tail;
  if (const auto comma = text.find(','); comma != std::string::npos) {
    head = text.substr(0, comma);
    tail = text.substr(comma + 1);
  }
  if (head == "chi2") {
    d.family = DivergenceFamily::chi2;
  } else if (head == "kl") {
    d.family = DivergenceFamily::kl;
  } else if (head == "hellinger") {
    d.family = DivergenceFamily::hellinger;
  } else if (head.rfind("cressie_read", 0) == 0) {
    d.family = DivergenceFamily::cressie_read;
    const auto colon = head.find(':');
    if (colon == std::string::npos) throw ValidationError("divergence: cressie_read needs a power, e.g. cressie_read:0.5");
    try {
      d.power = std::stod(head.substr(colon + 1));
    } catch (const std::exception&) {
      throw ValidationError("divergence: cannot parse power in '" + head + "'");
    }
  } else {
    throw ValidationError("divergence: unknown family '" + head + "'");
  }
  if (!tail.empty()) {
    if (tail.rfind("nu=", 0) != 0) throw ValidationError("divergence: expected nu=<value>, got '" + tail + "'");
    try {
      d.nu = std::stod(tail.substr(3));
    } catch (const std::exception&) {
      throw ValidationError("divergence: cannot parse '" + tail + "'");
    }
  }
  d.validate();
  return d;
}

std::string DivergenceSpec::name() const {
  std::ostringstream out;
  switch (family) {
    case DivergenceFamily::chi2:
      out << "chi2";
      break;
    case DivergenceFamily::kl:
      out << "kl";
      break;
    case DivergenceFamily::hellinger:
      out << "hellinger";
      break;
    case DivergenceFamily::cressie_read:
      out << "cressie_read:" << power;
      break;
  }
  if (nu > 0.0) out << ",nu=" << nu;
  return out.str();
}

}  // namespace robpost
