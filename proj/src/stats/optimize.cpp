#include "robpost/stats/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "robpost/error.hpp"

namespace robpost::stats {

MinimizeResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd start,
                           const NelderMeadOptions& options) {
  const Eigen::Index d = start.size();
  require(d >= 1, "nelder_mead: empty starting point");
  std::vector<Eigen::VectorXd> simplex(d + 1, start);
  std::vector<double> values(d + 1);
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (Eigen::Index k = 0; k < d; ++k) simplex[k + 1](k) += options.initial_step;
  for (Eigen::Index k = 0; k <= d; ++k) values[k] = eval(simplex[k]);

  std::vector<Eigen::Index> order(d + 1);
  while (evals < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const auto best = order.front(), worst = order.back(), second = order[d - 1];
    double spread = 0.0;
    for (Eigen::Index k = 0; k <= d; ++k)
      spread = std::max(spread, (simplex[k] - simplex[best]).lpNorm<Eigen::Infinity>());
    if (std::fabs(values[worst] - values[best]) <= options.tolerance * (1.0 + std::fabs(values[best])) &&
        spread <= std::sqrt(options.tolerance))
      break;
    if (spread < 1e-14) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (Eigen::Index k = 0; k <= d; ++k)
      if (k != worst) centroid += simplex[k];
    centroid /= static_cast<double>(d);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double fr = eval(reflected);
    if (fr < values[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = eval(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (Eigen::Index k = 0; k <= d; ++k) {
      if (k == best) continue;
      simplex[k] = simplex[best] + 0.5 * (simplex[k] - simplex[best]);
      values[k] = eval(simplex[k]);
    }
  }
  const auto best = std::min_element(values.begin(), values.end()) - values.begin();
  return {simplex[best], values[best], evals};
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol) {
  require(hi > lo, "golden_section: need lo < hi");
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * (1.0 + std::fabs(a) + std::fabs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol, int max_iter) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw NumericalError("bisect: no sign change on the bracket");
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace robpost::stats
