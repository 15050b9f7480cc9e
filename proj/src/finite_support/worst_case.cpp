#include "robpost/finite_support/worst_case.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "robpost/error.hpp"
#include "robpost/stats/optimize.hpp"
#include "robpost/stats/rng.hpp"

namespace robpost::fs {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlopeCap = 1e7;

// Normalized problem: sup c'f, c in [0, 1], Z'f = Z'w, D(f) <= eps.
// Z = [1, psi V] with V spanning the identified moment directions.
struct Problem {
  VectorXd c;
  VectorXd w;
  MatrixXd z;
  MatrixXd rotation;  // psi columns -> reduced directions
  VectorXd projection;  // c = Z projection + shift + range * (normalized c)
  double shift = 0.0;
  double offset = 0.0;  // value of sup at normalized objective zero
  double range = 0.0;
};

Problem normalize(const VectorXd& c, const VectorXd& w, const MatrixXd& psi) {
  const auto K = w.size();
  require(K >= 1, "worst_case_expectation: empty support");
  require(c.size() == K, "worst_case_expectation: objective length differs from weights");
  require(psi.rows() == K || psi.size() == 0, "worst_case_expectation: psi must have one row per support point");
  require((w.array() > 0.0).all() && std::abs(w.sum() - 1.0) < 1e-10,
          "worst_case_expectation: reference weights must be positive and sum to one");
  require(c.allFinite() && psi.allFinite(), "worst_case_expectation: non-finite input");
  Problem p;
  p.w = w;
  const Eigen::Index m = psi.size() == 0 ? 0 : psi.cols();
  if (m > 0) {
    const VectorXd mean = psi.transpose() * w;
    require(mean.cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + psi.cwiseAbs().maxCoeff()),
            "worst_case_expectation: moment functions must have mean zero under the reference weights");
    const MatrixXd scaled = w.cwiseSqrt().asDiagonal() * psi;
    Eigen::JacobiSVD<MatrixXd> svd(scaled, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > 1e-10 * std::max(sv(0), 1e-300)) ++r;
    p.rotation = svd.matrixV().leftCols(r);
  } else {
    p.rotation = MatrixXd(0, 0);
  }
  const Eigen::Index d = 1 + p.rotation.cols();
  p.z.resize(K, d);
  p.z.col(0).setOnes();
  if (d > 1) p.z.rightCols(d - 1) = psi * p.rotation;
  // Only the part of c orthogonal to the constraints moves the objective.
  const VectorXd sw = w.cwiseSqrt();
  p.projection = (sw.asDiagonal() * p.z).colPivHouseholderQr().solve(sw.cwiseProduct(c));
  const VectorXd resid = c - p.z * p.projection;
  const double lo = resid.minCoeff();
  p.range = resid.maxCoeff() - lo;
  if (p.range <= 1e-13 * std::max(c.cwiseAbs().maxCoeff(), 1e-300)) p.range = 0.0;
  p.offset = p.projection.dot(p.z.transpose() * w) + lo;
  p.shift = lo;
  p.c = p.range > 0.0 ? VectorXd((resid.array() - lo) / p.range) : VectorXd::Zero(K);
  if (p.range == 0.0) p.offset = c.dot(w);
  return p;
}

// Dual state for a fixed tilt slope.
struct Inner {
  VectorXd lambda;  // intercept, moment multipliers
  VectorXd ratio;   // rho(t_k)
  double objective = 0.0;
  double divergence = 0.0;
};

double dual_objective(const Problem& p, const DivergenceSpec& div, double slope, const VectorXd& lambda, VectorXd& t,
                      VectorXd& ratio) {
  t.noalias() = p.z * lambda;
  t += slope * p.c;
  double g = -lambda(0);
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    const double r = div.ratio_at(t(k));
    if (!std::isfinite(r)) return kInf;
    ratio(k) = r;
    g += p.w(k) * (t(k) * r - div.phi(r));
  }
  return g;
}

// Newton on the convex dual in (intercept, moment multipliers).
void solve_inner(const Problem& p, const DivergenceSpec& div, double slope, Inner& st) {
  const auto K = p.w.size();
  const auto d = p.z.cols();
  VectorXd t(K), ratio(K), t_try(K), ratio_try(K), grad(d), step(d), lam_try(d);
  MatrixXd hess(d, d);
  double g = dual_objective(p, div, slope, st.lambda, t, ratio);
  // A warm start can leave the domain; pull the intercept down until finite.
  for (int tries = 0; !std::isfinite(g) && tries < 200; ++tries) {
    st.lambda(0) -= std::max(1.0, std::abs(st.lambda(0))) * 0.5 + slope;
    g = dual_objective(p, div, slope, st.lambda, t, ratio);
  }
  if (!std::isfinite(g)) throw NumericalError("worst_case_expectation: dual has no finite starting point");
  const VectorXd target = p.z.transpose() * p.w;
  for (int it = 0; it < 200; ++it) {
    const VectorXd mass = p.w.cwiseProduct(ratio);
    grad.noalias() = p.z.transpose() * mass - target;
    if (grad.cwiseAbs().maxCoeff() < 1e-13) break;
    VectorXd curv(K);
    for (Eigen::Index k = 0; k < K; ++k) curv(k) = ratio(k) > 0.0 ? p.w(k) / div.phi_second(ratio(k)) : 0.0;
    hess.noalias() = p.z.transpose() * curv.asDiagonal() * p.z;
    const double ridge = 1e-12 * std::max(hess.diagonal().maxCoeff(), 1e-12);
    hess.diagonal().array() += ridge;
    step = -hess.ldlt().solve(grad);
    if (!step.allFinite()) step = -grad;
    const double slope_dir = grad.dot(step);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      lam_try = st.lambda + alpha * step;
      const double g_try = dual_objective(p, div, slope, lam_try, t_try, ratio_try);
      if (std::isfinite(g_try) && g_try <= g + 1e-4 * alpha * slope_dir + 1e-15 * std::abs(g)) {
        st.lambda = lam_try;
        t.swap(t_try);
        ratio.swap(ratio_try);
        moved = g_try < g || alpha == 1.0;
        g = g_try;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  st.ratio = ratio;
  st.objective = g;
  double dv = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) dv += p.w(k) * div.phi(ratio(k));
  st.divergence = dv;
}

Inner inner_at(const Problem& p, const DivergenceSpec& div, double slope, const Inner& warm, double warm_slope) {
  Inner st;
  st.lambda = warm.lambda * (slope / warm_slope);
  solve_inner(p, div, slope, st);
  return st;
}

double divergence_of(const DivergenceSpec& div, const VectorXd& f, const VectorXd& w) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < f.size(); ++k) s += w(k) * div.phi(f(k) / w(k));
  return s;
}

// Enumerate basic feasible solutions of Z'f = Z'w, f >= 0.
// `unique` reports whether a single vertex attains the maximum.
double lp_maximum(const Problem& p, VectorXd& argmax, bool& unique) {
  const auto K = p.w.size();
  const auto d = p.z.cols();
  const VectorXd b = p.z.transpose() * p.w;
  double best = -kInf;
  unique = true;
  std::vector<Eigen::Index> subset;
  std::size_t visited = 0;
  VectorXd full(K);
  const std::function<void(Eigen::Index)> visit = [&](Eigen::Index start) {
    if (!subset.empty()) {
      if (++visited > 2000000) throw NumericalError("worst_case_expectation: support too large for vertex enumeration");
      const auto s = static_cast<Eigen::Index>(subset.size());
      MatrixXd a(d, s);
      for (Eigen::Index j = 0; j < s; ++j) a.col(j) = p.z.row(subset[static_cast<std::size_t>(j)]).transpose();
      const VectorXd f = a.colPivHouseholderQr().solve(b);
      if ((a * f - b).cwiseAbs().maxCoeff() <= 1e-10 && f.minCoeff() >= -1e-12) {
        full.setZero();
        for (Eigen::Index j = 0; j < s; ++j) full(subset[static_cast<std::size_t>(j)]) = std::max(f(j), 0.0);
        const double v = p.c.dot(full);
        if (v > best + 1e-12) {
          best = v;
          argmax = full;
          unique = true;
        } else if (v >= best - 1e-12 && (full - argmax).cwiseAbs().maxCoeff() > 1e-9) {
          unique = false;
        }
      }
    }
    if (static_cast<Eigen::Index>(subset.size()) == d) return;
    for (Eigen::Index k = start; k < K; ++k) {
      subset.push_back(k);
      visit(k + 1);
      subset.pop_back();
    }
  };
  visit(0);
  return best;
}

// Multiplicative correction onto Z'f = Z'w; keeps the zero pattern of f.
VectorXd restore_constraints(const Problem& p, VectorXd f) {
  const VectorXd target = p.z.transpose() * p.w;
  for (int it = 0; it < 3; ++it) {
    const VectorXd resid = target - p.z.transpose() * f;
    if (resid.cwiseAbs().maxCoeff() < 1e-15) break;
    const MatrixXd gram = p.z.transpose() * f.asDiagonal() * p.z;
    const VectorXd eta = gram.completeOrthogonalDecomposition().solve(resid);
    const VectorXd scale = (1.0 + (p.z * eta).array()).max(0.0);
    f = f.cwiseProduct(scale);
  }
  return f;
}

WorstCaseExpectation trivial(const Problem& p, Solver solver) {
  WorstCaseExpectation out;
  out.solver = solver;
  out.weights = p.w;
  out.value = p.offset + p.range * p.c.dot(p.w);
  out.multiplier_moments = VectorXd::Zero(p.rotation.rows());
  return out;
}

WorstCaseExpectation solve_dual(const Problem& p, const DivergenceSpec& div, double eps) {
  WorstCaseExpectation out;
  out.solver = Solver::dual_tilting;
  out.multiplier_moments = VectorXd::Zero(p.rotation.rows());
  VectorXd vertex;
  bool unique = false;
  const double lp = lp_maximum(p, vertex, unique);
  if (unique && divergence_of(div, vertex, p.w) <= eps) {
    // The divergence bound does not bind: the linear program decides.
    out.divergence_slack = true;
    out.value = p.offset + p.range * lp;
    out.weights = vertex;
    out.multiplier_divergence = kInf;
    return out;
  }
  Inner start;
  start.lambda = VectorXd::Zero(p.z.cols());
  start.lambda(0) = -p.c.dot(p.w);
  double lo_slope = 1.0;
  Inner lo_state = start;
  solve_inner(p, div, lo_slope, lo_state);
  double hi_slope = lo_slope;
  Inner hi_state = lo_state;
  bool slack = false;
  if (lo_state.divergence < eps) {
    while (hi_state.divergence < eps) {
      if (hi_slope >= kSlopeCap) {
        slack = true;
        break;
      }
      lo_slope = hi_slope;
      lo_state = hi_state;
      hi_slope = std::min(hi_slope * 4.0, kSlopeCap);
      hi_state = inner_at(p, div, hi_slope, lo_state, lo_slope);
    }
  } else {
    while (lo_state.divergence > eps && lo_slope > 1e-14) {
      hi_slope = lo_slope;
      hi_state = lo_state;
      lo_slope *= 0.25;
      lo_state = inner_at(p, div, lo_slope, hi_state, hi_slope);
    }
  }
  Inner final_state;
  double final_slope = 0.0;
  if (slack) {
    out.divergence_slack = true;
    out.value = p.offset + p.range * lp;
    out.weights = restore_constraints(p, p.w.cwiseProduct(hi_state.ratio));
    out.multiplier_divergence = kInf;
    final_state = hi_state;
    final_slope = hi_slope;
  } else if (lo_state.divergence > eps) {
    final_state = lo_state;
    final_slope = lo_slope;
  } else {
    // Illinois regula falsi on log D - log eps in log slope.
    auto gap = [&](const Inner& s) {
      return s.divergence > 0.0 ? std::log(s.divergence) - std::log(eps) : -kInf;
    };
    double a = std::log(lo_slope), b = std::log(hi_slope);
    double ga = gap(lo_state), gb = gap(hi_state);
    Inner sa = lo_state, sb = hi_state;
    int side = 0;
    final_state = sb;
    final_slope = hi_slope;
    for (int it = 0; it < 200; ++it) {
      double x = std::isfinite(ga) && std::isfinite(gb) && gb != ga ? b - gb * (b - a) / (gb - ga) : 0.5 * (a + b);
      if (!(x > a && x < b)) x = 0.5 * (a + b);
      const Inner& near = (x - a < b - x) ? sa : sb;
      const double near_slope = std::exp((x - a < b - x) ? a : b);
      Inner sx = inner_at(p, div, std::exp(x), near, near_slope);
      const double gx = gap(sx);
      final_state = sx;
      final_slope = std::exp(x);
      if (std::abs(sx.divergence - eps) <= 1e-12 * eps || b - a < 1e-13) break;
      if (gx > 0.0) {
        b = x;
        gb = gx;
        sb = std::move(sx);
        if (side == 1) ga *= 0.5;
        side = 1;
      } else {
        a = x;
        ga = gx;
        sa = std::move(sx);
        if (side == -1) gb *= 0.5;
        side = -1;
      }
    }
  }
  if (!slack) {
    out.weights = restore_constraints(p, p.w.cwiseProduct(final_state.ratio));
    out.value = p.offset + p.range * p.c.dot(out.weights);
    out.multiplier_divergence = final_slope / p.range;
  }
  // Back to the original scale: t = m0 + m1 c + psi m2.
  const double scale = final_slope / p.range;
  const VectorXd lambda = final_state.lambda - scale * p.projection;
  out.multiplier_mass = lambda(0) - scale * p.shift;
  out.multiplier_moments = p.rotation.cols() > 0 ? VectorXd(p.rotation * lambda.tail(p.rotation.cols()))
                                                 : VectorXd::Zero(p.rotation.rows());
  return out;
}

// Log-barrier interior point on the primal problem.
WorstCaseExpectation solve_primal(const Problem& p, const DivergenceSpec& div, double eps) {
  const auto K = p.w.size();
  const auto d = p.z.cols();
  const MatrixXd aeq = p.z.transpose();
  VectorXd f = p.w;
  auto barrier = [&](const VectorXd& x, double t) {
    if (x.minCoeff() <= 0.0) return kInf;
    const double s = eps - divergence_of(div, x, p.w);
    if (!(s > 0.0)) return kInf;
    return -t * p.c.dot(x) - x.array().log().sum() - std::log(s);
  };
  const double t_final = 1e10 * static_cast<double>(K + 1);
  // Orthonormal basis of directions keeping the equality constraints.
  const Eigen::FullPivHouseholderQR<MatrixXd> qr(aeq.transpose());
  const MatrixXd basis = MatrixXd(qr.matrixQ()).rightCols(K - d);
  MatrixXd hess(K, K);
  VectorXd grad(K), dphi(K), step(K);
  for (double t = 1.0;; t = std::min(t * 10.0, t_final)) {
    for (int it = 0; it < 200; ++it) {
      const double s = eps - divergence_of(div, f, p.w);
      for (Eigen::Index k = 0; k < K; ++k) dphi(k) = div.phi_prime(f(k) / p.w(k));
      grad = -t * p.c - f.cwiseInverse() + dphi / s;
      hess.noalias() = dphi * dphi.transpose() / (s * s);
      for (Eigen::Index k = 0; k < K; ++k)
        hess(k, k) += 1.0 / (f(k) * f(k)) + div.phi_second(f(k) / p.w(k)) / (p.w(k) * s);
      const MatrixXd reduced = basis.transpose() * hess * basis;
      step = -basis * reduced.ldlt().solve(basis.transpose() * grad);
      const double decrement = -grad.dot(step);
      if (!(decrement > 2e-12)) break;
      const double f0 = barrier(f, t);
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls) {
        const VectorXd trial = f + alpha * step;
        const double ft = barrier(trial, t);
        if (std::isfinite(ft) && ft <= f0 - 0.25 * alpha * decrement) {
          f = trial;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    if (t >= t_final) break;
  }
  WorstCaseExpectation out;
  out.solver = Solver::primal_barrier;
  out.weights = restore_constraints(p, f);
  out.value = p.offset + p.range * p.c.dot(out.weights);
  out.divergence_slack = divergence_of(div, f, p.w) < eps * (1.0 - 1e-6);
  out.multiplier_moments = VectorXd::Zero(p.rotation.rows());
  return out;
}

VectorXd bias_direction(const DiscreteInstance& inst, const VectorXd& gamma) { return expand(inst, gamma) - inst.delta; }

MatrixXd moments_of(const DiscreteInstance& inst) {
  return inst.psi.size() == 0 ? MatrixXd(static_cast<Eigen::Index>(inst.size()), 0) : inst.psi;
}

RatioReport ratio_search(const DiscreteInstance& inst, const std::function<double(const VectorXd&)>& objective,
                         std::uint64_t seed) {
  const VectorXd post = posterior_reduce(inst).class_means;
  const auto L = post.size();
  RatioReport rep;
  rep.posterior = objective(post);
  const double dmin = inst.delta.minCoeff(), dmax = inst.delta.maxCoeff();
  const double scale = dmax > dmin ? dmax - dmin : 1.0;
  std::vector<VectorXd> starts{post, VectorXd::Constant(L, 0.5 * (dmin + dmax))};
  stats::RngStream rng(seed, 0x7e0f);
  while (starts.size() < 20) {
    VectorXd s(L);
    for (Eigen::Index l = 0; l < L; ++l) s(l) = dmin - 0.25 * scale + 1.5 * scale * rng.uniform();
    starts.push_back(s);
  }
  rep.infimum = rep.posterior;
  rep.argmin = post;
  stats::NelderMeadOptions opt;
  opt.initial_step = 0.2 * scale;
  opt.tolerance = 1e-13;
  opt.max_evaluations = 400;
  for (const auto& s : starts) {
    const auto r = stats::nelder_mead(objective, s, opt);
    if (r.value < rep.infimum) {
      rep.infimum = r.value;
      rep.argmin = r.argmin;
    }
  }
  opt.initial_step = 0.01 * scale;
  const auto polish = stats::nelder_mead(objective, rep.argmin, opt);
  if (polish.value < rep.infimum) {
    rep.infimum = polish.value;
    rep.argmin = polish.argmin;
  }
  if (rep.infimum <= 1e-14)
    rep.ratio = rep.posterior <= 1e-12 ? 1.0 : kInf;
  else
    rep.ratio = rep.posterior / rep.infimum;
  return rep;
}

}  // namespace

WorstCaseExpectation worst_case_expectation(const VectorXd& c, const VectorXd& ref_weights, const MatrixXd& psi,
                                            const DivergenceSpec& div, double epsilon, Solver solver) {
  div.validate();
  require(std::isfinite(epsilon) && epsilon >= 0.0, "worst_case_expectation: epsilon must be finite and nonnegative");
  const Problem p = normalize(c, ref_weights, psi);
  if (epsilon == 0.0 || p.range == 0.0 || p.z.cols() >= p.w.size()) return trivial(p, solver);
  return solver == Solver::dual_tilting ? solve_dual(p, div, epsilon) : solve_primal(p, div, epsilon);
}

WorstCaseSolution worst_case_bias(const DiscreteInstance& inst, const VectorXd& gamma, const DivergenceSpec& div,
                                  double epsilon, Solver solver) {
  inst.validate();
  const VectorXd c = bias_direction(inst, gamma);
  const MatrixXd psi = moments_of(inst);
  WorstCaseSolution out;
  out.solver = solver;
  out.upper_detail = worst_case_expectation(c, inst.ref_weights, psi, div, epsilon, solver);
  out.lower_detail = worst_case_expectation(-c, inst.ref_weights, psi, div, epsilon, solver);
  out.upper = out.upper_detail.value;
  out.lower = -out.lower_detail.value;
  out.f0_upper = out.upper_detail.weights;
  out.f0_lower = out.lower_detail.weights;
  out.bias = std::max(out.upper, -out.lower);
  return out;
}

WorstCaseExpectation worst_case_mse(const DiscreteInstance& inst, const VectorXd& gamma, const DivergenceSpec& div,
                                    double epsilon, Solver solver) {
  inst.validate();
  const VectorXd c = bias_direction(inst, gamma).array().square();
  return worst_case_expectation(c, inst.ref_weights, moments_of(inst), div, epsilon, solver);
}

WorstCaseSolution worst_case_bias_checked(const DiscreteInstance& inst, const VectorXd& gamma,
                                          const DivergenceSpec& div, double epsilon, double tolerance) {
  auto dual = worst_case_bias(inst, gamma, div, epsilon, Solver::dual_tilting);
  const auto primal = worst_case_bias(inst, gamma, div, epsilon, Solver::primal_barrier);
  if (std::abs(dual.bias - primal.bias) > tolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "worst_case_bias: solvers disagree (dual " << dual.bias << ", primal " << primal.bias << ", epsilon "
        << epsilon << ", divergence " << div.name() << ")";
    throw NumericalError(msg.str());
  }
  return dual;
}

double local_slope(const DiscreteInstance& inst, const VectorXd& gamma, const DivergenceSpec& div) {
  inst.validate();
  const VectorXd c = bias_direction(inst, gamma);
  const auto K = c.size();
  const MatrixXd psi = moments_of(inst);
  MatrixXd design(K, 1 + psi.cols());
  design.col(0).setOnes();
  design.rightCols(psi.cols()) = psi;
  const VectorXd sw = inst.ref_weights.cwiseSqrt();
  const MatrixXd a = sw.asDiagonal() * design;
  const VectorXd coef = a.completeOrthogonalDecomposition().solve(sw.cwiseProduct(c));
  const VectorXd resid = c - design * coef;
  const double var = inst.ref_weights.dot(resid.cwiseAbs2());
  return std::sqrt(2.0 / div.curvature() * var);
}

Theorem1Report verify_theorem1(const DiscreteInstance& inst, const DivergenceSpec& div,
                               const std::vector<double>& epsilons, const std::vector<VectorXd>& candidates,
                               double tolerance) {
  require(epsilons.size() >= 4, "verify_theorem1: need at least four epsilon values");
  for (double e : epsilons) require(e > 0.0, "verify_theorem1: epsilon values must be positive");
  const auto n = static_cast<Eigen::Index>(epsilons.size());
  MatrixXd x(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = epsilons[static_cast<std::size_t>(i)];
    x.row(i) << 1.0, std::sqrt(e), e;
  }
  const auto qr = x.colPivHouseholderQr();
  std::vector<VectorXd> all{posterior_reduce(inst).class_means};
  all.insert(all.end(), candidates.begin(), candidates.end());
  Theorem1Report rep;
  for (const auto& g : all) {
    VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) b(i) = worst_case_bias(inst, g, div, epsilons[static_cast<std::size_t>(i)]).bias;
    const VectorXd coef = qr.solve(b);
    const double sst = (b.array() - b.mean()).square().sum();
    const double ssr = (b - x * coef).squaredNorm();
    CandidateFit fit;
    fit.intercept = coef(0);
    fit.slope = coef(1);
    fit.curvature = coef(2);
    fit.r2 = sst > 1e-30 ? 1.0 - ssr / sst : 1.0;
    fit.analytic_slope = local_slope(inst, g, div);
    if (fit.r2 < 0.999) {
      std::ostringstream msg;
      msg << "verify_theorem1: poor sqrt(epsilon) fit (R^2 = " << fit.r2 << ")";
      throw NumericalError(msg.str());
    }
    rep.fits.push_back(fit);
  }
  const double sp = rep.fits.front().slope;
  rep.max_slope_gap = -kInf;
  for (std::size_t i = 1; i < rep.fits.size(); ++i) rep.max_slope_gap = std::max(rep.max_slope_gap, sp - rep.fits[i].slope);
  if (rep.fits.size() == 1) rep.max_slope_gap = 0.0;
  rep.posterior_minimal = rep.max_slope_gap <= tolerance;
  const double an = rep.fits.front().analytic_slope;
  rep.posterior_slope_rel_error = an > 0.0 ? std::abs(sp - an) / an : std::abs(sp);
  return rep;
}

RatioReport verify_theorem2(const DiscreteInstance& inst, const DivergenceSpec& div, double epsilon,
                            std::uint64_t seed) {
  inst.validate();
  return ratio_search(
      inst, [&](const VectorXd& g) { return worst_case_bias(inst, g, div, epsilon).bias; }, seed);
}

RatioReport verify_theorem3(const DiscreteInstance& inst, const DivergenceSpec& div, double epsilon,
                            std::uint64_t seed) {
  inst.validate();
  return ratio_search(
      inst, [&](const VectorXd& g) { return worst_case_mse(inst, g, div, epsilon).value; }, seed);
}

}  // namespace robpost::fs
