#include "robpost/finite_support/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "robpost/error.hpp"
#include "robpost/stats/distributions.hpp"
#include "robpost/stats/normal.hpp"

namespace robpost::fs {

namespace {

std::vector<double> distinct_sorted(const std::vector<double>& g) {
  std::vector<double> v = g;
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::size_t count_classes(const std::vector<double>& g_values) { return distinct_sorted(g_values).size(); }

std::vector<std::size_t> DiscreteInstance::class_index() const {
  const auto levels = distinct_sorted(g_values);
  std::vector<std::size_t> idx(g_values.size());
  for (std::size_t k = 0; k < g_values.size(); ++k)
    idx[k] = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), g_values[k]) - levels.begin());
  return idx;
}

void DiscreteInstance::validate() const {
  const auto K = ref_weights.size();
  require(K >= 1, "instance: empty support");
  require(static_cast<Eigen::Index>(g_values.size()) == K, "instance: g_values length differs from weights");
  require(delta.size() == K, "instance: delta length differs from weights");
  require(support.empty() || static_cast<Eigen::Index>(support.size()) == K, "instance: support length differs");
  require(psi.rows() == K || (psi.size() == 0), "instance: psi must have one row per support point");
  require((ref_weights.array() > 0.0).all(), "instance: reference weights must be positive");
  require(std::abs(ref_weights.sum() - 1.0) < 1e-10, "instance: reference weights must sum to one");
  require(delta.allFinite() && psi.allFinite(), "instance: non-finite values");
  for (double g : g_values) require(std::isfinite(g), "instance: non-finite g value");
  require(counts.size() == static_cast<Eigen::Index>(count_classes(g_values)),
          "instance: counts must have one entry per distinct g value");
  require((counts.array() >= 0.0).all(), "instance: counts must be nonnegative");
}

DiscreteInstance DiscreteInstance::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("instance: invalid JSON: ") + e.what());
  }
  DiscreteInstance inst;
  try {
    const auto w = j.at("ref_weights").get<std::vector<double>>();
    const auto d = j.at("delta").get<std::vector<double>>();
    const auto c = j.at("counts").get<std::vector<double>>();
    inst.g_values = j.at("g_values").get<std::vector<double>>();
    if (j.contains("support")) inst.support = j.at("support").get<std::vector<double>>();
    inst.ref_weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    inst.delta = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
    inst.counts = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    const auto rows = j.contains("psi") ? j.at("psi").get<std::vector<std::vector<double>>>()
                                        : std::vector<std::vector<double>>{};
    const auto K = static_cast<Eigen::Index>(w.size());
    const Eigen::Index m = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
    require(rows.empty() || static_cast<Eigen::Index>(rows.size()) == K, "instance: psi must have one row per support point");
    inst.psi = Eigen::MatrixXd::Zero(K, m);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      require(static_cast<Eigen::Index>(rows[k].size()) == m, "instance: ragged psi");
      for (Eigen::Index c2 = 0; c2 < m; ++c2) inst.psi(static_cast<Eigen::Index>(k), c2) = rows[k][static_cast<std::size_t>(c2)];
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("instance: ") + e.what());
  }
  inst.validate();
  return inst;
}

std::string DiscreteInstance::to_json() const {
  nlohmann::json j;
  j["support"] = support;
  j["ref_weights"] = std::vector<double>(ref_weights.data(), ref_weights.data() + ref_weights.size());
  j["g_values"] = g_values;
  j["delta"] = std::vector<double>(delta.data(), delta.data() + delta.size());
  std::vector<std::vector<double>> rows;
  for (Eigen::Index k = 0; k < psi.rows(); ++k) {
    std::vector<double> r(static_cast<std::size_t>(psi.cols()));
    for (Eigen::Index c = 0; c < psi.cols(); ++c) r[static_cast<std::size_t>(c)] = psi(k, c);
    rows.push_back(r);
  }
  j["psi"] = rows;
  j["counts"] = std::vector<double>(counts.data(), counts.data() + counts.size());
  return j.dump();
}

PosteriorReduction posterior_reduce(const DiscreteInstance& inst) {
  inst.validate();
  const auto idx = inst.class_index();
  const auto L = static_cast<Eigen::Index>(inst.classes());
  Eigen::VectorXd num = Eigen::VectorXd::Zero(L), den = Eigen::VectorXd::Zero(L);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto l = static_cast<Eigen::Index>(idx[k]);
    num(l) += inst.ref_weights(static_cast<Eigen::Index>(k)) * inst.delta(static_cast<Eigen::Index>(k));
    den(l) += inst.ref_weights(static_cast<Eigen::Index>(k));
  }
  PosteriorReduction r;
  r.class_means = num.cwiseQuotient(den);
  const double n = inst.counts.sum();
  require(n > 0.0, "posterior_reduce: no observations");
  r.estimate = inst.counts.dot(r.class_means) / n;
  return r;
}

double dirichlet_posterior_mean(const DiscreteInstance& inst, double concentration) {
  inst.validate();
  require(concentration > 0.0, "dirichlet_posterior_mean: concentration must be positive");
  const auto idx = inst.class_index();
  const auto L = static_cast<Eigen::Index>(inst.classes());
  Eigen::VectorXd class_weight = Eigen::VectorXd::Zero(L);
  for (std::size_t k = 0; k < idx.size(); ++k)
    class_weight(static_cast<Eigen::Index>(idx[k])) += inst.ref_weights(static_cast<Eigen::Index>(k));
  const double n = inst.counts.sum();
  double out = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const auto l = static_cast<Eigen::Index>(idx[k]);
    // alpha_k / alpha_class = omega_k / Omega_class; the M factors cancel.
    const double share = inst.ref_weights(kk) / class_weight(l);
    const double class_mean = (inst.counts(l) + concentration * class_weight(l)) / (n + concentration);
    out += inst.delta(kk) * share * class_mean;
  }
  return out;
}

Eigen::VectorXd expand(const DiscreteInstance& inst, const Eigen::VectorXd& per_class) {
  require(per_class.size() == static_cast<Eigen::Index>(inst.classes()), "expand: one value per class required");
  const auto idx = inst.class_index();
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Eigen::Index>(k)) = per_class(static_cast<Eigen::Index>(idx[k]));
  return out;
}

DiscreteInstance random_instance(stats::RngStream& rng) {
  auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)); };
  const std::size_t K = 2 + below(4);
  const std::size_t L = 1 + below(std::min<std::size_t>(K, 4));
  DiscreteInstance inst;
  const auto w = stats::draw_dirichlet(std::vector<double>(K, 1.0), rng);
  inst.ref_weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(K));
  inst.ref_weights /= inst.ref_weights.sum();
  inst.delta.resize(static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) inst.delta(static_cast<Eigen::Index>(k)) = 2.0 * rng.uniform() - 1.0;
  // Random surjection: a shuffled prefix covers every class.
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t k = K - 1; k > 0; --k) std::swap(order[k], order[below(k + 1)]);
  std::vector<std::size_t> cls(K);
  for (std::size_t j = 0; j < K; ++j) cls[order[j]] = j < L ? j : below(L);
  for (std::size_t k = 0; k < K; ++k) {
    inst.g_values.push_back(static_cast<double>(cls[k]));
    inst.support.push_back(static_cast<double>(k));
  }
  const std::size_t m = below(std::min<std::size_t>(L - 1, 2) + 1);
  inst.psi.resize(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(m));
  for (std::size_t c = 0; c < m; ++c) {
    std::vector<double> level(L);
    for (auto& v : level) v = rng.normal();
    double center = 0.0;
    for (std::size_t k = 0; k < K; ++k) center += inst.ref_weights(static_cast<Eigen::Index>(k)) * level[cls[k]];
    for (std::size_t k = 0; k < K; ++k)
      inst.psi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = level[cls[k]] - center;
  }
  inst.counts.resize(static_cast<Eigen::Index>(L));
  for (std::size_t l = 0; l < L; ++l) inst.counts(static_cast<Eigen::Index>(l)) = 1.0 + static_cast<double>(below(20));
  inst.validate();
  return inst;
}

DiscreteInstance binary_choice_instance(double index_obs, double index_cf) {
  require(index_cf > index_obs, "binary_choice_instance: counterfactual index must exceed the observed one");
  DiscreteInstance inst;
  const double p_low = stats::normal_cdf(-index_cf);
  const double p_mid = stats::normal_cdf(-index_obs) - p_low;
  const double p_high = stats::normal_cdf(index_obs);
  inst.ref_weights = Eigen::Vector3d(p_low, p_mid, p_high);
  inst.ref_weights /= inst.ref_weights.sum();
  inst.support = {-index_cf - 1.0, -0.5 * (index_cf + index_obs), -index_obs + 1.0};
  inst.g_values = {0.0, 0.0, 1.0};
  inst.delta = Eigen::Vector3d(0.0, 1.0, 1.0);
  inst.psi = Eigen::MatrixXd(3, 0);
  inst.counts = Eigen::Vector2d(1000.0 * (p_low + p_mid), 1000.0 * p_high);
  inst.validate();
  return inst;
}

}  // namespace robpost::fs
