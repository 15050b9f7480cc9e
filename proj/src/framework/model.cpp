#include "robpost/framework/model.hpp"

#include <algorithm>
#include <map>

#include "robpost/error.hpp"

namespace robpost {

Vector ReferenceModel::regression_features(const Vector& y, const Vector& x) const {
  Vector f(y.size() + x.size());
  f << y, x;
  return f;
}

std::optional<double> ReferenceModel::posterior_expectation(const LatentMap&, const Vector&, const Vector&) const {
  return std::nullopt;
}

std::optional<double> ReferenceModel::prior_expectation(const LatentMap&, const Vector&) const { return std::nullopt; }

Vector ReferenceModel::influence(const Vector&, const Vector&) const { return Vector(0); }

LatentMap Target::bind(const ReferenceModel& model) const {
  require(static_cast<bool>(delta), "target '" + name + "' has no latent map");
  return [&model, d = delta](const Vector& u, const Vector& x) { return d(model, u, x); };
}

Target make_target(std::string name, LatentMap delta) {
  Target t;
  t.name = std::move(name);
  t.delta = [d = std::move(delta)](const ReferenceModel&, const Vector& u, const Vector& x) { return d(u, x); };
  return t;
}

ReferenceDraws simulate_reference(const ReferenceModel& model, const std::vector<Vector>& covariates,
                                  std::size_t draws, stats::RngStream& rng) {
  require(!covariates.empty(), "simulate_reference: no covariate rows");
  require(draws >= 1, "simulate_reference: need at least one draw");
  ReferenceDraws out;
  out.covariates = covariates;
  out.u.reserve(draws);
  out.y.reserve(draws);
  out.row.reserve(draws);
  // One stream per block of draws keeps results independent of threading.
  constexpr std::size_t block = 4096;
  for (std::size_t start = 0; start < draws; start += block) {
    stats::RngStream stream = rng.split(start / block);
    const std::size_t stop = std::min(draws, start + block);
    for (std::size_t s = start; s < stop; ++s) {
      const std::size_t r = s % covariates.size();
      out.u.push_back(model.draw_latent(covariates[r], stream));
      out.y.push_back(model.outcome(out.u.back(), covariates[r]));
      out.row.push_back(r);
    }
  }
  return out;
}

CovariateGroups group_covariates(const std::vector<Vector>& rows) {
  auto less = [](const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  };
  std::map<Vector, std::size_t, decltype(less)> index(less);
  CovariateGroups g;
  g.group_of.reserve(rows.size());
  for (const auto& r : rows) {
    auto [it, inserted] = index.emplace(r, g.distinct.size());
    if (inserted) {
      g.distinct.push_back(r);
      g.count.push_back(0);
    }
    g.group_of.push_back(it->second);
    ++g.count[it->second];
  }
  return g;
}

std::vector<Vector> covariates_of(const Sample& data) {
  std::vector<Vector> x;
  x.reserve(data.size());
  for (const auto& o : data) x.push_back(o.x);
  return x;
}

Sample simulate_sample(const ReferenceModel& model, const std::vector<Vector>& covariates, stats::RngStream& rng) {
  Sample out;
  out.reserve(covariates.size());
  for (const auto& x : covariates) out.push_back({model.outcome(model.draw_latent(x, rng), x), x});
  return out;
}

}  // namespace robpost
