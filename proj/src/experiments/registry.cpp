#include "robpost/experiments/registry.hpp"

#include <Eigen/Core>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "robpost/choice/censored.hpp"
#include "robpost/choice/choice.hpp"
#include "robpost/choice/max_score.hpp"
#include "robpost/choice/models.hpp"
#include "robpost/data/panel.hpp"
#include "robpost/error.hpp"
#include "robpost/experiments/report.hpp"
#include "robpost/finite_support/instance.hpp"
#include "robpost/finite_support/worst_case.hpp"
#include "robpost/fixed_effects/estimators.hpp"
#include "robpost/fixed_effects/neighborhood.hpp"
#include "robpost/fixed_effects/simulate.hpp"
#include "robpost/framework/models.hpp"
#include "robpost/framework/posterior.hpp"
#include "robpost/income/permanent_transitory.hpp"
#include "robpost/robustness/inference.hpp"
#include "robpost/robustness/local.hpp"
#include "robpost/stats/distributions.hpp"
#include "robpost/stats/normal.hpp"

namespace robpost::exp {

// ------------------------------------------------------------- parameters

double param_number(ParamMap& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  if (it == p.end()) {
    p[key] = format_number(fallback);
    return fallback;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("parameter '" + key + "': expected a number, got '" + it->second + "'");
  }
}

std::string param_text(ParamMap& p, const std::string& key, const std::string& fallback) {
  return p.emplace(key, fallback).first->second;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    std::stringstream inner(item);
    std::string piece;
    while (std::getline(inner, piece, ',')) {
      if (piece.empty()) continue;
      try {
        std::size_t used = 0;
        out.push_back(std::stod(piece, &used));
        if (used != piece.size()) throw std::invalid_argument(piece);
      } catch (const std::exception&) {
        throw ValidationError("expected a number, got '" + piece + "'");
      }
    }
  }
  return out;
}

namespace {

std::size_t param_count(ParamMap& p, const std::string& key, double fallback) {
  const double v = param_number(p, key, fallback);
  require(v >= 1.0 && v == std::floor(v), "parameter '" + key + "' must be a positive integer");
  return static_cast<std::size_t>(v);
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

stats::Distribution choice_error(const std::string& name) {
  if (name == "normal") return stats::Normal{0.0, 1.0};
  if (name == "chi2") return stats::Chi2Recentered{1.0};
  if (name == "uniform") return stats::Uniform{-std::sqrt(3.0), std::sqrt(3.0)};
  throw ValidationError("error distribution must be normal, chi2 or uniform (got '" + name + "')");
}

choice::ChoiceModelSpec index_spec(ParamMap& p) {
  choice::ChoiceModelSpec s;
  s.beta = Eigen::Vector2d(param_number(p, "beta0", 0.0), param_number(p, "beta1", 0.5));
  s.sigma = param_number(p, "sigma", 1.0);
  return s;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
  return out;
}

}  // namespace

// ------------------------------------------------------------------- DGPs

const std::vector<std::string>& dgp_keys() {
  static const std::vector<std::string> keys{"neighborhood",   "fixed_effects", "skew_normal",     "binary_choice",
                                             "ordered_choice", "censored",      "perm_transitory", "linear_regression"};
  return keys;
}

SimulatedData simulate_dgp(const std::string& key, ParamMap& p, std::size_t n, std::uint64_t seed) {
  require(n >= 2, "simulate: need at least two units");
  stats::RngStream rng(seed);
  SimulatedData out;
  std::ostringstream data, latent;

  if (key == "neighborhood") {
    const std::string shape = param_text(p, "shape", "lognormal");
    require(shape == "lognormal" || shape == "normal", "neighborhood: shape must be lognormal or normal");
    const double sdlog = shape == "lognormal" ? param_number(p, "sdlog", 1.0) : 0.0;
    Eigen::VectorXd truth;
    const SummaryEffects s = fe::simulate_summary(n, param_number(p, "var_mu", 0.030),
                                                  param_number(p, "mean_noise", 0.047), sdlog, rng, &truth);
    write_summary_csv(data, s);
    latent << "unit_id,mu\n";
    for (Eigen::Index i = 0; i < truth.size(); ++i) latent << s.unit_ids[i] << ',' << format_number(truth(i)) << '\n';
    out.rows = n;
  } else if (key == "fixed_effects" || key == "skew_normal") {
    const std::string shape = param_text(p, "alpha", key == "skew_normal" ? "skew_normal" : "normal");
    const int J = static_cast<int>(param_count(p, "J", 5));
    const double var_alpha = param_number(p, "var_alpha", 1.0);
    const double var_eps = param_number(p, "var_eps", 1.0);
    require(var_alpha > 0.0 && var_eps >= 0.0, "fixed_effects: variances must be positive");
    const double sd = std::sqrt(var_alpha);
    stats::Distribution alpha = stats::Normal{0.0, sd};
    if (shape == "skew_normal") {
      auto sn = stats::standardized_skew_normal(stats::skew_normal_delta_for_skewness(param_number(p, "skewness", 0.47)));
      sn.location *= sd;
      sn.scale *= sd;
      alpha = sn;
    } else if (shape == "chi2") {
      require(var_alpha == 1.0, "fixed_effects: the chi2 shape has unit variance");
      alpha = stats::Chi2Recentered{param_number(p, "df", 1.0)};
    } else {
      require(shape == "normal", "fixed_effects: alpha must be normal, skew_normal or chi2");
    }
    Eigen::VectorXd truth;
    const PanelData panel = fe::simulate_panel(n, J, alpha, var_eps, rng, &truth);
    write_panel_csv(data, panel, "j");
    latent << "unit_id,alpha\n";
    for (Eigen::Index i = 0; i < truth.size(); ++i)
      latent << panel.unit_ids[static_cast<std::size_t>(i)] << ',' << format_number(truth(i)) << '\n';
    out.rows = n * static_cast<std::size_t>(J);
  } else if (key == "binary_choice" || key == "censored" || key == "ordered_choice") {
    choice::ChoiceModelSpec spec = index_spec(p);
    const auto error = choice_error(param_text(p, "error", key == "ordered_choice" ? "chi2" : "normal"));
    if (key == "ordered_choice") {
      const std::size_t J = param_count(p, "categories", 10);
      const auto it = p.find("thresholds");
      spec.thresholds = it != p.end() ? parse_number_list(it->second) : choice::draw_thresholds(J, rng);
      require(spec.thresholds.size() + 1 == J, "ordered_choice: need categories - 1 thresholds");
      p["thresholds"] = join(spec.thresholds);
    }
    spec.validate();
    const choice::ChoiceData d = key == "censored" ? choice::simulate_censored(spec, error, n, rng)
                                                   : choice::simulate_choice(spec, error, n, rng);
    choice::write_choice_csv(data, d);
    out.rows = n;
  } else if (key == "perm_transitory") {
    income::PtSimulationConfig cfg;
    const int T = static_cast<int>(param_count(p, "periods", 6));
    cfg.params = income::PtParams::stationary(T, param_number(p, "var_eta1", 0.30), param_number(p, "var_v", 0.04),
                                              param_number(p, "var_eps", 0.10));
    const std::string shape = param_text(p, "shape", "gaussian");
    require(shape == "gaussian" || shape == "scale_mixture", "perm_transitory: shape must be gaussian or scale_mixture");
    cfg.scale_mixture = shape == "scale_mixture";
    cfg.mixture_prob = param_number(p, "mixture_prob", 0.1);
    cfg.mixture_ratio = param_number(p, "mixture_ratio", 10.0);
    cfg.validate();
    write_panel_csv(data, income::simulate_pt(cfg, n, rng), "t");
    out.rows = n * static_cast<std::size_t>(T);
  } else if (key == "linear_regression") {
    const choice::ChoiceModelSpec spec = index_spec(p);
    choice::ChoiceData d;
    d.x.resize(static_cast<Eigen::Index>(n), 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = rng.normal();
      d.x(static_cast<Eigen::Index>(i), 0) = x;
      d.y.push_back(spec.beta(0) + spec.beta(1) * x + spec.sigma * rng.normal());
    }
    choice::write_choice_csv(data, d);
    out.rows = n;
  } else {
    throw ValidationError("unknown DGP '" + key + "'");
  }
  out.csv = data.str();
  out.latent_csv = latent.str();
  return out;
}

// ------------------------------------------------------------- estimation

const std::vector<std::string>& model_keys() {
  static const std::vector<std::string> keys{"fixed_effects",  "censored",        "binary_choice",
                                             "ordered_choice", "perm_transitory", "linear_regression"};
  return keys;
}

namespace {

// Splits "name:arg1:arg2" into its parts.
std::vector<std::string> split_target(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ':')) parts.push_back(piece);
  if (parts.empty()) throw ValidationError("empty target");
  return parts;
}

double number_arg(const std::string& s, const std::string& target) {
  const auto v = parse_number_list(s);
  if (v.size() != 1) throw ValidationError("target '" + target + "': expected one number, got '" + s + "'");
  return v[0];
}

Eigen::VectorXd asf_point(const std::vector<std::string>& parts, const std::string& target, Eigen::Index d) {
  if (parts.size() != 2) throw ValidationError("target '" + target + "': expected asf:<x>");
  const auto v = parse_number_list(parts[1]);
  if (static_cast<Eigen::Index>(v.size()) != d)
    throw ValidationError("target '" + target + "': covariate point needs " + std::to_string(d) + " entries");
  Eigen::VectorXd x(d);
  for (Eigen::Index k = 0; k < d; ++k) x(k) = v[static_cast<std::size_t>(k)];
  return x;
}

choice::MaxScoreOptions score_options(ParamMap& p) {
  choice::MaxScoreOptions o;
  o.resolution = static_cast<int>(param_count(p, "grid_resolution", 401));
  const std::string norm = param_text(p, "normalization", "unit_norm");
  if (norm == "first_slope")
    o.normalization = choice::Normalization::first_slope;
  else
    require(norm == "unit_norm", "normalization must be unit_norm or first_slope");
  return o;
}

void record_index(PreparedModel& out, const choice::ChoiceModelSpec& s) {
  out.parameters["beta0"] = s.beta(0);
  for (Eigen::Index k = 1; k < s.beta.size(); ++k) out.parameters["beta" + std::to_string(k)] = s.beta(k);
  out.parameters["sigma"] = s.sigma;
}

const LinearRegressionModel& as_linear(const ReferenceModel& m) {
  const auto* lr = dynamic_cast<const LinearRegressionModel*>(&m);
  if (!lr) throw ValidationError("regression-error target used with the '" + m.key() + "' model");
  return *lr;
}

}  // namespace

PreparedModel prepare_model(const std::string& key, const std::string& data_path, const std::string& target,
                            ParamMap& p) {
  require(!data_path.empty(), "estimate: --data is required");
  const auto parts = split_target(target);
  PreparedModel out;
  auto in = open(data_path);

  if (key == "fixed_effects") {
    const PanelData panel = read_panel_csv(in, param_text(p, "index_column", "j"));
    fe::FeParams fp;
    if (panel.periods() >= 2) {
      fp = fe::estimate_params(panel);
    } else {
      if (!p.count("var_eps"))
        throw IdentificationError("fixed_effects: one measurement per unit; supply --param var_eps=<value>");
      fp = fe::estimate_params(panel, param_number(p, "var_eps", 0.0));
    }
    if (fp.truncated) out.notes.push_back("variance of alpha truncated at zero");
    out.model = std::make_shared<FixedEffectsModel>(fp, panel.periods() < 2);
    out.data = fe_observations(panel);
    out.parameters = {{"mu_alpha", fp.mu_alpha}, {"var_alpha", fp.var_alpha}, {"var_eps", fp.var_eps},
                      {"J", fp.J}, {"shrinkage", fp.shrinkage()}};
    const Eigen::VectorXd ybar = panel.unit_means();
    if (parts[0] == "cdf" && parts.size() == 2) {
      const double a = number_arg(parts[1], target);
      out.target = fe_indicator_target(a);
      out.fe_estimate = fe::cdf_fe(ybar, a);
      out.pm_estimate = fe::cdf_pm(ybar, fp, a);
    } else if (parts[0] == "mean" && parts.size() == 1) {
      out.target = fe_level_target();
      out.fe_estimate = ybar.mean();
      out.pm_estimate = fe::empirical_bayes_means(ybar, fp).mean();
    } else {
      throw ValidationError("fixed_effects: target must be cdf:<a> or mean (got '" + target + "')");
    }
  } else if (key == "linear_regression") {
    const choice::ChoiceData d = choice::read_choice_csv(in);
    for (std::size_t i = 0; i < d.size(); ++i) {
      Vector x(d.x.cols() + 1);
      x << 1.0, d.x.row(static_cast<Eigen::Index>(i)).transpose();
      out.data.push_back({Vector::Constant(1, d.y[i]), x});
    }
    const LinearRegressionModel fit = fit_linear_regression(out.data);
    out.model = std::make_shared<LinearRegressionModel>(fit);
    for (Eigen::Index k = 0; k < fit.beta().size(); ++k) out.parameters["beta" + std::to_string(k)] = fit.beta()(k);
    out.parameters["sigma2"] = fit.sigma2();
    Target t;
    if (parts[0] == "error_cdf" && parts.size() == 2) {
      const double a = number_arg(parts[1], target);
      t.name = "error_cdf(" + format_number(a) + ")";
      t.delta = [a](const ReferenceModel&, const Vector& u, const Vector&) { return u(0) <= a ? 1.0 : 0.0; };
      t.posterior_mean = [a](const ReferenceModel& m, const Vector& y, const Vector& x) {
        return y(0) - x.dot(as_linear(m).beta()) <= a ? 1.0 : 0.0;
      };
      t.model_mean = [a](const ReferenceModel& m, const Vector&) {
        return stats::normal_cdf(a / std::sqrt(as_linear(m).sigma2()));
      };
    } else if (parts[0] == "mean_error" && parts.size() == 1) {
      t.name = "mean_error";
      t.delta = [](const ReferenceModel&, const Vector& u, const Vector&) { return u(0); };
      t.posterior_mean = [](const ReferenceModel& m, const Vector& y, const Vector& x) {
        return y(0) - x.dot(as_linear(m).beta());
      };
      t.model_mean = [](const ReferenceModel&, const Vector&) { return 0.0; };
    } else {
      throw ValidationError("linear_regression: target must be error_cdf:<a> or mean_error (got '" + target + "')");
    }
    out.target = std::move(t);
  } else if (key == "binary_choice" || key == "ordered_choice" || key == "censored") {
    const choice::ChoiceData d = choice::read_choice_csv(in);
    out.data = choice::to_sample(d);
    choice::ChoiceModelSpec spec;
    if (key == "binary_choice") {
      spec.beta = choice::max_score(d.y, d.x, score_options(p));
      spec.sigma = choice::fit_probit_sigma(spec, d);
      out.model = std::make_shared<choice::BinaryChoiceModel>(spec);
      out.notes.push_back("index coefficients and scale treated as known in the variance calculations");
      if (parts[0] != "asf") throw ValidationError("binary_choice: target must be asf:<x> (got '" + target + "')");
      out.target = choice::binary_asf_target(asf_point(parts, target, d.x.cols()));
    } else if (key == "ordered_choice") {
      if (!p.count("thresholds")) throw ValidationError("ordered_choice: supply --param thresholds=<mu_1,...>");
      const auto thresholds = parse_number_list(p["thresholds"]);
      require(d.x.cols() == 1, "ordered_choice: exactly one regressor (column x1) is supported");
      const auto fit = choice::ordered_max_score(d.y, d.x, thresholds, score_options(p));
      for (const auto& w : fit.warnings) out.notes.push_back(w);
      spec.beta = fit.beta;
      spec.thresholds = thresholds;
      spec.sigma = choice::fit_ordered_sigma(spec, d);
      out.model = std::make_shared<choice::OrderedChoiceModel>(spec);
      out.notes.push_back("index coefficients and scale treated as known in the variance calculations");
      if (parts[0] != "asf") throw ValidationError("ordered_choice: target must be asf:<x> (got '" + target + "')");
      out.target = choice::ordered_asf_target(asf_point(parts, target, 1));
    } else {
      const auto fit = choice::fit_tobit(d);
      spec = fit.spec;
      out.model = std::make_shared<choice::CensoredModel>(spec, fit.information);
      if (parts[0] != "mean" || parts.size() != 1)
        throw ValidationError("censored: target must be mean (got '" + target + "')");
      out.target = choice::censored_outcome_target([](double v) { return v; }, "latent_mean");
    }
    record_index(out, spec);
  } else if (key == "perm_transitory") {
    const PanelData panel = read_panel_csv(in, param_text(p, "index_column", "t"));
    const auto fit = income::estimate_pt(panel);
    for (const auto& w : fit.warnings) out.notes.push_back(w);
    for (const auto& t : fit.truncated) out.notes.push_back(t + " truncated at zero");
    out.model = std::make_shared<income::PermanentTransitoryModel>(fit.params);
    out.notes.push_back("variance components treated as known in the variance calculations");
    for (Eigen::Index i = 0; i < panel.units(); ++i) out.data.push_back({panel.y.row(i).transpose(), Vector(0)});
    out.parameters["var_eta1"] = fit.params.var_eta1;
    for (Eigen::Index t = 0; t < fit.params.var_v.size(); ++t)
      out.parameters["var_v" + std::to_string(t + 2)] = fit.params.var_v(t);
    for (Eigen::Index t = 0; t < fit.params.var_eps.size(); ++t)
      out.parameters["var_eps" + std::to_string(t + 1)] = fit.params.var_eps(t);
    if (parts[0] != "cdf" || parts.size() != 4)
      throw ValidationError("perm_transitory: target must be cdf:<eta|eps>:<t>:<a> (got '" + target + "')");
    const int t = static_cast<int>(number_arg(parts[2], target));
    require(t >= 1 && t <= panel.periods(), "perm_transitory: period out of range");
    out.target = income::component_indicator_target(income::parse_component(parts[1]), t - 1, number_arg(parts[3], target));
  } else {
    throw ValidationError("unknown model '" + key + "'");
  }
  require(!out.data.empty(), "estimate: no observations");
  return out;
}

// ------------------------------------------------------------------ reports

namespace {

nlohmann::ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

OutcomeMap model_gamma(const ReferenceModel& model, const Target& target) {
  const auto m = model_mean_map(model, target);
  return [m](const Vector&, const Vector& x) {
    const auto v = m(x);
    if (!v) throw NumericalError("model-based map unavailable for this target");
    return *v;
  };
}

}  // namespace

EstimateReport run_estimate(EstimateRequest& r) {
  r.divergence.validate();
  for (double e : r.epsilons) require(e >= 0.0, "epsilon values must be nonnegative");
  const PreparedModel pm = prepare_model(r.model, r.data_path, r.target, r.params);
  EstimateReport rep;
  rep.model = r.model;
  rep.target = r.target;
  rep.n = pm.data.size();
  rep.parameters = pm.parameters;
  rep.fe_estimate = pm.fe_estimate;
  rep.pm_estimate = pm.pm_estimate;
  rep.warnings = pm.notes;

  const auto law = PosteriorLaw::closed_form(pm.model, pm.target);
  const Estimate post = posterior_average_estimate(law, pm.data);
  const Estimate mod = model_based_estimate_exact(*pm.model, pm.target, pm.data);
  rep.posterior = post.value;
  rep.model_based = mod.value;
  for (const auto* e : {&post, &mod}) rep.warnings.insert(rep.warnings.end(), e->warnings.begin(), e->warnings.end());

  stats::RngStream rng(r.seed);
  const ReferenceSimulation sim(*pm.model, covariates_of(pm.data), r.draws, rng);
  const AsymptoticVariance av = asymptotic_variance(*pm.model, pm.data, pm.target, sim);
  rep.sigma_mm = av.sigma(0, 0);
  rep.sigma_mp = av.sigma(0, 1);
  rep.sigma_pp = av.sigma(1, 1);
  rep.warnings.insert(rep.warnings.end(), av.warnings.begin(), av.warnings.end());

  const Informativeness info = informativeness(sim, *pm.model, pm.target, law);
  rep.r2 = info.r2;
  rep.r2_se = info.r2_se;
  rep.bias_ratio = info.ratio;

  const BiasReport bp = local_bias(sim, *pm.model, posterior_mean_map(*pm.model, pm.target), pm.target, r.divergence, r.epsilons);
  const BiasReport bm = local_bias(sim, *pm.model, model_gamma(*pm.model, pm.target), pm.target, r.divergence, r.epsilons);
  rep.slope_posterior = bp.slope;
  rep.slope_model = bm.slope;

  try {
    const SpecificationTest st = specification_test(*pm.model, pm.data, pm.target, sim);
    rep.spec_statistic = st.statistic;
    rep.spec_p_value = st.p_value;
  } catch (const NumericalError& e) {
    rep.spec_statistic = rep.spec_p_value = std::numeric_limits<double>::quiet_NaN();
    rep.warnings.push_back(std::string("specification test unavailable: ") + e.what());
  }

  for (double e : r.epsilons) {
    const Interval ci = bias_aware_ci(rep.posterior, rep.slope_posterior, rep.sigma_pp, rep.n, e);
    rep.intervals.push_back({e, ci.lower, ci.upper, ci.half_width});
  }
  return rep;
}

std::string EstimateReport::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["target"] = target;
  j["n"] = n;
  j["parameters"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : parameters) j["parameters"][k] = num(v);
  j["estimates"] = {{"model_based", num(model_based)}, {"posterior", num(posterior)}};
  if (fe_estimate) j["estimates"]["fixed_effects"] = num(*fe_estimate);
  if (pm_estimate) j["estimates"]["posterior_means"] = num(*pm_estimate);
  j["sigma"] = {{"model_model", num(sigma_mm)}, {"model_posterior", num(sigma_mp)}, {"posterior_posterior", num(sigma_pp)}};
  j["r2"] = num(r2);
  j["r2_se"] = num(r2_se);
  j["bias_ratio"] = num(bias_ratio);
  j["bias_slope"] = {{"posterior", num(slope_posterior)}, {"model_based", num(slope_model)}};
  j["specification_test"] = {{"statistic", num(spec_statistic)}, {"p_value", num(spec_p_value)}};
  j["intervals"] = nlohmann::ordered_json::array();
  for (const auto& ci : intervals)
    j["intervals"].push_back({{"epsilon", num(ci.epsilon)},
                              {"lower", num(ci.lower)},
                              {"upper", num(ci.upper)},
                              {"half_width", num(ci.half_width)}});
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

std::string EstimateReport::to_csv() const {
  std::ostringstream out;
  out << "quantity,epsilon,value\n";
  auto row = [&](const std::string& q, double v) { out << q << ",," << format_number(v) << '\n'; };
  row("n", static_cast<double>(n));
  for (const auto& [k, v] : parameters) row("param_" + k, v);
  row("model_based", model_based);
  row("posterior", posterior);
  if (fe_estimate) row("fixed_effects", *fe_estimate);
  if (pm_estimate) row("posterior_means", *pm_estimate);
  row("sigma_model_model", sigma_mm);
  row("sigma_model_posterior", sigma_mp);
  row("sigma_posterior_posterior", sigma_pp);
  row("r2", r2);
  row("r2_se", r2_se);
  row("bias_ratio", bias_ratio);
  row("bias_slope_posterior", slope_posterior);
  row("bias_slope_model_based", slope_model);
  row("spec_test_statistic", spec_statistic);
  row("spec_test_p_value", spec_p_value);
  for (const auto& ci : intervals) {
    const std::string e = format_number(ci.epsilon);
    out << "ci_lower," << e << ',' << format_number(ci.lower) << '\n';
    out << "ci_upper," << e << ',' << format_number(ci.upper) << '\n';
  }
  return out.str();
}

std::string run_bias(EstimateRequest& r, bool json) {
  r.divergence.validate();
  for (double e : r.epsilons) require(e >= 0.0, "epsilon values must be nonnegative");
  const PreparedModel pm = prepare_model(r.model, r.data_path, r.target, r.params);
  stats::RngStream rng(r.seed);
  const ReferenceSimulation sim(*pm.model, covariates_of(pm.data), r.draws, rng);
  const BiasReport bp = local_bias(sim, *pm.model, posterior_mean_map(*pm.model, pm.target), pm.target, r.divergence, r.epsilons);
  const BiasReport bm = local_bias(sim, *pm.model, model_gamma(*pm.model, pm.target), pm.target, r.divergence, r.epsilons);
  if (json) {
    nlohmann::ordered_json j;
    j["model"] = r.model;
    j["target"] = r.target;
    j["divergence"] = r.divergence.name();
    j["posterior"] = nlohmann::json::parse(bias_report_json(bp));
    j["model_based"] = nlohmann::json::parse(bias_report_json(bm));
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "estimator,epsilon,leading,slope,envelope\n";
  for (const auto& [name, b] : {std::pair<std::string, const BiasReport*>{"posterior", &bp}, {"model_based", &bm}})
    for (std::size_t k = 0; k < b->epsilon.size(); ++k)
      out << name << ',' << format_number(b->epsilon[k]) << ',' << format_number(b->leading) << ','
          << format_number(b->slope) << ',' << format_number(b->envelope[k]) << '\n';
  return out.str();
}

std::string run_oracle(const std::string& instance_path, const std::vector<double>& epsilons, const DivergenceSpec& div,
                       std::uint64_t seed, bool json) {
  div.validate();
  fs::DiscreteInstance inst;
  if (instance_path.empty()) {
    stats::RngStream rng(seed);
    inst = fs::random_instance(rng);
  } else {
    auto in = open(instance_path);
    std::stringstream buf;
    buf << in.rdbuf();
    inst = fs::DiscreteInstance::from_json(buf.str());
  }
  const Eigen::VectorXd post = fs::posterior_reduce(inst).class_means;
  const double ref_mean = inst.ref_weights.dot(inst.delta);
  const Eigen::VectorXd model = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(inst.classes()), ref_mean);

  nlohmann::ordered_json j;
  j["instance"] = nlohmann::json::parse(inst.to_json());
  j["divergence"] = div.name();
  j["posterior_estimate"] = fs::posterior_reduce(inst).estimate;
  j["dirichlet_estimate_1e-8"] = fs::dirichlet_posterior_mean(inst, 1e-8);
  j["local_slope_posterior"] = fs::local_slope(inst, post, div);
  j["rows"] = nlohmann::ordered_json::array();
  std::ostringstream csv;
  csv << "epsilon,bias_posterior_dual,bias_posterior_primal,bias_model,bias_ratio_to_infimum,mse_ratio_to_infimum\n";
  for (double e : epsilons) {
    require(e >= 0.0, "epsilon values must be nonnegative");
    const double dual = fs::worst_case_bias(inst, post, div, e, fs::Solver::dual_tilting).bias;
    const double primal = fs::worst_case_bias(inst, post, div, e, fs::Solver::primal_barrier).bias;
    const double bm = fs::worst_case_bias(inst, model, div, e).bias;
    const double r2 = fs::verify_theorem2(inst, div, e, seed).ratio;
    const double r3 = fs::verify_theorem3(inst, div, e, seed).ratio;
    j["rows"].push_back({{"epsilon", e},
                         {"bias_posterior_dual", dual},
                         {"bias_posterior_primal", primal},
                         {"bias_model", bm},
                         {"bias_ratio_to_infimum", r2},
                         {"mse_ratio_to_infimum", r3}});
    csv << format_number(e) << ',' << format_number(dual) << ',' << format_number(primal) << ',' << format_number(bm)
        << ',' << format_number(r2) << ',' << format_number(r3) << '\n';
  }
  return json ? j.dump(2) + "\n" : csv.str();
}

}  // namespace robpost::exp
