#include "statusrank/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace statusrank {

namespace {

double number(const Json& j, const char* key) {
  if (!j.contains(key)) throw JsonFormatError(std::string("missing field '") + key + "'");
  const Json& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw JsonFormatError(std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

std::vector<double> numbers(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw JsonFormatError(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const Json& v : j.at(key)) {
    if (v.is_null()) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      throw JsonFormatError(std::string("field '") + key + "' must hold numbers");
    }
  }
  return out;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json posterior_json(const std::vector<std::string>& labels, const PosteriorSummary& p) {
  return Json{{"labels", labels}, {"mean_rank", p.mean_rank}, {"std_rank", p.std_rank}, {"samples", p.samples_used}};
}

}  // namespace

Json to_json(const ModelParams& p) {
  return Json{{"alpha", {{"amp", p.alpha.amp}, {"sigma", p.alpha.sigma}}},
              {"beta",
               {{"cos_coeffs", p.beta.cos_coeffs}, {"peak_amp", p.beta.peak_amp}, {"peak_sigma", p.beta.peak_sigma}}},
              {"n", p.n}};
}

ModelParams model_params_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("alpha") || !j.contains("beta")) {
    throw JsonFormatError("model parameters need 'alpha', 'beta' and 'n'");
  }
  ModelParams p;
  p.alpha.amp = number(j["alpha"], "amp");
  p.alpha.sigma = number(j["alpha"], "sigma");
  const std::vector<double> c = numbers(j["beta"], "cos_coeffs");
  if (c.size() != BetaParams::kTerms) {
    throw JsonFormatError("beta.cos_coeffs must have " + std::to_string(BetaParams::kTerms) + " entries");
  }
  std::copy(c.begin(), c.end(), p.beta.cos_coeffs.begin());
  p.beta.peak_amp = number(j["beta"], "peak_amp");
  p.beta.peak_sigma = number(j["beta"], "peak_sigma");
  const double n = number(j, "n");
  if (!(n >= 0 && n <= std::numeric_limits<int>::max()) || n != std::floor(n)) {
    throw JsonFormatError("'n' must be a non-negative integer");
  }
  p.n = static_cast<int>(n);
  try {
    validate(p);
  } catch (const std::invalid_argument& e) {
    throw JsonFormatError(e.what());
  }
  return p;
}

Json to_json(const ViolationReport& r) {
  return Json{{"violations", r.violations},
              {"total_directed", r.total_directed},
              {"fraction_upward", r.fraction_upward ? Json(*r.fraction_upward) : Json(nullptr)}};
}

ViolationReport violation_report_from_json(const Json& j) {
  ViolationReport r;
  r.violations = static_cast<std::size_t>(number(j, "violations"));
  r.total_directed = static_cast<std::size_t>(number(j, "total_directed"));
  if (j.contains("fraction_upward") && !j["fraction_upward"].is_null()) r.fraction_upward = number(j, "fraction_upward");
  return r;
}

Json to_json(const McmcConfig& c) {
  return Json{{"burn_in_sweeps", c.burn_in_sweeps}, {"n_samples", c.n_samples},
              {"sweep_spacing", c.sweep_spacing},   {"n_chains", c.n_chains},
              {"seed", c.seed},                     {"batches_per_chain", c.batches_per_chain},
              {"local_fraction", c.local_fraction}, {"local_window", c.local_window}};
}

Json to_json(const EmConfig& c) {
  return Json{{"max_iter", c.max_iter},
              {"tol", c.tol},
              {"final_sample_factor", c.final_sample_factor},
              {"seed", c.seed},
              {"ascent_tolerance", c.ascent_tolerance},
              {"averaging_start", c.averaging_start},
              {"averaging_decay", c.averaging_decay},
              {"mvr",
               {{"initial_temperature", c.mvr.initial_temperature},
                {"cooling", c.mvr.cooling},
                {"patience_sweeps", c.mvr.patience_sweeps},
                {"max_sweeps", c.mvr.max_sweeps},
                {"restarts", c.mvr.restarts}}}};
}

Json to_json(const FitResult& fit) {
  const int n = fit.histograms.n;
  std::vector<int> z;
  for (int k = -(n - 1); k <= n - 1 && n > 0; ++k) z.push_back(k);

  Json trace_se = Json::array();
  for (double v : fit.objective_stderr) trace_se.push_back(number_or_null(v));

  return Json{
      {"params", to_json(fit.params)},
      {"posterior", posterior_json(fit.labels, fit.posterior)},
      {"histograms", {{"z", z}, {"a", fit.histograms.a}, {"b", fit.histograms.b}}},
      {"objective_trace", fit.objective_trace},
      {"em_iterations", fit.em_iterations},
      {"converged", fit.converged},
      {"diagnostics",
       {{"initial_params", to_json(fit.initial_params)},
        {"initial_ranking", "minimum violations"},
        {"initial_mvr", to_json(fit.initial_mvr)},
        {"mvr_restarts_at_best", fit.mvr_degenerate_restarts},
        {"objective_stderr", trace_se},
        {"rank_change_trace", fit.rank_change_trace},
        {"ascent_violations", fit.ascent_violations},
        {"final_acceptance_rate", fit.final_acceptance_rate},
        {"last_iteration_posterior", posterior_json(fit.labels, fit.last_iteration_posterior)}}},
  };
}

FitResult fit_result_from_json(const Json& j) {
  try {
    FitResult fit;
    fit.params = model_params_from_json(j.at("params"));
    const Json& post = j.at("posterior");
    fit.labels = post.at("labels").get<std::vector<std::string>>();
    fit.posterior.mean_rank = numbers(post, "mean_rank");
    fit.posterior.std_rank = numbers(post, "std_rank");
    if (post.contains("samples")) fit.posterior.samples_used = post["samples"].get<std::size_t>();
    if (fit.posterior.mean_rank.size() != fit.labels.size() || fit.posterior.std_rank.size() != fit.labels.size()) {
      throw JsonFormatError("posterior arrays must match the label count");
    }
    if (static_cast<std::size_t>(fit.params.n) != fit.labels.size()) {
      throw JsonFormatError("params.n does not match the label count");
    }

    const Json& h = j.at("histograms");
    fit.histograms = RankHistograms(fit.params.n);
    const std::vector<double> a = numbers(h, "a"), b = numbers(h, "b");
    if (a.size() != fit.histograms.a.size() || b.size() != fit.histograms.b.size()) {
      throw JsonFormatError("histograms must have 2n - 1 entries");
    }
    fit.histograms.a = a;
    fit.histograms.b = b;

    fit.objective_trace = numbers(j, "objective_trace");
    fit.em_iterations = j.at("em_iterations").get<int>();
    fit.converged = j.at("converged").get<bool>();

    if (j.contains("diagnostics")) {
      const Json& d = j["diagnostics"];
      if (d.contains("initial_params")) fit.initial_params = model_params_from_json(d["initial_params"]);
      if (d.contains("initial_mvr")) fit.initial_mvr = violation_report_from_json(d["initial_mvr"]);
      if (d.contains("objective_stderr")) fit.objective_stderr = numbers(d, "objective_stderr");
      if (d.contains("rank_change_trace")) fit.rank_change_trace = numbers(d, "rank_change_trace");
      fit.mvr_degenerate_restarts = d.value("mvr_restarts_at_best", 0);
      fit.ascent_violations = d.value("ascent_violations", 0);
      fit.final_acceptance_rate = d.value("final_acceptance_rate", 0.0);
      if (d.contains("last_iteration_posterior")) {
        fit.last_iteration_posterior.mean_rank = numbers(d["last_iteration_posterior"], "mean_rank");
        fit.last_iteration_posterior.std_rank = numbers(d["last_iteration_posterior"], "std_rank");
      }
    }
    return fit;
  } catch (const Json::exception& e) {
    throw JsonFormatError(std::string("malformed fit result: ") + e.what());
  }
}

Json to_json(const FigureSeries& s) {
  Json j{{"name", s.name}, {"metadata", s.metadata}, {"x", Json::array()}, {"y", Json::array()}};
  for (double v : s.x) j["x"].push_back(number_or_null(v));
  for (double v : s.y) j["y"].push_back(number_or_null(v));
  if (!s.yerr.empty()) {
    j["yerr"] = Json::array();
    for (double v : s.yerr) j["yerr"].push_back(number_or_null(v));
  }
  return j;
}

Json to_json(const AttributeSummary& s) {
  Json groups = Json::array();
  for (const GroupSummary& g : s.groups) {
    groups.push_back({{"value", g.value},
                      {"count", g.count},
                      {"mean_rescaled_rank", number_or_null(g.mean_rescaled_rank)},
                      {"stderr_rescaled_rank", number_or_null(g.stderr_rescaled_rank)},
                      {"ks_d", g.ks_d}});
  }
  Json contrasts = Json::array();
  for (const ContrastResult& c : s.contrasts) {
    contrasts.push_back(
        {{"group_a", c.group_a}, {"group_b", c.group_b}, {"t_statistic", c.t_statistic}, {"p_value", c.p_value}});
  }
  return Json{{"column", s.column},
              {"nodes_used", s.nodes_used},
              {"groups", groups},
              {"f_statistic", s.f_statistic ? number_or_null(*s.f_statistic) : Json(nullptr)},
              {"f_p_value", s.f_p_value ? Json(*s.f_p_value) : Json(nullptr)},
              {"contrasts", contrasts}};
}

Json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw JsonFormatError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace statusrank
