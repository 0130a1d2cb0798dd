#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "statusrank/em.hpp"
#include "statusrank/random.hpp"

namespace statusrank {

ModelParams initial_params(const DirectedNetwork& net) {
  const int n = static_cast<int>(net.size());
  if (n < 2) throw std::invalid_argument("initial_params needs n >= 2");
  const double width = std::max(1.0, degree_summary(net).mean_degree);

  ModelParams p;
  p.n = n;
  p.alpha.sigma = width;
  double mass = 0.0;
  for (int z = 1; z < n; ++z) mass += (n - z) * std::exp(-0.5 * (z / width) * (z / width));
  p.alpha.amp = static_cast<double>(net.mutual().size()) / mass;

  const double level = static_cast<double>(net.oneway().size()) / (static_cast<double>(n) * (n - 1));
  p.beta.cos_coeffs = {std::sqrt(level), 0.0, 0.0, 0.0, 0.0};
  p.beta.peak_amp = 0.0;
  p.beta.peak_sigma = width;
  return p;
}

double objective_stderr(const std::vector<RankHistograms>& batches, const ModelParams& params) {
  if (batches.size() < 2) return 0.0;
  std::vector<double> values;
  values.reserve(batches.size());
  for (const RankHistograms& h : batches) values.push_back(expected_log_likelihood(h, params));
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double k = static_cast<double>(values.size());
  return std::sqrt(ss / (k - 1.0) / k);
}

namespace {

void blend(std::vector<double>& into, const std::vector<double>& from, double weight) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += weight * (from[i] - into[i]);
}

void blend(RankHistograms& into, const RankHistograms& from, double weight) {
  blend(into.a, from.a, weight);
  blend(into.b, from.b, weight);
}

}  // namespace

FitResult run_em(const DirectedNetwork& input, const EmConfig& em_cfg, const McmcConfig& mcmc_cfg) {
  validate(mcmc_cfg);
  if (em_cfg.max_iter <= 0 || !(em_cfg.tol > 0.0) || em_cfg.final_sample_factor <= 0 || em_cfg.averaging_start < 0 ||
      !(em_cfg.averaging_decay > 0.5 && em_cfg.averaging_decay <= 1.0)) {
    throw std::invalid_argument("EM config: max_iter, tol and final_sample_factor must be positive, averaging_start >= 0, averaging_decay in (0.5, 1]");
  }
  const DirectedNetwork net = input.canonical();
  const std::size_t n = net.size();
  if (n < 3) throw std::invalid_argument("EM needs a network with at least 3 nodes");

  FitResult fit;
  fit.labels = net.labels();

  const MvrResult mvr = minimum_violations_ranking(net, derive_seed(em_cfg.seed, "em-mvr"), em_cfg.mvr);
  fit.initial_mvr = mvr.report;
  fit.mvr_degenerate_restarts = mvr.restarts_at_best;

  ModelParams params = initial_params(net);
  fit.initial_params = params;
  std::vector<std::vector<int>> states(1, std::vector<int>(mvr.ranking.values().begin(), mvr.ranking.values().end()));

  ModelParams best_params = params;
  double best_objective = -std::numeric_limits<double>::infinity();
  std::vector<double> previous_mean;
  RankHistograms stats;
  std::vector<RankHistograms> batches;
  std::vector<double> mean_rank, second_moment;
  const double threshold = em_cfg.tol * static_cast<double>(n);

  for (int it = 1; it <= em_cfg.max_iter; ++it) {
    McmcConfig step_cfg = mcmc_cfg;
    step_cfg.seed = derive_seed(mcmc_cfg.seed, "em-estep", static_cast<std::uint64_t>(it));
    EStepResult e = mcmc_estep(net, params, step_cfg, states);
    states = std::move(e.final_states);

    const bool averaging = em_cfg.averaging_start > 0 && it > em_cfg.averaging_start;
    const double weight = averaging ? std::pow(static_cast<double>(it - em_cfg.averaging_start + 1), -em_cfg.averaging_decay) : 1.0;
    std::vector<double> second(n);
    for (std::size_t v = 0; v < n; ++v) {
      second[v] = e.posterior.std_rank[v] * e.posterior.std_rank[v] + e.posterior.mean_rank[v] * e.posterior.mean_rank[v];
    }
    if (!averaging) {
      stats = std::move(e.histograms);
      batches = std::move(e.batches);
      mean_rank = e.posterior.mean_rank;
      second_moment = std::move(second);
    } else {
      blend(stats, e.histograms, weight);
      for (std::size_t b = 0; b < batches.size(); ++b) blend(batches[b], e.batches[b], weight);
      blend(mean_rank, e.posterior.mean_rank, weight);
      blend(second_moment, second, weight);
    }

    const MStepResult m = mstep(stats, params, derive_seed(em_cfg.seed, "em-mstep", static_cast<std::uint64_t>(it)));
    params = m.params;
    fit.objective_trace.push_back(m.objective_after);
    fit.objective_stderr.push_back(objective_stderr(batches, params));
    fit.em_iterations = it;
    fit.last_iteration_posterior.mean_rank = mean_rank;
    fit.last_iteration_posterior.std_rank.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      fit.last_iteration_posterior.std_rank[v] = std::sqrt(std::max(0.0, second_moment[v] - mean_rank[v] * mean_rank[v]));
    }
    fit.last_iteration_posterior.samples_used = e.posterior.samples_used;
    if (m.objective_after > best_objective) {
      best_objective = m.objective_after;
      best_params = params;
    }

    if (!previous_mean.empty()) {
      double change = 0.0;
      for (std::size_t v = 0; v < n; ++v) change += std::abs(mean_rank[v] - previous_mean[v]);
      change /= static_cast<double>(n);
      fit.rank_change_trace.push_back(change);
      if (change < threshold) {
        fit.converged = true;
        break;
      }
    }
    previous_mean = mean_rank;
  }

  for (std::size_t t = 1; t < fit.objective_trace.size(); ++t) {
    const double se = std::hypot(fit.objective_stderr[t - 1], fit.objective_stderr[t]);
    if (fit.objective_trace[t] < fit.objective_trace[t - 1] - em_cfg.ascent_tolerance * se) ++fit.ascent_violations;
  }

  fit.params = fit.converged ? params : best_params;
  McmcConfig final_cfg = mcmc_cfg;
  final_cfg.n_samples = mcmc_cfg.n_samples * em_cfg.final_sample_factor;
  final_cfg.seed = derive_seed(mcmc_cfg.seed, "em-final");
  EStepResult final_run = mcmc_estep(net, fit.params, final_cfg, states);
  fit.posterior = std::move(final_run.posterior);
  fit.histograms = std::move(final_run.histograms);
  fit.final_acceptance_rate = final_run.acceptance_rate;
  return fit;
}

}  // namespace statusrank
