#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "statusrank/mvr.hpp"
#include "statusrank/network.hpp"
#include "statusrank/rank_model.hpp"

namespace statusrank {

/// Expected edge counts per node pair at each rank difference z in
/// [-(n-1), n-1]. a counts reciprocated pairs (both orientations), b counts
/// one-way claims u -> v at z = rank(v) - rank(u).
///
/// Invariants: a(z) == a(-z); sum_z (n-|z|) a(z) == 2|S|; sum_z (n-|z|) b(z) == |T|.
struct RankHistograms {
  int n = 0;
  std::vector<double> a;
  std::vector<double> b;

  RankHistograms() = default;
  explicit RankHistograms(int n_nodes)
      : n(n_nodes), a(2 * static_cast<std::size_t>(n_nodes) - 1, 0.0), b(a.size(), 0.0) {}

  std::size_t offset(int z) const { return static_cast<std::size_t>(z + n - 1); }
  double a_at(int z) const { return a[offset(z)]; }
  double b_at(int z) const { return b[offset(z)]; }
};

/// Histograms of a single ranking (the posterior concentrated on it).
RankHistograms histograms_from_ranking(const DirectedNetwork& net, std::span<const int> ranks);

struct PosteriorSummary {
  std::vector<double> mean_rank;
  std::vector<double> std_rank;
  std::size_t samples_used = 0;
};

struct McmcConfig {
  int burn_in_sweeps = 200;  // one sweep = n swap proposals
  int n_samples = 200;       // retained per chain
  int sweep_spacing = 5;
  int n_chains = 4;
  std::uint64_t seed = 1;
  int batches_per_chain = 5;  // for Monte Carlo error estimates
  /// Share of proposals that swap a node with one at most `local_window` ranks
  /// away; the rest swap two uniformly chosen nodes. Both moves are symmetric.
  double local_fraction = 0.5;
  /// 0 picks max(1, round(mean degree)).
  int local_window = 0;
};

void validate(const McmcConfig& cfg);

struct EStepResult {
  RankHistograms histograms;
  PosteriorSummary posterior;
  /// Per-batch histograms; empty for the exact E-step.
  std::vector<RankHistograms> batches;
  double acceptance_rate = 1.0;
  /// Last state of each chain (ranks per node); empty for the exact E-step.
  std::vector<std::vector<int>> final_states;
};

/// Complete-data log-likelihood of the Poisson model with factorials dropped:
/// sum_{i>j} [S_ij ln alpha - alpha] + sum_{i!=j} [T_ij ln beta - beta].
double log_likelihood(const DirectedNetwork& net, const RankAssignment& ranking, const ModelParams& params);

/// Edge terms only. The non-edge terms are the same for every permutation.
double edge_log_likelihood(const DirectedNetwork& net, std::span<const int> ranks, const RateTables& rates);

/// Change in log-likelihood when nodes u and v exchange ranks, from the edges
/// incident to u and v only.
double swap_log_ratio(const DirectedNetwork& net, std::span<const int> ranks, const RateTables& rates, NodeIndex u,
                      NodeIndex v);

/// Posterior by enumerating all n! rankings. Refuses n > 8.
EStepResult exact_estep(const DirectedNetwork& net, const ModelParams& params);

using SampleObserver = std::function<void(std::span<const int> ranks)>;

/// Metropolis sampling over rankings with rank-swap proposals. Chains
/// start from `initial_states` when given (cycled over chains), otherwise from
/// random permutations. The observer, if set, sees every retained sample in
/// chain order.
EStepResult mcmc_estep(const DirectedNetwork& net, const ModelParams& params, const McmcConfig& cfg,
                       std::span<const std::vector<int>> initial_states = {}, const SampleObserver& observer = {});

/// Parameters in fixed order: alpha amp, alpha sigma, c0..c4, beta peak amp, beta peak sigma.
inline constexpr std::size_t kParamCount = 9;
using ParamVector = std::array<double, kParamCount>;
ParamVector to_vector(const ModelParams& p);
ModelParams from_vector(const ParamVector& v, int n);

/// sum_{z=1}^{n-1} (n-z) [a(z) ln alpha(z) - alpha(z) + b(z) ln beta(z) - beta(z)
///                        + b(-z) ln beta(-z) - beta(-z)]
double expected_log_likelihood(const RankHistograms& h, const ModelParams& params);
/// Analytic gradient with respect to the ParamVector ordering.
ParamVector expected_log_likelihood_gradient(const RankHistograms& h, const ModelParams& params);

/// The M-step works in unconstrained coordinates: log of amplitudes and widths,
/// raw cosine coefficients. Same ordering as ParamVector.
ParamVector to_optimizer_coords(const ModelParams& p);
ModelParams from_optimizer_coords(const ParamVector& x, int n);
/// Objective and its gradient in optimizer coordinates.
double optimizer_objective(const RankHistograms& h, const ParamVector& x, ParamVector* grad);

struct MStepResult {
  ModelParams params;
  double objective_before = 0.0;
  double objective_after = 0.0;
  /// False when no optimizer run met its gradient tolerance.
  bool optimizer_converged = true;
};

/// Maximizes expected_log_likelihood over the alpha and beta blocks
/// separately, with random restarts on the beta block. Never returns a lower
/// objective than `init`. Cosine signs are canonicalized to c0 >= 0.
MStepResult mstep(const RankHistograms& h, const ModelParams& init, std::uint64_t seed = 0, int beta_restarts = 3);

/// Starting point for EM: alpha width = mean degree, amplitude matched to |S|;
/// flat beta matched to |T| with no central peak.
ModelParams initial_params(const DirectedNetwork& net);

struct EmConfig {
  int max_iter = 100;
  /// Converged when the mean absolute change of posterior mean ranks is below tol * n.
  double tol = 0.001;
  int final_sample_factor = 5;
  std::uint64_t seed = 1;
  AnnealSchedule mvr;
  /// Allowed drop in the objective trace, in standard errors of the difference.
  double ascent_tolerance = 2.0;
  /// After this many iterations the E-step statistics (histograms, batch
  /// histograms, rank moments) are running averages with weight
  /// (it - averaging_start + 1)^-averaging_decay on the newest sample. 0 disables.
  int averaging_start = 30;
  double averaging_decay = 1.0;  // in (0.5, 1]
};

struct FitResult {
  std::vector<std::string> labels;  // order of all per-node arrays
  ModelParams params;
  ModelParams initial_params;
  PosteriorSummary posterior;        // dedicated run at the final parameters
  PosteriorSummary last_iteration_posterior;
  RankHistograms histograms;         // from the dedicated run
  std::vector<double> objective_trace;
  std::vector<double> objective_stderr;
  std::vector<double> rank_change_trace;
  ViolationReport initial_mvr;
  int mvr_degenerate_restarts = 0;
  int em_iterations = 0;
  bool converged = false;
  /// Trace steps that fell by more than ascent_tolerance standard errors.
  int ascent_violations = 0;
  double final_acceptance_rate = 0.0;
};

/// Monte Carlo standard error of expected_log_likelihood from batch histograms.
double objective_stderr(const std::vector<RankHistograms>& batches, const ModelParams& params);

/// Alternates mcmc_estep and mstep from an MVR start. Nodes are processed in
/// label order, so results do not depend on input node order. Requires n >= 3.
FitResult run_em(const DirectedNetwork& net, const EmConfig& em_cfg = {}, const McmcConfig& mcmc_cfg = {});

}  // namespace statusrank
