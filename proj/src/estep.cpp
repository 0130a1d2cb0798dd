#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

#include "internal.hpp"
#include "statusrank/em.hpp"
#include "statusrank/random.hpp"

namespace statusrank {

void validate(const McmcConfig& cfg) {
  if (cfg.burn_in_sweeps < 0 || cfg.n_samples <= 0 || cfg.sweep_spacing <= 0 || cfg.n_chains <= 0 ||
      cfg.batches_per_chain <= 0) {
    throw std::invalid_argument("MCMC config: samples, spacing, chains and batches must be positive");
  }
  if (!(cfg.local_fraction >= 0.0 && cfg.local_fraction <= 1.0) || cfg.local_window < 0) {
    throw std::invalid_argument("MCMC config: local_fraction must be in [0, 1] and local_window >= 0");
  }
}

namespace {

inline std::size_t at(NodeIndex v) { return static_cast<std::size_t>(v); }

void add_counts(const DirectedNetwork& net, std::span<const int> r, std::vector<double>& ca, std::vector<double>& cb,
                double weight, int n) {
  const auto off = [n](int z) { return static_cast<std::size_t>(z + n - 1); };
  for (const MutualPair& p : net.mutual()) {
    const int z = r[at(p.lo)] - r[at(p.hi)];
    ca[off(z)] += weight;
    ca[off(-z)] += weight;
  }
  for (const Claim& c : net.oneway()) cb[off(r[at(c.to)] - r[at(c.from)])] += weight;
}

RankHistograms normalize(std::vector<double> ca, std::vector<double> cb, double total_weight, int n) {
  RankHistograms h(n);
  for (int z = -(n - 1); z <= n - 1; ++z) {
    const double denom = total_weight * (n - std::abs(z));
    h.a[h.offset(z)] = ca[h.offset(z)] / denom;
    h.b[h.offset(z)] = cb[h.offset(z)] / denom;
  }
  // Rounding can break a(z) == a(-z) in the last bit; both sides hold the same counts.
  for (int z = 1; z <= n - 1; ++z) h.a[h.offset(-z)] = h.a[h.offset(z)];
  return h;
}

struct ChainOutput {
  std::vector<std::vector<double>> batch_a;
  std::vector<std::vector<double>> batch_b;
  std::vector<std::size_t> batch_samples;
  std::vector<double> sum_rank;
  std::vector<double> sum_rank_sq;
  std::size_t samples = 0;
  std::size_t accepted = 0;
  std::size_t proposed = 0;
  std::vector<int> state;
};

ChainOutput run_chain(const DirectedNetwork& net, const RateTables& rates, const McmcConfig& cfg, int window,
                      std::vector<int> state, std::uint64_t seed, const SampleObserver* observer) {
  const std::size_t n = net.size();
  const int ni = static_cast<int>(n);
  const std::size_t width = 2 * n - 1;
  const int batches = std::min(cfg.batches_per_chain, cfg.n_samples);

  ChainOutput out;
  out.batch_a.assign(static_cast<std::size_t>(batches), std::vector<double>(width, 0.0));
  out.batch_b.assign(static_cast<std::size_t>(batches), std::vector<double>(width, 0.0));
  out.batch_samples.assign(static_cast<std::size_t>(batches), 0);
  out.sum_rank.assign(n, 0.0);
  out.sum_rank_sq.assign(n, 0.0);

  std::vector<NodeIndex> node_at(n + 1);  // rank -> node
  for (std::size_t v = 0; v < n; ++v) node_at[static_cast<std::size_t>(state[v])] = static_cast<NodeIndex>(v);

  Rng rng(seed);
  std::uniform_int_distribution<NodeIndex> pick(0, static_cast<NodeIndex>(n - 1));
  std::uniform_int_distribution<int> offset(1, 2 * window);

  auto sweep = [&] {
    for (std::size_t k = 0; k < n; ++k) {
      const NodeIndex u = pick(rng);
      NodeIndex v;
      if (cfg.local_fraction > 0.0 && uniform01(rng) < cfg.local_fraction) {
        const int d = offset(rng);
        const int target = state[at(u)] + (d <= window ? d : window - d);
        ++out.proposed;
        if (target < 1 || target > ni) continue;  // rejected: no such rank
        v = node_at[static_cast<std::size_t>(target)];
      } else {
        v = pick(rng);
        while (v == u) v = pick(rng);
        ++out.proposed;
      }
      const double before = detail::incident_log_terms(net, state, rates, u, v);
      std::swap(state[at(u)], state[at(v)]);
      const double log_ratio = detail::incident_log_terms(net, state, rates, u, v) - before;
      if (log_ratio >= 0.0 || uniform01(rng) < std::exp(log_ratio)) {
        ++out.accepted;
        node_at[static_cast<std::size_t>(state[at(u)])] = u;
        node_at[static_cast<std::size_t>(state[at(v)])] = v;
      } else {
        std::swap(state[at(u)], state[at(v)]);
      }
    }
  };

  for (int s = 0; s < cfg.burn_in_sweeps; ++s) sweep();
  for (int s = 0; s < cfg.n_samples; ++s) {
    for (int k = 0; k < cfg.sweep_spacing; ++k) sweep();
    const auto b = static_cast<std::size_t>(static_cast<long>(s) * batches / cfg.n_samples);
    add_counts(net, state, out.batch_a[b], out.batch_b[b], 1.0, ni);
    ++out.batch_samples[b];
    for (std::size_t v = 0; v < n; ++v) {
      const double r = state[v];
      out.sum_rank[v] += r;
      out.sum_rank_sq[v] += r * r;
    }
    ++out.samples;
    if (observer != nullptr && *observer) (*observer)(state);
  }
  out.state = std::move(state);
  return out;
}

PosteriorSummary summarize(const std::vector<double>& sum, const std::vector<double>& sum_sq, double total,
                           std::size_t samples) {
  PosteriorSummary post;
  post.samples_used = samples;
  post.mean_rank.resize(sum.size());
  post.std_rank.resize(sum.size());
  for (std::size_t v = 0; v < sum.size(); ++v) {
    const double mean = sum[v] / total;
    post.mean_rank[v] = mean;
    post.std_rank[v] = std::sqrt(std::max(0.0, sum_sq[v] / total - mean * mean));
  }
  return post;
}

}  // namespace

EStepResult exact_estep(const DirectedNetwork& net, const ModelParams& params) {
  const std::size_t n = net.size();
  if (n > 8) throw std::invalid_argument("exact E-step enumerates n! rankings and is limited to n <= 8");
  if (n < 2) throw std::invalid_argument("exact E-step needs n >= 2");
  if (static_cast<std::size_t>(params.n) != n) throw std::invalid_argument("params.n does not match network");
  const int ni = static_cast<int>(n);
  const RateTables rates = make_rate_tables(params);

  std::vector<int> ranks(n);
  std::iota(ranks.begin(), ranks.end(), 1);
  std::vector<double> log_weights;
  do {
    log_weights.push_back(edge_log_likelihood(net, ranks, rates));
  } while (std::next_permutation(ranks.begin(), ranks.end()));

  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  for (double& w : log_weights) {
    w = std::exp(w - top);
    total += w;
  }

  const std::size_t width = 2 * n - 1;
  std::vector<double> ca(width, 0.0), cb(width, 0.0), sum(n, 0.0), sum_sq(n, 0.0);
  std::iota(ranks.begin(), ranks.end(), 1);
  std::size_t k = 0;
  do {
    const double q = log_weights[k++] / total;
    add_counts(net, ranks, ca, cb, q, ni);
    for (std::size_t v = 0; v < n; ++v) {
      sum[v] += q * ranks[v];
      sum_sq[v] += q * ranks[v] * ranks[v];
    }
  } while (std::next_permutation(ranks.begin(), ranks.end()));

  EStepResult result;
  result.histograms = normalize(std::move(ca), std::move(cb), 1.0, ni);
  result.posterior = summarize(sum, sum_sq, 1.0, log_weights.size());
  return result;
}

EStepResult mcmc_estep(const DirectedNetwork& net, const ModelParams& params, const McmcConfig& cfg,
                       std::span<const std::vector<int>> initial_states, const SampleObserver& observer) {
  validate(cfg);
  const std::size_t n = net.size();
  if (n < 2) throw std::invalid_argument("MCMC E-step needs n >= 2");
  if (static_cast<std::size_t>(params.n) != n) throw std::invalid_argument("params.n does not match network");
  const int ni = static_cast<int>(n);
  const RateTables rates = make_rate_tables(params);

  std::vector<std::vector<int>> starts;
  for (int c = 0; c < cfg.n_chains; ++c) {
    const auto idx = static_cast<std::uint64_t>(c);
    if (!initial_states.empty()) {
      const auto& s = initial_states[static_cast<std::size_t>(c) % initial_states.size()];
      if (s.size() != n || !is_rank_permutation(s)) throw std::invalid_argument("invalid initial MCMC state");
      starts.push_back(s);
    } else {
      const RankAssignment r = random_ranking(n, derive_seed(cfg.seed, "mcmc-start", idx));
      starts.emplace_back(r.values().begin(), r.values().end());
    }
  }

  int window = cfg.local_window;
  if (window == 0) window = std::max(1, static_cast<int>(std::lround(degree_summary(net).mean_degree)));
  window = std::min(window, std::max(1, ni - 1));

  std::vector<ChainOutput> chains(static_cast<std::size_t>(cfg.n_chains));
  const bool parallel = !observer && cfg.n_chains > 1;
  if (parallel) {
    std::vector<std::future<ChainOutput>> jobs;
    for (int c = 0; c < cfg.n_chains; ++c) {
      const auto idx = static_cast<std::size_t>(c);
      jobs.push_back(std::async(std::launch::async, run_chain, std::cref(net), std::cref(rates), std::cref(cfg), window,
                                std::move(starts[idx]), derive_seed(cfg.seed, "mcmc-chain", idx), nullptr));
    }
    for (std::size_t c = 0; c < jobs.size(); ++c) chains[c] = jobs[c].get();
  } else {
    for (int c = 0; c < cfg.n_chains; ++c) {
      const auto idx = static_cast<std::size_t>(c);
      chains[idx] = run_chain(net, rates, cfg, window, std::move(starts[idx]), derive_seed(cfg.seed, "mcmc-chain", idx),
                              &observer);
    }
  }

  const std::size_t width = 2 * n - 1;
  std::vector<double> ca(width, 0.0), cb(width, 0.0), sum(n, 0.0), sum_sq(n, 0.0);
  std::size_t samples = 0, accepted = 0, proposed = 0;
  EStepResult result;
  for (ChainOutput& ch : chains) {
    for (std::size_t b = 0; b < ch.batch_a.size(); ++b) {
      for (std::size_t k = 0; k < width; ++k) {
        ca[k] += ch.batch_a[b][k];
        cb[k] += ch.batch_b[b][k];
      }
      result.batches.push_back(normalize(std::move(ch.batch_a[b]), std::move(ch.batch_b[b]),
                                         static_cast<double>(ch.batch_samples[b]), ni));
    }
    for (std::size_t v = 0; v < n; ++v) {
      sum[v] += ch.sum_rank[v];
      sum_sq[v] += ch.sum_rank_sq[v];
    }
    samples += ch.samples;
    accepted += ch.accepted;
    proposed += ch.proposed;
    result.final_states.push_back(std::move(ch.state));
  }
  result.histograms = normalize(std::move(ca), std::move(cb), static_cast<double>(samples), ni);
  result.posterior = summarize(sum, sum_sq, static_cast<double>(samples), samples);
  result.acceptance_rate = proposed == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  return result;
}

}  // namespace statusrank
