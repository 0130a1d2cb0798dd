#include "statusrank/mvr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "statusrank/random.hpp"

namespace statusrank {

ViolationReport count_violations(const DirectedNetwork& net, const RankAssignment& ranking) {
  if (ranking.size() != net.size()) throw std::invalid_argument("ranking size does not match network");
  ViolationReport rep;
  rep.total_directed = net.oneway().size();
  for (const Claim& c : net.oneway()) {
    if (ranking[static_cast<std::size_t>(c.from)] > ranking[static_cast<std::size_t>(c.to)]) ++rep.violations;
  }
  if (rep.total_directed > 0) {
    rep.fraction_upward = 1.0 - static_cast<double>(rep.violations) / static_cast<double>(rep.total_directed);
  }
  return rep;
}

namespace {

class SwapState {
 public:
  SwapState(const DirectedNetwork& net, std::vector<int> ranks) : net_(net), ranks_(std::move(ranks)) {
    for (const Claim& c : net_.oneway()) violations_ += ranks_[at(c.from)] > ranks_[at(c.to)];
  }

  long violations() const { return violations_; }
  const std::vector<int>& ranks() const { return ranks_; }

  /// Change in violations if u and v exchange ranks.
  long delta(NodeIndex u, NodeIndex v) {
    const long before = local(u, v);
    std::swap(ranks_[at(u)], ranks_[at(v)]);
    const long after = local(u, v);
    std::swap(ranks_[at(u)], ranks_[at(v)]);
    return after - before;
  }

  void apply(NodeIndex u, NodeIndex v, long delta) {
    std::swap(ranks_[at(u)], ranks_[at(v)]);
    violations_ += delta;
  }

 private:
  static std::size_t at(NodeIndex v) { return static_cast<std::size_t>(v); }

  long local(NodeIndex u, NodeIndex v) const {
    long count = 0;
    for (NodeIndex w : net_.claims_made(u)) count += ranks_[at(u)] > ranks_[at(w)];
    for (NodeIndex w : net_.claims_received(u)) count += ranks_[at(w)] > ranks_[at(u)];
    for (NodeIndex w : net_.claims_made(v)) {
      if (w != u) count += ranks_[at(v)] > ranks_[at(w)];
    }
    for (NodeIndex w : net_.claims_received(v)) {
      if (w != u) count += ranks_[at(w)] > ranks_[at(v)];
    }
    return count;
  }

  const DirectedNetwork& net_;
  std::vector<int> ranks_;
  long violations_ = 0;
};

/// Applies improving swaps until none is left; every pair is rescanned per pass.
void swap_descent(SwapState& state, std::size_t n) {
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        const auto a = static_cast<NodeIndex>(u), b = static_cast<NodeIndex>(v);
        const long d = state.delta(a, b);
        if (d < 0) {
          state.apply(a, b, d);
          improved = true;
        }
      }
    }
  }
}

/// Moves single nodes to the best position in the order, shifting the nodes in
/// between, until no such move lowers the count. Returns true if anything moved.
bool insertion_descent(const DirectedNetwork& net, std::vector<int>& ranks) {
  const std::size_t n = ranks.size();
  std::vector<NodeIndex> order(n);
  for (std::size_t v = 0; v < n; ++v) order[static_cast<std::size_t>(ranks[v] - 1)] = static_cast<NodeIndex>(v);
  // relation[w]: +1 when u claims w, -1 when w claims u, for the node u being moved
  std::vector<int> relation(n, 0);
  bool any = false, improved = true;
  while (improved) {
    improved = false;
    for (std::size_t u = 0; u < n; ++u) {
      const auto node = static_cast<NodeIndex>(u);
      if (net.claims_made(node).empty() && net.claims_received(node).empty()) continue;
      for (NodeIndex w : net.claims_made(node)) relation[static_cast<std::size_t>(w)] = 1;
      for (NodeIndex w : net.claims_received(node)) relation[static_cast<std::size_t>(w)] = -1;
      const long p = ranks[u] - 1;
      long best_delta = 0, best_q = p, delta = 0;
      // Moving above w turns a claim u -> w into a violation and repairs w -> u.
      for (long q = p + 1; q < static_cast<long>(n); ++q) {
        delta += relation[static_cast<std::size_t>(order[static_cast<std::size_t>(q)])];
        if (delta < best_delta) {
          best_delta = delta;
          best_q = q;
        }
      }
      delta = 0;
      for (long q = p - 1; q >= 0; --q) {
        delta -= relation[static_cast<std::size_t>(order[static_cast<std::size_t>(q)])];
        if (delta < best_delta) {
          best_delta = delta;
          best_q = q;
        }
      }
      for (NodeIndex w : net.claims_made(node)) relation[static_cast<std::size_t>(w)] = 0;
      for (NodeIndex w : net.claims_received(node)) relation[static_cast<std::size_t>(w)] = 0;
      if (best_delta < 0) {
        if (best_q > p) {
          std::rotate(order.begin() + p, order.begin() + p + 1, order.begin() + best_q + 1);
        } else {
          std::rotate(order.begin() + best_q, order.begin() + p, order.begin() + p + 1);
        }
        for (long q = std::min(p, best_q); q <= std::max(p, best_q); ++q) {
          ranks[static_cast<std::size_t>(order[static_cast<std::size_t>(q)])] = static_cast<int>(q + 1);
        }
        improved = any = true;
      }
    }
  }
  return any;
}

/// Greedy order that peels sinks to the top and sources to the bottom, then
/// the node with the largest out-minus-in surplus to the bottom. Acyclic claim
/// sets come out without violations.
std::vector<int> greedy_order(const DirectedNetwork& net) {
  const std::size_t n = net.size();
  std::vector<int> out(n), in(n), ranks(n, 0);
  std::vector<bool> placed(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    out[v] = static_cast<int>(net.claims_made(static_cast<NodeIndex>(v)).size());
    in[v] = static_cast<int>(net.claims_received(static_cast<NodeIndex>(v)).size());
  }
  int low = 1, high = static_cast<int>(n);
  auto place = [&](std::size_t v, int rank) {
    placed[v] = true;
    ranks[v] = rank;
    for (NodeIndex w : net.claims_made(static_cast<NodeIndex>(v))) --in[static_cast<std::size_t>(w)];
    for (NodeIndex w : net.claims_received(static_cast<NodeIndex>(v))) --out[static_cast<std::size_t>(w)];
  };
  while (low <= high) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t v = 0; v < n; ++v) {
        if (placed[v]) continue;
        if (out[v] == 0) {
          place(v, high--);
          moved = true;
        } else if (in[v] == 0) {
          place(v, low++);
          moved = true;
        }
      }
    }
    if (low > high) break;
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!placed[v] && (pick == n || out[v] - in[v] > out[pick] - in[pick])) pick = v;
    }
    place(pick, low++);
  }
  return ranks;
}

struct AnnealOutcome {
  std::vector<int> ranks;
  long violations = 0;
  int sweeps = 0;
};

AnnealOutcome anneal_once(const DirectedNetwork& net, Rng& rng, const AnnealSchedule& schedule, bool greedy_start) {
  const std::size_t n = net.size();
  std::vector<int> start(n);
  std::iota(start.begin(), start.end(), 1);
  std::shuffle(start.begin(), start.end(), rng);
  if (greedy_start) start = greedy_order(net);
  SwapState state(net, std::move(start));

  std::vector<int> best = state.ranks();
  long best_violations = state.violations();
  double temperature = schedule.initial_temperature;
  int stale = 0;
  int sweep = 0;
  std::uniform_int_distribution<NodeIndex> pick(0, static_cast<NodeIndex>(n - 1));

  if (n >= 2 && !net.oneway().empty()) {
    for (; sweep < schedule.max_sweeps && best_violations > 0; ++sweep) {
      for (std::size_t k = 0; k < n; ++k) {
        const NodeIndex u = pick(rng);
        NodeIndex v = pick(rng);
        while (v == u) v = pick(rng);
        const long d = state.delta(u, v);
        if (d <= 0 || uniform01(rng) < std::exp(-static_cast<double>(d) / temperature)) {
          state.apply(u, v, d);
          if (state.violations() < best_violations) {
            best_violations = state.violations();
            best = state.ranks();
            stale = -1;
          }
        }
      }
      if (++stale >= schedule.patience_sweeps) {
        ++sweep;
        break;
      }
      if (stale < 0) stale = 0;
      temperature *= schedule.cooling;
    }
  }

  // Alternate the two descents until neither finds a better ranking.
  while (true) {
    insertion_descent(net, best);
    SwapState polished(net, std::move(best));
    const long before = polished.violations();
    swap_descent(polished, n);
    best = polished.ranks();
    if (polished.violations() == before) return {best, polished.violations(), sweep};
  }
}

}  // namespace

MvrResult minimum_violations_ranking(const DirectedNetwork& net, std::uint64_t seed, const AnnealSchedule& schedule) {
  if (net.empty()) throw std::invalid_argument("minimum violations ranking of an empty network");
  const int restarts = std::max(1, schedule.restarts);

  std::optional<AnnealOutcome> best;
  int hits = 0;
  int total_sweeps = 0;
  for (int k = 0; k < restarts; ++k) {
    Rng rng(derive_seed(seed, "mvr-restart", static_cast<std::uint64_t>(k)));
    AnnealOutcome out = anneal_once(net, rng, schedule, k == 0);
    total_sweeps += out.sweeps;
    if (!best || out.violations < best->violations) {
      best = std::move(out);
      hits = 1;
    } else if (out.violations == best->violations) {
      ++hits;
    }
  }

  MvrResult result{RankAssignment(std::move(best->ranks)), {}, total_sweeps, hits};
  result.report = count_violations(net, result.ranking);
  return result;
}

DirectedNetwork randomize_directions(const DirectedNetwork& net, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Claim> oneway;
  oneway.reserve(net.oneway().size());
  for (const Claim& c : net.oneway()) {
    const bool flip = (rng() >> 63) != 0;
    oneway.push_back(flip ? Claim{c.to, c.from} : c);
  }
  return DirectedNetwork::from_parts(net.labels(), net.mutual(), std::move(oneway));
}

}  // namespace statusrank
