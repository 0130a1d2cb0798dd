#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "statusrank/network.hpp"
#include "statusrank/rank_model.hpp"

namespace statusrank {

/// A one-way claim u -> v is a violation when rank(u) > rank(v).
struct ViolationReport {
  std::size_t violations = 0;
  std::size_t total_directed = 0;
  /// Undefined when there are no one-way claims.
  std::optional<double> fraction_upward;
};

/// Reciprocated pairs are ignored.
ViolationReport count_violations(const DirectedNetwork& net, const RankAssignment& ranking);

struct AnnealSchedule {
  double initial_temperature = 1.0;
  double cooling = 0.995;      // per sweep of n proposals
  int patience_sweeps = 50;    // stop after this many sweeps without a new best
  int max_sweeps = 20000;
  int restarts = 1;
};

struct MvrResult {
  RankAssignment ranking;
  ViolationReport report;
  int sweeps = 0;
  /// Number of distinct restarts that reached the returned violation count.
  int restarts_at_best = 0;
};

/// Simulated annealing over rank swaps, then alternating descents over single
/// node insertions and rank swaps, so the returned ranking admits no single
/// swap that lowers the violation count. The first run starts from a greedy
/// source/sink peeling order, later restarts from random permutations.
/// Deterministic for a given seed.
MvrResult minimum_violations_ranking(const DirectedNetwork& net, std::uint64_t seed,
                                     const AnnealSchedule& schedule = {});

/// Flips each one-way claim independently with probability 1/2.
DirectedNetwork randomize_directions(const DirectedNetwork& net, std::uint64_t seed);

}  // namespace statusrank
