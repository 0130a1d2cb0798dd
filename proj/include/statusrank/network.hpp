#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace statusrank {

using NodeIndex = std::int32_t;

/// A friendship claim: `from` names `to` as a friend.
struct Claim {
  NodeIndex from = 0;
  NodeIndex to = 0;
  friend bool operator==(const Claim&, const Claim&) = default;
  friend auto operator<=>(const Claim&, const Claim&) = default;
};

/// A reciprocated pair, stored with lo < hi.
struct MutualPair {
  NodeIndex lo = 0;
  NodeIndex hi = 0;
  friend bool operator==(const MutualPair&, const MutualPair&) = default;
  friend auto operator<=>(const MutualPair&, const MutualPair&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Directed friendship network split into reciprocated pairs (S) and
/// one-way claims (T). Immutable once built.
///
/// Invariants: no self pairs; S and T are disjoint as unordered pairs; T never
/// holds both directions of a pair; node labels are unique.
class DirectedNetwork {
 public:
  DirectedNetwork() = default;

  /// Builds from raw claims. Mutual claims collapse to one S pair, duplicates
  /// are dropped. Throws std::invalid_argument on self claims or bad indices.
  static DirectedNetwork from_claims(std::vector<std::string> labels, std::span<const Claim> claims);

  /// Builds from an explicit decomposition; throws if the invariants fail.
  static DirectedNetwork from_parts(std::vector<std::string> labels, std::vector<MutualPair> mutual,
                                    std::vector<Claim> oneway);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(NodeIndex v) const { return labels_.at(static_cast<std::size_t>(v)); }
  std::optional<NodeIndex> index_of(std::string_view label) const;

  /// Sorted reciprocated pairs.
  const std::vector<MutualPair>& mutual() const noexcept { return mutual_; }
  /// Sorted one-way claims.
  const std::vector<Claim>& oneway() const noexcept { return oneway_; }

  std::span<const NodeIndex> mutual_neighbors(NodeIndex v) const { return mutual_adj_[idx(v)]; }
  /// Nodes that v claims without reciprocation.
  std::span<const NodeIndex> claims_made(NodeIndex v) const { return out_adj_[idx(v)]; }
  /// Nodes that claim v without reciprocation.
  std::span<const NodeIndex> claims_received(NodeIndex v) const { return in_adj_[idx(v)]; }

  /// All ordered claims of A = S + T; 2|S| + |T| entries.
  std::vector<Claim> claims() const;

  /// Subnetwork induced on `nodes`, reindexed in the given order.
  DirectedNetwork induced(std::span<const NodeIndex> nodes) const;

  /// Same network with nodes reindexed by ascending label.
  DirectedNetwork canonical() const;

  friend bool operator==(const DirectedNetwork& a, const DirectedNetwork& b) {
    return a.labels_ == b.labels_ && a.mutual_ == b.mutual_ && a.oneway_ == b.oneway_;
  }

 private:
  static std::size_t idx(NodeIndex v) { return static_cast<std::size_t>(v); }
  void build_index();

  std::vector<std::string> labels_;
  std::vector<MutualPair> mutual_;
  std::vector<Claim> oneway_;
  std::vector<std::vector<NodeIndex>> mutual_adj_;
  std::vector<std::vector<NodeIndex>> out_adj_;
  std::vector<std::vector<NodeIndex>> in_adj_;
  std::unordered_map<std::string, NodeIndex> label_index_;
};

/// Reads `src dst` lines; `#` starts a comment line. Nodes are indexed in order
/// of first appearance. Throws ParseError with a 1-based line number.
DirectedNetwork parse_edge_list(std::istream& in);
DirectedNetwork read_edge_list(const std::string& path);

/// Writes every claim as a `src dst` line (mutual pairs as two lines).
/// Isolated nodes are not representable and are dropped.
void write_edge_list(std::ostream& out, const DirectedNetwork& net, std::string_view header = {});

enum class ComponentMode { kStrong, kWeak };

ComponentMode parse_component_mode(std::string_view s);
std::string_view to_string(ComponentMode mode);

/// Induced subnetwork on the largest strongly or weakly connected component.
/// Ties go to the component holding the smallest node index.
DirectedNetwork largest_component(const DirectedNetwork& net, ComponentMode mode = ComponentMode::kStrong);

struct DegreeSummary {
  std::vector<int> in_degree;
  std::vector<int> out_degree;
  std::vector<int> total_degree;
  double mean_degree = 0.0;
};

/// A mutual pair adds one to both in- and out-degree of each endpoint.
DegreeSummary degree_summary(const DirectedNetwork& net);

}  // namespace statusrank
