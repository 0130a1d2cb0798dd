#include "statusrank/network.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace statusrank {

namespace {

void check_node(NodeIndex v, std::size_t n) {
  if (v < 0 || static_cast<std::size_t>(v) >= n) {
    throw std::invalid_argument("node index " + std::to_string(v) + " out of range");
  }
}

std::uint64_t pair_key(NodeIndex a, NodeIndex b) {
  auto lo = static_cast<std::uint32_t>(std::min(a, b));
  auto hi = static_cast<std::uint32_t>(std::max(a, b));
  return (std::uint64_t{lo} << 32) | hi;
}

}  // namespace

DirectedNetwork DirectedNetwork::from_claims(std::vector<std::string> labels, std::span<const Claim> claims) {
  const std::size_t n = labels.size();
  std::set<Claim> unique;
  for (const Claim& c : claims) {
    check_node(c.from, n);
    check_node(c.to, n);
    if (c.from == c.to) {
      throw std::invalid_argument("self claim on node " + labels[static_cast<std::size_t>(c.from)]);
    }
    unique.insert(c);
  }
  std::vector<MutualPair> mutual;
  std::vector<Claim> oneway;
  for (const Claim& c : unique) {
    if (unique.contains(Claim{c.to, c.from})) {
      if (c.from < c.to) mutual.push_back({c.from, c.to});
    } else {
      oneway.push_back(c);
    }
  }
  return from_parts(std::move(labels), std::move(mutual), std::move(oneway));
}

DirectedNetwork DirectedNetwork::from_parts(std::vector<std::string> labels, std::vector<MutualPair> mutual,
                                            std::vector<Claim> oneway) {
  DirectedNetwork net;
  const std::size_t n = labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = net.label_index_.emplace(labels[i], static_cast<NodeIndex>(i));
    if (!inserted) throw std::invalid_argument("duplicate node label '" + labels[i] + "'");
  }
  for (MutualPair& p : mutual) {
    check_node(p.lo, n);
    check_node(p.hi, n);
    if (p.lo == p.hi) throw std::invalid_argument("self pair in reciprocated set");
    if (p.lo > p.hi) std::swap(p.lo, p.hi);
  }
  std::sort(mutual.begin(), mutual.end());
  mutual.erase(std::unique(mutual.begin(), mutual.end()), mutual.end());

  std::set<std::uint64_t> seen;
  for (const MutualPair& p : mutual) seen.insert(pair_key(p.lo, p.hi));
  std::sort(oneway.begin(), oneway.end());
  oneway.erase(std::unique(oneway.begin(), oneway.end()), oneway.end());
  for (const Claim& c : oneway) {
    check_node(c.from, n);
    check_node(c.to, n);
    if (c.from == c.to) throw std::invalid_argument("self claim in one-way set");
    if (!seen.insert(pair_key(c.from, c.to)).second) {
      throw std::invalid_argument("pair (" + labels[static_cast<std::size_t>(c.from)] + ", " +
                                  labels[static_cast<std::size_t>(c.to)] +
                                  ") appears twice across reciprocated/one-way sets");
    }
  }
  net.labels_ = std::move(labels);
  net.mutual_ = std::move(mutual);
  net.oneway_ = std::move(oneway);
  net.build_index();
  return net;
}

void DirectedNetwork::build_index() {
  const std::size_t n = labels_.size();
  mutual_adj_.assign(n, {});
  out_adj_.assign(n, {});
  in_adj_.assign(n, {});
  for (const MutualPair& p : mutual_) {
    mutual_adj_[idx(p.lo)].push_back(p.hi);
    mutual_adj_[idx(p.hi)].push_back(p.lo);
  }
  for (const Claim& c : oneway_) {
    out_adj_[idx(c.from)].push_back(c.to);
    in_adj_[idx(c.to)].push_back(c.from);
  }
  for (auto* adj : {&mutual_adj_, &out_adj_, &in_adj_}) {
    for (auto& list : *adj) std::sort(list.begin(), list.end());
  }
}

std::optional<NodeIndex> DirectedNetwork::index_of(std::string_view label) const {
  auto it = label_index_.find(std::string(label));
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Claim> DirectedNetwork::claims() const {
  std::vector<Claim> out;
  out.reserve(2 * mutual_.size() + oneway_.size());
  for (const MutualPair& p : mutual_) {
    out.push_back({p.lo, p.hi});
    out.push_back({p.hi, p.lo});
  }
  out.insert(out.end(), oneway_.begin(), oneway_.end());
  std::sort(out.begin(), out.end());
  return out;
}

DirectedNetwork DirectedNetwork::induced(std::span<const NodeIndex> nodes) const {
  std::vector<NodeIndex> remap(size(), -1);
  std::vector<std::string> labels;
  labels.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    check_node(nodes[i], size());
    if (remap[idx(nodes[i])] != -1) throw std::invalid_argument("duplicate node in induced set");
    remap[idx(nodes[i])] = static_cast<NodeIndex>(i);
    labels.push_back(labels_[idx(nodes[i])]);
  }
  std::vector<MutualPair> mutual;
  for (const MutualPair& p : mutual_) {
    NodeIndex a = remap[idx(p.lo)], b = remap[idx(p.hi)];
    if (a >= 0 && b >= 0) mutual.push_back({std::min(a, b), std::max(a, b)});
  }
  std::vector<Claim> oneway;
  for (const Claim& c : oneway_) {
    NodeIndex a = remap[idx(c.from)], b = remap[idx(c.to)];
    if (a >= 0 && b >= 0) oneway.push_back({a, b});
  }
  return from_parts(std::move(labels), std::move(mutual), std::move(oneway));
}

DirectedNetwork DirectedNetwork::canonical() const {
  std::vector<NodeIndex> order(size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [this](NodeIndex a, NodeIndex b) { return labels_[idx(a)] < labels_[idx(b)]; });
  return induced(order);
}

DirectedNetwork parse_edge_list(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeIndex> index;
  std::vector<Claim> claims;
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, static_cast<NodeIndex>(labels.size()));
    if (inserted) labels.push_back(name);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string src, dst, extra;
    if (!(fields >> src >> dst) || (fields >> extra)) {
      throw ParseError(lineno, "expected '<src> <dst>', got '" + line + "'");
    }
    if (src == dst) throw ParseError(lineno, "node '" + src + "' claims itself");
    NodeIndex a = intern(src);
    NodeIndex b = intern(dst);
    claims.push_back({a, b});
  }
  return DirectedNetwork::from_claims(std::move(labels), claims);
}

DirectedNetwork read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list '" + path + "'");
  return parse_edge_list(in);
}

void write_edge_list(std::ostream& out, const DirectedNetwork& net, std::string_view header) {
  if (!header.empty()) out << "# " << header << '\n';
  for (const Claim& c : net.claims()) {
    out << net.label(c.from) << ' ' << net.label(c.to) << '\n';
  }
}

DegreeSummary degree_summary(const DirectedNetwork& net) {
  if (net.empty()) throw std::invalid_argument("degree summary of an empty network");
  const std::size_t n = net.size();
  DegreeSummary d;
  d.in_degree.assign(n, 0);
  d.out_degree.assign(n, 0);
  d.total_degree.assign(n, 0);
  for (const MutualPair& p : net.mutual()) {
    for (NodeIndex v : {p.lo, p.hi}) {
      ++d.in_degree[static_cast<std::size_t>(v)];
      ++d.out_degree[static_cast<std::size_t>(v)];
    }
  }
  for (const Claim& c : net.oneway()) {
    ++d.out_degree[static_cast<std::size_t>(c.from)];
    ++d.in_degree[static_cast<std::size_t>(c.to)];
  }
  long total = 0;
  for (std::size_t v = 0; v < n; ++v) {
    d.total_degree[v] = d.in_degree[v] + d.out_degree[v];
    total += d.total_degree[v];
  }
  d.mean_degree = static_cast<double>(total) / static_cast<double>(n);
  return d;
}

}  // namespace statusrank
