#include <algorithm>
#include <limits>
#include <stdexcept>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/connected_components.hpp>
#include <boost/graph/strong_components.hpp>

#include "statusrank/network.hpp"

namespace statusrank {

ComponentMode parse_component_mode(std::string_view s) {
  if (s == "strong") return ComponentMode::kStrong;
  if (s == "weak") return ComponentMode::kWeak;
  throw std::invalid_argument("component mode must be 'strong' or 'weak', got '" + std::string(s) + "'");
}

std::string_view to_string(ComponentMode mode) {
  return mode == ComponentMode::kStrong ? "strong" : "weak";
}

DirectedNetwork largest_component(const DirectedNetwork& net, ComponentMode mode) {
  const std::size_t n = net.size();
  if (n == 0) return net;

  std::vector<int> component(n);
  int count = 0;
  if (mode == ComponentMode::kStrong) {
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
    Graph g(n);
    for (const Claim& c : net.claims()) boost::add_edge(c.from, c.to, g);
    count = boost::strong_components(g, component.data());
  } else {
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    Graph g(n);
    for (const MutualPair& p : net.mutual()) boost::add_edge(p.lo, p.hi, g);
    for (const Claim& c : net.oneway()) boost::add_edge(c.from, c.to, g);
    count = boost::connected_components(g, component.data());
  }

  std::vector<std::size_t> sizes(static_cast<std::size_t>(count), 0);
  std::vector<std::size_t> min_node(static_cast<std::size_t>(count), std::numeric_limits<std::size_t>::max());
  for (std::size_t v = 0; v < n; ++v) {
    auto c = static_cast<std::size_t>(component[v]);
    ++sizes[c];
    min_node[c] = std::min(min_node[c], v);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < sizes.size(); ++c) {
    if (sizes[c] > sizes[best] || (sizes[c] == sizes[best] && min_node[c] < min_node[best])) best = c;
  }

  std::vector<NodeIndex> keep;
  keep.reserve(sizes[best]);
  for (std::size_t v = 0; v < n; ++v) {
    if (static_cast<std::size_t>(component[v]) == best) keep.push_back(static_cast<NodeIndex>(v));
  }
  return net.induced(keep);
}

}  // namespace statusrank
