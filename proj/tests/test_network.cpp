#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "statusrank/network.hpp"
#include "test_support.hpp"

using namespace statusrank;
using testing::parse;

namespace {

std::set<std::pair<std::string, std::string>> mutual_labels(const DirectedNetwork& net) {
  std::set<std::pair<std::string, std::string>> out;
  for (const MutualPair& p : net.mutual()) {
    auto a = net.label(p.lo), b = net.label(p.hi);
    out.insert(std::minmax(a, b));
  }
  return out;
}

std::set<std::pair<std::string, std::string>> oneway_labels(const DirectedNetwork& net) {
  std::set<std::pair<std::string, std::string>> out;
  for (const Claim& c : net.oneway()) out.insert({net.label(c.from), net.label(c.to)});
  return out;
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("mutual claims become one reciprocated pair") {
    const auto net = parse("u v\nv u\n");
    CHECK(net.size() == 2);
    CHECK(mutual_labels(net) == std::set<std::pair<std::string, std::string>>{{"u", "v"}});
    CHECK(net.oneway().empty());
  }

  TEST_CASE("single claim is one-way from claimant to claimed") {
    const auto net = parse("u v\n");
    CHECK(net.mutual().empty());
    REQUIRE(net.oneway().size() == 1);
    CHECK(net.label(net.oneway()[0].from) == "u");
    CHECK(net.label(net.oneway()[0].to) == "v");
    CHECK(net.claims_made(*net.index_of("u")).size() == 1);
    CHECK(net.claims_received(*net.index_of("v")).size() == 1);
  }

  TEST_CASE("mixed claims") {
    const auto net = parse("u v\nv u\nu w\n");
    CHECK(net.size() == 3);
    CHECK(mutual_labels(net) == std::set<std::pair<std::string, std::string>>{{"u", "v"}});
    CHECK(oneway_labels(net) == std::set<std::pair<std::string, std::string>>{{"u", "w"}});
  }

  TEST_CASE("indexing follows first appearance; comments, blanks and duplicates are skipped") {
    const auto net = parse("# header\n\nc a\n  \na b\nc a\n# trailing\n");
    CHECK(net.labels() == std::vector<std::string>{"c", "a", "b"});
    CHECK(net.oneway().size() == 2);
    CHECK(net.claims().size() == 2);
  }

  TEST_CASE("tabs and extra whitespace separate fields") {
    const auto net = parse("a\tb\n  b   c  \r\n");
    CHECK(net.size() == 3);
    CHECK(net.oneway().size() == 2);
  }

  TEST_CASE("self claims and malformed lines report their line number") {
    try {
      parse("a b\n\nb b\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
    try {
      parse("a b\nc\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse("a b c\n"), ParseError);
  }

  TEST_CASE("raw claims are reproduced by S and T") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto net = testing::random_network(12, seed);
      const auto claims = net.claims();
      CHECK(claims.size() == 2 * net.mutual().size() + net.oneway().size());
      std::set<std::pair<int, int>> pairs;
      for (const Claim& c : claims) {
        CHECK(c.from != c.to);
        pairs.insert({c.from, c.to});
      }
      CHECK(pairs.size() == claims.size());
      for (const MutualPair& p : net.mutual()) {
        CHECK(pairs.count({p.lo, p.hi}) == 1);
        CHECK(pairs.count({p.hi, p.lo}) == 1);
      }
      for (const Claim& c : net.oneway()) CHECK(pairs.count({c.to, c.from}) == 0);
    }
  }

  TEST_CASE("write then parse gives back the same decomposition") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto net = testing::random_network(15, seed, 0.2, 0.1);
      std::ostringstream os;
      write_edge_list(os, net, "round trip");
      const auto back = parse(os.str());
      CHECK(mutual_labels(back) == mutual_labels(net));
      CHECK(oneway_labels(back) == oneway_labels(net));
    }
  }

  TEST_CASE("from_parts rejects broken invariants") {
    const std::vector<std::string> labels{"a", "b", "c"};
    CHECK_THROWS_AS(DirectedNetwork::from_parts(labels, {{0, 0}}, {}), std::invalid_argument);
    CHECK_THROWS_AS(DirectedNetwork::from_parts(labels, {{0, 1}}, {{0, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(DirectedNetwork::from_parts(labels, {}, {{0, 1}, {1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(DirectedNetwork::from_parts(labels, {}, {{0, 5}}), std::invalid_argument);
    CHECK_THROWS_AS(DirectedNetwork::from_parts({"a", "a"}, {}, {}), std::invalid_argument);
    CHECK_NOTHROW(DirectedNetwork::from_parts(labels, {{0, 1}}, {{2, 0}}));
  }

  TEST_CASE("canonical order sorts labels and keeps the structure") {
    const auto net = parse("z y\ny z\nz a\nm z\n");
    const auto canon = net.canonical();
    CHECK(canon.labels() == std::vector<std::string>{"a", "m", "y", "z"});
    CHECK(mutual_labels(canon) == mutual_labels(net));
    CHECK(oneway_labels(canon) == oneway_labels(net));
  }
}

TEST_SUITE("network") {
  TEST_CASE("weak components: equal sizes tie to the smallest index") {
    const auto net = parse("a b\nb a\nc d\nd c\n");
    const auto comp = largest_component(net, ComponentMode::kWeak);
    CHECK(comp.labels() == std::vector<std::string>{"a", "b"});
    CHECK(comp.mutual().size() == 1);
  }

  TEST_CASE("strong components of a chain are singletons") {
    const auto net = parse("a b\nb c\n");
    const auto comp = largest_component(net, ComponentMode::kStrong);
    CHECK(comp.labels() == std::vector<std::string>{"a"});
    CHECK(comp.oneway().empty());
  }

  TEST_CASE("strong component of a 3-cycle with a pendant") {
    const auto net = parse("a b\nb c\nc a\na d\n");
    const auto comp = largest_component(net);
    CHECK(comp.labels() == std::vector<std::string>{"a", "b", "c"});
    CHECK(comp.oneway().size() == 3);
    CHECK(largest_component(net, ComponentMode::kWeak).size() == 4);
  }

  TEST_CASE("reciprocated pairs connect both ways") {
    const auto net = parse("a b\nb a\nb c\nd a\n");
    CHECK(largest_component(net, ComponentMode::kStrong).size() == 2);
    CHECK(largest_component(net, ComponentMode::kWeak).size() == 4);
  }

  TEST_CASE("largest component is idempotent") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      const auto net = testing::random_network(25, seed, 0.05, 0.03);
      for (auto mode : {ComponentMode::kStrong, ComponentMode::kWeak}) {
        const auto once = largest_component(net, mode);
        CHECK(largest_component(once, mode) == once);
      }
    }
  }

  TEST_CASE("component mode names") {
    CHECK(parse_component_mode("strong") == ComponentMode::kStrong);
    CHECK(parse_component_mode("weak") == ComponentMode::kWeak);
    CHECK(to_string(ComponentMode::kWeak) == "weak");
    CHECK_THROWS_AS(parse_component_mode("giant"), std::invalid_argument);
  }

  TEST_CASE("degree of a single reciprocated pair") {
    const auto d = degree_summary(parse("u v\nv u\n"));
    CHECK(d.in_degree == std::vector<int>{1, 1});
    CHECK(d.out_degree == std::vector<int>{1, 1});
    CHECK(d.total_degree == std::vector<int>{2, 2});
    CHECK(d.mean_degree == doctest::Approx(2.0));
  }

  TEST_CASE("degree of a single claim") {
    const auto d = degree_summary(parse("u v\n"));
    CHECK(d.out_degree == std::vector<int>{1, 0});
    CHECK(d.in_degree == std::vector<int>{0, 1});
    CHECK(d.mean_degree == doctest::Approx(1.0));
  }

  TEST_CASE("degree of the mixed example") {
    const auto d = degree_summary(parse("u v\nv u\nu w\n"));
    CHECK(d.total_degree == std::vector<int>{3, 2, 1});
    CHECK(d.mean_degree == doctest::Approx(2.0));
  }

  TEST_CASE("in- and out-degree sums both equal 2|S| + |T|") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto net = testing::random_network(20, seed);
      const auto d = degree_summary(net);
      const long expected = 2 * static_cast<long>(net.mutual().size()) + static_cast<long>(net.oneway().size());
      long in = 0, out = 0;
      for (int v : d.in_degree) in += v;
      for (int v : d.out_degree) out += v;
      CHECK(in == expected);
      CHECK(out == expected);
    }
  }

  TEST_CASE("degree summary of an empty network is an error") {
    CHECK_THROWS_AS(degree_summary(DirectedNetwork{}), std::invalid_argument);
  }
}
