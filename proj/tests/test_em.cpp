#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "statusrank/em.hpp"
#include "statusrank/stats.hpp"
#include "test_support.hpp"

using namespace statusrank;

namespace {

EmConfig quick_em(int max_iter = 15) {
  EmConfig em;
  em.max_iter = max_iter;
  em.averaging_start = 5;
  em.final_sample_factor = 2;
  return em;
}

McmcConfig quick_mcmc() {
  McmcConfig cfg;
  cfg.n_chains = 2;
  cfg.n_samples = 40;
  cfg.burn_in_sweeps = 20;
  return cfg;
}

std::string shuffled_lines(const std::string& text, std::uint64_t seed) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  std::mt19937_64 rng(seed);
  std::shuffle(lines.begin(), lines.end(), rng);
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace

TEST_SUITE("em") {
  TEST_CASE("three-node chain produces a complete fit") {
    const DirectedNetwork net = testing::parse("a b\nb c\n");
    const FitResult fit = run_em(net, quick_em(), quick_mcmc());
    CHECK(fit.labels == std::vector<std::string>{"a", "b", "c"});
    CHECK(fit.posterior.mean_rank.size() == 3);
    CHECK(std::accumulate(fit.posterior.mean_rank.begin(), fit.posterior.mean_rank.end(), 0.0) ==
          doctest::Approx(6.0));
    CHECK(fit.objective_trace.size() == static_cast<std::size_t>(fit.em_iterations));
    CHECK(fit.objective_stderr.size() == fit.objective_trace.size());
    CHECK(fit.rank_change_trace.size() + 1 == fit.objective_trace.size());
    CHECK(fit.histograms.n == 3);
    CHECK(fit.initial_mvr.violations == 0);
    CHECK(fit.initial_mvr.fraction_upward == doctest::Approx(1.0));
    CHECK_NOTHROW(validate(fit.params));
  }

  TEST_CASE("result does not depend on input line order") {
    const DirectedNetwork base = testing::random_network(12, 7, 0.15, 0.05);
    std::ostringstream os;
    write_edge_list(os, base);
    const DirectedNetwork a = testing::parse(shuffled_lines(os.str(), 1));
    const DirectedNetwork b = testing::parse(shuffled_lines(os.str(), 2));
    REQUIRE(a.labels() != b.labels());
    const FitResult fa = run_em(a, quick_em(8), quick_mcmc());
    const FitResult fb = run_em(b, quick_em(8), quick_mcmc());
    CHECK(fa.labels == fb.labels);
    CHECK(fa.posterior.mean_rank == fb.posterior.mean_rank);
    CHECK(fa.objective_trace == fb.objective_trace);
    CHECK(to_vector(fa.params) == to_vector(fb.params));
  }

  TEST_CASE("relabelling nodes permutes the fitted ranks") {
    // Relabel with names that keep the sorted order, so the canonical network
    // is the same graph under a renaming.
    const DirectedNetwork net = testing::parse("n1 n2\nn2 n3\nn3 n4\nn4 n2\nn1 n4\n");
    const DirectedNetwork renamed = testing::parse("a b\nb c\nc d\nd b\na d\n");
    const FitResult f1 = run_em(net, quick_em(6), quick_mcmc());
    const FitResult f2 = run_em(renamed, quick_em(6), quick_mcmc());
    CHECK(f1.posterior.mean_rank == f2.posterior.mean_rank);
    CHECK(to_vector(f1.params) == to_vector(f2.params));
  }

  TEST_CASE("configuration and size errors") {
    const DirectedNetwork net = testing::parse("a b\nb c\n");
    EmConfig em = quick_em();
    em.max_iter = 0;
    CHECK_THROWS_AS(run_em(net, em, quick_mcmc()), std::invalid_argument);
    em = quick_em();
    em.tol = 0.0;
    CHECK_THROWS_AS(run_em(net, em, quick_mcmc()), std::invalid_argument);
    em = quick_em();
    em.averaging_decay = 0.4;
    CHECK_THROWS_AS(run_em(net, em, quick_mcmc()), std::invalid_argument);
    McmcConfig bad = quick_mcmc();
    bad.n_chains = 0;
    CHECK_THROWS_AS(run_em(net, quick_em(), bad), std::invalid_argument);
    CHECK_THROWS_AS(run_em(testing::parse("a b\n"), quick_em(), quick_mcmc()), std::invalid_argument);
  }

  TEST_CASE("recovers a planted ranking on a mid-sized network") {
    const int n = 150;
    const RankAssignment truth = random_ranking(n, 3);
    const DirectedNetwork full = generate_network(truth, synthetic_params(n), 4);
    EmConfig em;
    em.max_iter = 60;
    McmcConfig cfg;
    const FitResult fit = run_em(full, em, cfg);

    std::vector<double> fitted, planted;
    for (std::size_t v = 0; v < fit.labels.size(); ++v) {
      fitted.push_back(fit.posterior.mean_rank[v]);
      planted.push_back(truth[static_cast<std::size_t>(std::stoi(fit.labels[v]))]);
    }
    const double rho = stats::spearman(fitted, planted);
    INFO("spearman " << rho << " iterations " << fit.em_iterations);
    CHECK(rho > 0.8);
    CHECK(fit.final_acceptance_rate > 0.05);
  }

  TEST_CASE("objective stderr needs at least two batches") {
    ModelParams p;
    p.n = 3;
    CHECK(objective_stderr({}, p) == 0.0);
    CHECK(objective_stderr({RankHistograms(3)}, p) == 0.0);
    RankHistograms h1(3), h2(3);
    h2.b[h2.offset(1)] = 1.0;
    CHECK(objective_stderr({h1, h2}, p) > 0.0);
  }
}
