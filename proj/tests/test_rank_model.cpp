#include <doctest.h>

#include <cmath>
#include <random>

#include "statusrank/rank_model.hpp"
#include "test_support.hpp"

using namespace statusrank;

namespace {

ModelParams zero_params(int n) {
  ModelParams p;
  p.n = n;
  p.alpha.amp = 0.0;
  p.beta.cos_coeffs = {};
  p.beta.peak_amp = 0.0;
  return p;
}

}  // namespace

TEST_SUITE("rank_model") {
  TEST_CASE("rank assignments must be permutations of 1..n") {
    CHECK_NOTHROW(RankAssignment({3, 1, 2}));
    CHECK_THROWS_AS(RankAssignment({1, 1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(RankAssignment({0, 1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(RankAssignment({1, 2, 4}), std::invalid_argument);
    CHECK(RankAssignment::identity(3) == RankAssignment({1, 2, 3}));
    CHECK(RankAssignment({2, 3, 1}).reversed() == RankAssignment({2, 1, 3}));
    CHECK(is_rank_permutation(std::vector<int>{}));
  }

  TEST_CASE("alpha is a Gaussian with its peak at zero") {
    ModelParams p;
    p.n = 10;
    p.alpha = {0.5, 2.0};
    CHECK(alpha_eval(p, 0) == doctest::Approx(0.5));
    CHECK(alpha_eval(p, 2) == doctest::Approx(0.30326532985631671).epsilon(1e-12));
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const ModelParams q = testing::random_params(9, rng);
      for (int z = 0; z < q.n; ++z) CHECK(alpha_eval(q, z) == alpha_eval(q, -z));
    }
  }

  TEST_CASE("beta special cases") {
    ModelParams p = zero_params(11);
    for (int z = -10; z <= 10; ++z) CHECK(beta_eval(p, z) == 0.0);
    p.beta.cos_coeffs[0] = 1.0;
    for (int z = -10; z <= 10; ++z) CHECK(beta_eval(p, z) == doctest::Approx(1.0));
    p.beta.cos_coeffs = {0.0, 1.0, 0.0, 0.0, 0.0};
    CHECK(beta_eval(p, 0) == doctest::Approx(0.0));
    CHECK(beta_eval(p, 10) == doctest::Approx(1.0));
    CHECK(beta_eval(p, -10) == doctest::Approx(1.0));
  }

  TEST_CASE("beta splits into tail and peak and is never negative") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      const ModelParams p = testing::random_params(2 + trial % 30, rng);
      for (int z = -(p.n - 1); z <= p.n - 1; ++z) {
        const double b = beta_eval(p, z);
        CHECK(b >= 0.0);
        CHECK(b == doctest::Approx(beta_tail_eval(p, z) + beta_peak_eval(p, z)));
        CHECK(b == doctest::Approx(testing::direct_beta(p, z)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("rank differences outside [-(n-1), n-1] are rejected") {
    ModelParams p;
    p.n = 5;
    CHECK_THROWS_AS(alpha_eval(p, 5), std::out_of_range);
    CHECK_THROWS_AS(beta_eval(p, -5), std::out_of_range);
    CHECK_NOTHROW(beta_eval(p, -4));
  }

  TEST_CASE("parameter validation") {
    ModelParams p;
    p.n = 4;
    CHECK_NOTHROW(validate(p));
    p.n = 1;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.n = 4;
    p.alpha.sigma = 0.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.alpha.amp = 0.0;
    CHECK_NOTHROW(validate(p));  // width of a zero Gaussian is irrelevant
    p.alpha = {-0.1, 2.0};
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.alpha = {0.1, 2.0};
    p.beta.cos_coeffs[2] = std::nan("");
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.beta.cos_coeffs[2] = 0.0;
    p.beta.peak_amp = 0.2;
    p.beta.peak_sigma = -1.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
  }

  TEST_CASE("rate tables floor the logs") {
    ModelParams p = zero_params(4);
    p.alpha = {0.2, 1.0};
    const RateTables t = make_rate_tables(p);
    CHECK(t.alpha[t.offset(0)] == doctest::Approx(0.2));
    CHECK(t.log_beta[t.offset(2)] == doctest::Approx(std::log(1e-12)));
  }

  TEST_CASE("generation with zero rates gives an empty network") {
    const DirectedNetwork net = generate_network(random_ranking(30, 1), zero_params(30), 2);
    CHECK(net.size() == 30);
    CHECK(net.mutual().empty());
    CHECK(net.oneway().empty());
  }

  TEST_CASE("saturated alpha on two nodes always links them") {
    ModelParams p = zero_params(2);
    p.alpha = {50.0, 1.0};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const DirectedNetwork net = generate_network(RankAssignment::identity(2), p, seed);
      CHECK(net.mutual().size() == 1);
      CHECK(net.oneway().empty());
    }
  }

  TEST_CASE("generation is deterministic per seed") {
    const ModelParams p = synthetic_params(80);
    const RankAssignment truth = random_ranking(80, 4);
    CHECK(generate_network(truth, p, 9) == generate_network(truth, p, 9));
    CHECK_FALSE(generate_network(truth, p, 9) == generate_network(truth, p, 10));
    CHECK(random_ranking(80, 4) == truth);
  }

  TEST_CASE("edge counts match the analytic expectation over 100 seeds") {
    const int n = 500;
    ModelParams p = synthetic_params(n);
    p.alpha = {0.6, 8.0};
    const RankAssignment truth = random_ranking(n, 77);

    // Occupancy probabilities per unordered pair; a pair drawing the mutual
    // edge or both claims is stored as reciprocated.
    double mean_s = 0.0, var_s = 0.0, mean_t = 0.0, var_t = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const int z = truth[static_cast<std::size_t>(i)] - truth[static_cast<std::size_t>(j)];
        const double pa = 1.0 - std::exp(-testing::direct_alpha(p, z));
        const double p1 = 1.0 - std::exp(-testing::direct_beta(p, z));
        const double p2 = 1.0 - std::exp(-testing::direct_beta(p, -z));
        const double qs = 1.0 - (1.0 - pa) * (1.0 - p1 * p2);
        const double qt = (1.0 - pa) * (p1 * (1.0 - p2) + p2 * (1.0 - p1));
        mean_s += qs;
        var_s += qs * (1.0 - qs);
        mean_t += qt;
        var_t += qt * (1.0 - qt);
      }
    }

    const int seeds = 100;
    double sum_s = 0.0, sum_t = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const DirectedNetwork net = generate_network(truth, p, 1000 + static_cast<std::uint64_t>(s));
      sum_s += static_cast<double>(net.mutual().size());
      sum_t += static_cast<double>(net.oneway().size());
    }
    const double se_s = std::sqrt(var_s / seeds), se_t = std::sqrt(var_t / seeds);
    INFO("mean |S| " << sum_s / seeds << " expected " << mean_s << " se " << se_s);
    INFO("mean |T| " << sum_t / seeds << " expected " << mean_t << " se " << se_t);
    CHECK(std::abs(sum_s / seeds - mean_s) <= 3.0 * se_s);
    CHECK(std::abs(sum_t / seeds - mean_t) <= 3.0 * se_t);
  }

  TEST_CASE("each edge indicator on three nodes is Bernoulli with the model rate") {
    ModelParams p;
    p.n = 3;
    p.alpha = {0.4, 1.5};
    p.beta.cos_coeffs = {0.5, 0.3, -0.2, 0.1, 0.0};
    p.beta.peak_amp = 0.2;
    p.beta.peak_sigma = 1.0;
    const RankAssignment truth({2, 3, 1});

    const int draws = 20000;
    int mutual[3][3] = {}, claim[3][3] = {};
    for (int s = 0; s < draws; ++s) {
      const DirectedNetwork net = generate_network(truth, p, static_cast<std::uint64_t>(s));
      for (const MutualPair& m : net.mutual()) ++mutual[m.lo][m.hi];
      for (const Claim& c : net.oneway()) ++claim[c.from][c.to];
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        const int ri = truth[static_cast<std::size_t>(i)], rj = truth[static_cast<std::size_t>(j)];
        const double pa = 1.0 - std::exp(-testing::direct_alpha(p, ri - rj));
        const double p_ij = 1.0 - std::exp(-testing::direct_beta(p, rj - ri));  // i claims j
        const double p_ji = 1.0 - std::exp(-testing::direct_beta(p, ri - rj));
        const double q_claim = (1.0 - pa) * p_ij * (1.0 - p_ji);
        const double f_claim = static_cast<double>(claim[i][j]) / draws;
        CHECK(std::abs(f_claim - q_claim) <= 3.0 * std::sqrt(q_claim * (1.0 - q_claim) / draws));
        if (i < j) {
          const double q_mutual = 1.0 - (1.0 - pa) * (1.0 - p_ij * p_ji);
          const double f_mutual = static_cast<double>(mutual[i][j]) / draws;
          CHECK(std::abs(f_mutual - q_mutual) <= 3.0 * std::sqrt(q_mutual * (1.0 - q_mutual) / draws));
        }
      }
    }
  }

  TEST_CASE("generated networks satisfy the structural invariants") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ModelParams p = synthetic_params(60);
      p.alpha.amp = 0.8;
      const DirectedNetwork net = generate_network(random_ranking(60, seed), p, seed);
      CHECK_NOTHROW(DirectedNetwork::from_parts(net.labels(), net.mutual(), net.oneway()));
    }
  }
}
