#include <doctest.h>
#include <gsl/gsl_statistics_double.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "statusrank/stats.hpp"

using namespace statusrank;

TEST_SUITE("stats") {
  TEST_CASE("mean and standard error") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    CHECK(stats::mean(x) == doctest::Approx(2.5));
    CHECK(stats::standard_error(x) == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(stats::standard_error(std::vector<double>{7.0}) == 0.0);
    CHECK(std::isnan(stats::mean(std::vector<double>{})));
  }

  TEST_CASE("fractional ranks share ties") {
    const std::vector<double> x{10.0, 20.0, 10.0, 5.0};
    CHECK(stats::fractional_ranks(x) == std::vector<double>{2.5, 4.0, 2.5, 1.0});
  }

  TEST_CASE("correlations agree with GSL") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> x(50), y(50);
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = normal(rng);
        y[i] = 0.5 * x[i] + normal(rng);
      }
      CHECK(stats::pearson(x, y) == doctest::Approx(gsl_stats_correlation(x.data(), 1, y.data(), 1, x.size())));
      std::vector<double> work(2 * x.size());
      CHECK(stats::spearman(x, y) ==
            doctest::Approx(gsl_stats_spearman(x.data(), 1, y.data(), 1, x.size(), work.data())));
    }
    CHECK(stats::spearman(std::vector<double>{1, 2, 3}, std::vector<double>{30, 20, 10}) == doctest::Approx(-1.0));
    CHECK(std::isnan(stats::pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3})));
  }

  TEST_CASE("KS distance from uniform") {
    CHECK(stats::ks_uniform_statistic(std::vector<double>{0.5}) == doctest::Approx(0.5));
    CHECK(stats::ks_uniform_statistic(std::vector<double>{0.25, 0.75}) == doctest::Approx(0.25));
    CHECK(stats::ks_uniform_statistic(std::vector<double>{0.0, 0.0, 0.0}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(stats::ks_uniform_statistic(std::vector<double>{}), std::invalid_argument);
  }

  TEST_CASE("KS p-value follows the Kolmogorov distribution") {
    // d chosen so that the corrected lambda = (sqrt(n) + 0.12 + 0.11 / sqrt(n)) d hits a tabulated value.
    const std::size_t n = 50;
    const double root = std::sqrt(static_cast<double>(n));
    const double scale = root + 0.12 + 0.11 / root;
    CHECK(stats::ks_pvalue(1.0 / scale, n) == doctest::Approx(0.26999967).epsilon(1e-6));
    CHECK(stats::ks_pvalue(1.3580986 / scale, n) == doctest::Approx(0.05).epsilon(1e-5));
    CHECK(stats::ks_pvalue(0.0, 10) == 1.0);
    CHECK(stats::ks_pvalue(1.0, 100) < 1e-12);
  }

  TEST_CASE("one-way F on hand-computed groups") {
    const std::vector<double> v{1, 2, 3, 4, 5, 6};
    const std::vector<int> g{0, 0, 0, 1, 1, 1};
    CHECK(stats::anova_f(v, g, 2) == doctest::Approx(13.5));
    CHECK(std::isnan(stats::anova_f(v, std::vector<int>{0, 0, 0, 0, 0, 0}, 2)));
    CHECK(std::isinf(stats::anova_f(std::vector<double>{1, 1, 2, 2}, std::vector<int>{0, 0, 1, 1}, 2)));
  }

  TEST_CASE("Welch t on hand-computed groups") {
    const std::vector<double> v{1, 2, 3, 4, 5, 6};
    const std::vector<int> g{0, 0, 0, 1, 1, 1};
    CHECK(stats::welch_t(v, g, 0, 1) == doctest::Approx(-3.0 / std::sqrt(2.0 / 3.0)));
    CHECK(stats::welch_t(v, g, 1, 0) == doctest::Approx(3.0 / std::sqrt(2.0 / 3.0)));
    CHECK(std::isnan(stats::welch_t(v, std::vector<int>{0, 1, 1, 1, 1, 1}, 0, 1)));
  }
}
