#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "statusrank/json_io.hpp"
#include "test_support.hpp"

using namespace statusrank;

TEST_SUITE("json_io") {
  TEST_CASE("model parameters round trip exactly") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
      const ModelParams p = testing::random_params(3 + trial, rng);
      const ModelParams back = model_params_from_json(Json::parse(to_json(p).dump()));
      CHECK(to_vector(back) == to_vector(p));
      CHECK(back.n == p.n);
    }
  }

  TEST_CASE("malformed parameters are rejected") {
    Json j = to_json(synthetic_params(10));
    j["beta"]["cos_coeffs"] = {1.0, 2.0};
    CHECK_THROWS_AS(model_params_from_json(j), JsonFormatError);
    j = to_json(synthetic_params(10));
    j["alpha"]["amp"] = -1.0;
    CHECK_THROWS_AS(model_params_from_json(j), JsonFormatError);
    j = to_json(synthetic_params(10));
    j["n"] = 2.5;
    CHECK_THROWS_AS(model_params_from_json(j), JsonFormatError);
    j = to_json(synthetic_params(10));
    j["alpha"]["sigma"] = "wide";
    CHECK_THROWS_AS(model_params_from_json(j), JsonFormatError);
    CHECK_THROWS_AS(model_params_from_json(Json::array()), JsonFormatError);
  }

  TEST_CASE("violation reports keep an undefined fraction as null") {
    ViolationReport r;
    r.violations = 0;
    r.total_directed = 0;
    const Json j = to_json(r);
    CHECK(j["fraction_upward"].is_null());
    CHECK_FALSE(violation_report_from_json(j).fraction_upward.has_value());
    r.violations = 3;
    r.total_directed = 10;
    r.fraction_upward = 0.7;
    const ViolationReport back = violation_report_from_json(to_json(r));
    CHECK(back.violations == 3);
    CHECK(*back.fraction_upward == 0.7);
  }

  TEST_CASE("fit results round trip through a file") {
    const DirectedNetwork net = testing::random_network(6, 3);
    FitResult fit;
    fit.labels = net.labels();
    fit.params = synthetic_params(6);
    fit.initial_params = synthetic_params(6);
    fit.posterior.mean_rank = {1.5, 2.25, 3.0, 4.0, 5.0, 5.25};
    fit.posterior.std_rank = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    fit.posterior.samples_used = 800;
    fit.last_iteration_posterior = fit.posterior;
    fit.histograms = histograms_from_ranking(net, std::vector<int>{3, 1, 2, 6, 5, 4});
    fit.objective_trace = {-10.5, -9.25};
    fit.objective_stderr = {0.5, std::nan("")};
    fit.rank_change_trace = {0.3};
    fit.em_iterations = 2;
    fit.converged = true;
    fit.ascent_violations = 1;
    fit.final_acceptance_rate = 0.25;

    const std::string path = (std::filesystem::temp_directory_path() / "statusrank_fit_roundtrip.json").string();
    write_json_file(path, to_json(fit));
    const FitResult back = fit_result_from_json(parse_json_file(path));
    std::filesystem::remove(path);

    CHECK(back.labels == fit.labels);
    CHECK(to_vector(back.params) == to_vector(fit.params));
    CHECK(back.posterior.mean_rank == fit.posterior.mean_rank);
    CHECK(back.posterior.std_rank == fit.posterior.std_rank);
    CHECK(back.posterior.samples_used == 800);
    CHECK(back.histograms.a == fit.histograms.a);
    CHECK(back.histograms.b == fit.histograms.b);
    CHECK(back.objective_trace == fit.objective_trace);
    CHECK(back.objective_stderr[0] == 0.5);
    CHECK(std::isnan(back.objective_stderr[1]));
    CHECK(back.rank_change_trace == fit.rank_change_trace);
    CHECK(back.converged);
    CHECK(back.ascent_violations == 1);
    CHECK(back.final_acceptance_rate == 0.25);
    CHECK(back.last_iteration_posterior.mean_rank == fit.posterior.mean_rank);
  }

  TEST_CASE("inconsistent fit results are rejected") {
    FitResult fit;
    fit.labels = {"a", "b", "c"};
    fit.params = synthetic_params(3);
    fit.posterior.mean_rank = {1, 2, 3};
    fit.posterior.std_rank = {0, 0, 0};
    fit.histograms = RankHistograms(3);
    Json j = to_json(fit);
    CHECK_NOTHROW(fit_result_from_json(j));
    j["posterior"]["mean_rank"] = {1, 2};
    CHECK_THROWS_AS(fit_result_from_json(j), JsonFormatError);
    j = to_json(fit);
    j["histograms"]["a"] = {0.0};
    CHECK_THROWS_AS(fit_result_from_json(j), JsonFormatError);
    j = to_json(fit);
    j.erase("converged");
    CHECK_THROWS_AS(fit_result_from_json(j), JsonFormatError);
  }

  TEST_CASE("figure series write non-finite values as null") {
    FigureSeries s;
    s.name = "x";
    s.x = {0.0, 1.0};
    s.y = {std::nan(""), 2.0};
    const Json j = to_json(s);
    CHECK(j["y"][0].is_null());
    CHECK(j["y"][1] == 2.0);
    CHECK_FALSE(j.contains("yerr"));
  }

  TEST_CASE("parse errors name the file") {
    CHECK_THROWS(parse_json_file("/nonexistent/statusrank.json"));
  }
}
