#include "statusrank/rank_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "statusrank/random.hpp"

namespace statusrank {

bool is_rank_permutation(std::span<const int> ranks) {
  std::vector<char> seen(ranks.size() + 1, 0);
  for (int r : ranks) {
    if (r < 1 || static_cast<std::size_t>(r) > ranks.size() || seen[static_cast<std::size_t>(r)]) return false;
    seen[static_cast<std::size_t>(r)] = 1;
  }
  return true;
}

RankAssignment::RankAssignment(std::vector<int> ranks) : ranks_(std::move(ranks)) {
  if (!is_rank_permutation(ranks_)) throw std::invalid_argument("ranks are not a permutation of 1..n");
}

RankAssignment RankAssignment::identity(std::size_t n) {
  std::vector<int> r(n);
  std::iota(r.begin(), r.end(), 1);
  return RankAssignment(std::move(r));
}

RankAssignment RankAssignment::reversed() const {
  std::vector<int> r(ranks_.size());
  const int n = static_cast<int>(ranks_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = n + 1 - ranks_[i];
  return RankAssignment(std::move(r));
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("invalid model parameters: ") + what);
}

void check_z(const ModelParams& p, int z) {
  if (z <= -p.n || z >= p.n) {
    throw std::out_of_range("rank difference " + std::to_string(z) + " outside [-(n-1), n-1] for n=" +
                            std::to_string(p.n));
  }
}

double gaussian(double amp, double sigma, int z) {
  if (amp == 0.0) return 0.0;
  const double x = static_cast<double>(z) / sigma;
  return amp * std::exp(-0.5 * x * x);
}

}  // namespace

void validate(const ModelParams& p) {
  require(p.n >= 2, "n must be at least 2");
  require(std::isfinite(p.alpha.amp) && p.alpha.amp >= 0.0, "alpha amp must be finite and non-negative");
  require(p.alpha.amp == 0.0 || (std::isfinite(p.alpha.sigma) && p.alpha.sigma > 0.0),
          "alpha sigma must be finite and positive");
  for (double c : p.beta.cos_coeffs) require(std::isfinite(c), "beta cosine coefficients must be finite");
  require(std::isfinite(p.beta.peak_amp) && p.beta.peak_amp >= 0.0, "beta peak amp must be finite and non-negative");
  require(p.beta.peak_amp == 0.0 || (std::isfinite(p.beta.peak_sigma) && p.beta.peak_sigma > 0.0),
          "beta peak sigma must be finite and positive");
}

double alpha_eval(const ModelParams& p, int z) {
  check_z(p, z);
  return gaussian(p.alpha.amp, p.alpha.sigma, z);
}

double beta_tail_eval(const ModelParams& p, int z) {
  check_z(p, z);
  const double u = static_cast<double>(z) / static_cast<double>(p.n - 1);
  const double theta = std::numbers::pi * (u + 1.0) / 2.0;
  double s = 0.0;
  for (int k = 0; k < BetaParams::kTerms; ++k) s += p.beta.cos_coeffs[static_cast<std::size_t>(k)] * std::cos(k * theta);
  return s * s;
}

double beta_peak_eval(const ModelParams& p, int z) {
  check_z(p, z);
  return gaussian(p.beta.peak_amp, p.beta.peak_sigma, z);
}

double beta_eval(const ModelParams& p, int z) { return beta_tail_eval(p, z) + beta_peak_eval(p, z); }

RateTables make_rate_tables(const ModelParams& p) {
  RateTables t;
  t.n = p.n;
  const std::size_t width = 2 * static_cast<std::size_t>(p.n) - 1;
  t.alpha.resize(width);
  t.beta.resize(width);
  t.log_alpha.resize(width);
  t.log_beta.resize(width);
  for (int z = -(p.n - 1); z <= p.n - 1; ++z) {
    const std::size_t k = t.offset(z);
    t.alpha[k] = alpha_eval(p, z);
    t.beta[k] = beta_eval(p, z);
    t.log_alpha[k] = std::log(std::max(t.alpha[k], kLogFloor));
    t.log_beta[k] = std::log(std::max(t.beta[k], kLogFloor));
  }
  return t;
}

DirectedNetwork generate_network(const RankAssignment& truth, const ModelParams& p, std::uint64_t seed) {
  validate(p);
  const std::size_t n = truth.size();
  if (n < 2) throw std::invalid_argument("generate_network needs n >= 2");
  if (static_cast<std::size_t>(p.n) != n) throw std::invalid_argument("params.n does not match ranking size");

  const RateTables rates = make_rate_tables(p);
  std::vector<double> p_alpha(rates.alpha.size()), p_beta(rates.beta.size());
  for (std::size_t k = 0; k < p_alpha.size(); ++k) {
    p_alpha[k] = -std::expm1(-rates.alpha[k]);
    p_beta[k] = -std::expm1(-rates.beta[k]);
  }

  Rng rng(seed);
  std::vector<MutualPair> mutual;
  std::vector<Claim> oneway;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int z = truth[i] - truth[j];
      const bool s = uniform01(rng) < p_alpha[rates.offset(z)];
      const bool j_claims_i = uniform01(rng) < p_beta[rates.offset(z)];
      const bool i_claims_j = uniform01(rng) < p_beta[rates.offset(-z)];
      const auto a = static_cast<NodeIndex>(i), b = static_cast<NodeIndex>(j);
      if (s || (j_claims_i && i_claims_j)) {
        mutual.push_back({a, b});
      } else if (j_claims_i) {
        oneway.push_back({b, a});
      } else if (i_claims_j) {
        oneway.push_back({a, b});
      }
    }
  }
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return DirectedNetwork::from_parts(std::move(labels), std::move(mutual), std::move(oneway));
}

RankAssignment random_ranking(std::size_t n, std::uint64_t seed) {
  std::vector<int> r(n);
  std::iota(r.begin(), r.end(), 1);
  Rng rng(seed);
  std::shuffle(r.begin(), r.end(), rng);
  return RankAssignment(std::move(r));
}

ModelParams synthetic_params(int n) {
  ModelParams p;
  p.n = n;
  p.alpha = {0.09, 8.0};
  const double scale = 0.065;
  p.beta.cos_coeffs = {0.5 * scale, -0.5 * scale, -0.5 * scale, 0.5 * scale, 0.0};
  p.beta.peak_amp = 0.03;
  p.beta.peak_sigma = 8.0;
  return p;
}

}  // namespace statusrank
