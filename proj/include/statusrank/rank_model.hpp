#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "statusrank/network.hpp"

namespace statusrank {

/// Node ranks: position = node index, value = rank in 1..n. Always a permutation.
class RankAssignment {
 public:
  RankAssignment() = default;
  /// Throws std::invalid_argument unless `ranks` is a permutation of 1..n.
  explicit RankAssignment(std::vector<int> ranks);

  static RankAssignment identity(std::size_t n);

  std::size_t size() const noexcept { return ranks_.size(); }
  int operator[](std::size_t v) const { return ranks_[v]; }
  std::span<const int> values() const noexcept { return ranks_; }

  /// Ranks mapped k -> n + 1 - k.
  RankAssignment reversed() const;

  friend bool operator==(const RankAssignment&, const RankAssignment&) = default;

 private:
  std::vector<int> ranks_;
};

bool is_rank_permutation(std::span<const int> ranks);

struct AlphaParams {
  double amp = 0.1;
  double sigma = 8.0;  // raw rank units
};

/// beta(z) = (sum_k c_k cos(k pi (u + 1) / 2))^2 + peak_amp exp(-z^2 / (2 peak_sigma^2)),
/// with u = z / (n - 1).
struct BetaParams {
  static constexpr int kTerms = 5;
  std::array<double, kTerms> cos_coeffs{};
  double peak_amp = 0.0;
  double peak_sigma = 8.0;
};

struct ModelParams {
  AlphaParams alpha;
  BetaParams beta;
  int n = 2;
};

/// Rejects non-finite values, negative amplitudes, non-positive widths
/// (a width is ignored when its amplitude is zero), and n < 2.
void validate(const ModelParams& p);

/// Floor applied before taking logs of alpha/beta.
inline constexpr double kLogFloor = 1e-12;

double alpha_eval(const ModelParams& p, int z);
double beta_eval(const ModelParams& p, int z);
/// The squared cosine series alone.
double beta_tail_eval(const ModelParams& p, int z);
/// The central Gaussian of beta alone.
double beta_peak_eval(const ModelParams& p, int z);

/// Tables of alpha/beta over z in [-(n-1), n-1], indexed by z + n - 1.
struct RateTables {
  int n = 0;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> log_alpha;  // floored
  std::vector<double> log_beta;   // floored
  std::size_t offset(int z) const { return static_cast<std::size_t>(z + n - 1); }
};
RateTables make_rate_tables(const ModelParams& p);

/// Samples a network from the ranked random graph model. Each unordered pair
/// gets a mutual edge with probability 1 - exp(-alpha); each ordered pair gets a
/// claim j -> i (j names i) with probability 1 - exp(-beta(r_i - r_j)). A pair
/// that draws a mutual edge or both claims is stored as one mutual pair.
/// Node labels are "0".."n-1".
DirectedNetwork generate_network(const RankAssignment& truth, const ModelParams& p, std::uint64_t seed);

/// Uniformly random permutation of 1..n.
RankAssignment random_ranking(std::size_t n, std::uint64_t seed);

/// Synthetic benchmark parameters: Gaussian alpha of width 8 and a beta with a
/// rising upward tail plus a central peak, giving mean total degree close to 8
/// at n = 500.
ModelParams synthetic_params(int n = 500);

}  // namespace statusrank
