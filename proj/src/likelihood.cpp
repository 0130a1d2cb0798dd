#include <cmath>
#include <numbers>
#include <stdexcept>

#include "statusrank/em.hpp"
#include "internal.hpp"

namespace statusrank {

namespace {

inline std::size_t at(NodeIndex v) { return static_cast<std::size_t>(v); }

double floored_log(double v) { return std::log(std::max(v, kLogFloor)); }

double unit_gaussian(double sigma, double z2) { return sigma > 0.0 ? std::exp(-0.5 * z2 / (sigma * sigma)) : 0.0; }

}  // namespace

namespace detail {

double incident_log_terms(const DirectedNetwork& net, std::span<const int> r, const RateTables& t, NodeIndex u,
                          NodeIndex v) {
  double s = 0.0;
  for (NodeIndex w : net.mutual_neighbors(u)) s += t.log_alpha[t.offset(r[at(u)] - r[at(w)])];
  for (NodeIndex w : net.claims_made(u)) s += t.log_beta[t.offset(r[at(w)] - r[at(u)])];
  for (NodeIndex w : net.claims_received(u)) s += t.log_beta[t.offset(r[at(u)] - r[at(w)])];
  for (NodeIndex w : net.mutual_neighbors(v)) {
    if (w != u) s += t.log_alpha[t.offset(r[at(v)] - r[at(w)])];
  }
  for (NodeIndex w : net.claims_made(v)) {
    if (w != u) s += t.log_beta[t.offset(r[at(w)] - r[at(v)])];
  }
  for (NodeIndex w : net.claims_received(v)) {
    if (w != u) s += t.log_beta[t.offset(r[at(v)] - r[at(w)])];
  }
  return s;
}

}  // namespace detail

RankHistograms histograms_from_ranking(const DirectedNetwork& net, std::span<const int> ranks) {
  if (ranks.size() != net.size()) throw std::invalid_argument("ranking size does not match network");
  const int n = static_cast<int>(net.size());
  RankHistograms h(n);
  for (const MutualPair& p : net.mutual()) {
    const int z = ranks[at(p.lo)] - ranks[at(p.hi)];
    h.a[h.offset(z)] += 1.0;
    h.a[h.offset(-z)] += 1.0;
  }
  for (const Claim& c : net.oneway()) h.b[h.offset(ranks[at(c.to)] - ranks[at(c.from)])] += 1.0;
  for (int z = -(n - 1); z <= n - 1; ++z) {
    const double pairs = n - std::abs(z);
    h.a[h.offset(z)] /= pairs;
    h.b[h.offset(z)] /= pairs;
  }
  return h;
}

double edge_log_likelihood(const DirectedNetwork& net, std::span<const int> ranks, const RateTables& rates) {
  double s = 0.0;
  for (const MutualPair& p : net.mutual()) s += rates.log_alpha[rates.offset(ranks[at(p.lo)] - ranks[at(p.hi)])];
  for (const Claim& c : net.oneway()) s += rates.log_beta[rates.offset(ranks[at(c.to)] - ranks[at(c.from)])];
  return s;
}

double log_likelihood(const DirectedNetwork& net, const RankAssignment& ranking, const ModelParams& params) {
  if (ranking.size() != net.size() || static_cast<std::size_t>(params.n) != net.size()) {
    throw std::invalid_argument("ranking/params size does not match network");
  }
  const RateTables rates = make_rate_tables(params);
  double rate_sum = 0.0;
  const int n = params.n;
  for (int z = 1; z < n; ++z) {
    rate_sum += (n - z) * (rates.alpha[rates.offset(z)] + rates.beta[rates.offset(z)] + rates.beta[rates.offset(-z)]);
  }
  return edge_log_likelihood(net, ranking.values(), rates) - rate_sum;
}

double swap_log_ratio(const DirectedNetwork& net, std::span<const int> ranks, const RateTables& rates, NodeIndex u,
                      NodeIndex v) {
  std::vector<int> swapped(ranks.begin(), ranks.end());
  const double before = detail::incident_log_terms(net, swapped, rates, u, v);
  std::swap(swapped[at(u)], swapped[at(v)]);
  return detail::incident_log_terms(net, swapped, rates, u, v) - before;
}

ParamVector to_vector(const ModelParams& p) {
  const auto& c = p.beta.cos_coeffs;
  return {p.alpha.amp, p.alpha.sigma, c[0], c[1], c[2], c[3], c[4], p.beta.peak_amp, p.beta.peak_sigma};
}

ModelParams from_vector(const ParamVector& v, int n) {
  ModelParams p;
  p.n = n;
  p.alpha = {v[0], v[1]};
  for (std::size_t k = 0; k < 5; ++k) p.beta.cos_coeffs[k] = v[2 + k];
  p.beta.peak_amp = v[7];
  p.beta.peak_sigma = v[8];
  return p;
}

double expected_log_likelihood(const RankHistograms& h, const ModelParams& params) {
  if (h.n != params.n) throw std::invalid_argument("histogram size does not match params");
  const int n = params.n;
  double total = 0.0;
  for (int z = 1; z < n; ++z) {
    const double al = alpha_eval(params, z);
    const double bp = beta_eval(params, z);
    const double bm = beta_eval(params, -z);
    total += (n - z) * (h.a_at(z) * floored_log(al) - al + h.b_at(z) * floored_log(bp) - bp +
                        h.b_at(-z) * floored_log(bm) - bm);
  }
  return total;
}

ParamVector expected_log_likelihood_gradient(const RankHistograms& h, const ModelParams& params) {
  if (h.n != params.n) throw std::invalid_argument("histogram size does not match params");
  const int n = params.n;
  const auto& c = params.beta.cos_coeffs;
  ParamVector g{};
  for (int z = 1; z < n; ++z) {
    const double w = n - z;
    const double z2 = static_cast<double>(z) * z;

    const double gauss_a = unit_gaussian(params.alpha.sigma, z2);
    const double al = params.alpha.amp * gauss_a;
    const double da = w * ((al > kLogFloor ? h.a_at(z) / al : 0.0) - 1.0);
    g[0] += da * gauss_a;
    if (al != 0.0) g[1] += da * al * z2 / std::pow(params.alpha.sigma, 3);

    const double gauss_b = unit_gaussian(params.beta.peak_sigma, z2);
    const double peak = params.beta.peak_amp * gauss_b;
    for (int sign : {1, -1}) {
      const int zz = sign * z;
      const double theta = std::numbers::pi * (static_cast<double>(zz) / (n - 1) + 1.0) / 2.0;
      double series = 0.0;
      std::array<double, 5> basis{};
      for (std::size_t k = 0; k < 5; ++k) {
        basis[k] = std::cos(static_cast<double>(k) * theta);
        series += c[k] * basis[k];
      }
      const double be = series * series + peak;
      const double db = w * ((be > kLogFloor ? h.b_at(zz) / be : 0.0) - 1.0);
      for (std::size_t k = 0; k < 5; ++k) g[2 + k] += db * 2.0 * series * basis[k];
      g[7] += db * gauss_b;
      if (peak != 0.0) g[8] += db * peak * z2 / std::pow(params.beta.peak_sigma, 3);
    }
  }
  return g;
}

}  // namespace statusrank
