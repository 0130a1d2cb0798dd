#include "statusrank/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace statusrank::stats {

double mean(std::span<const double> x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double standard_error(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double k = static_cast<double>(x.size());
  return std::sqrt(ss / (k - 1.0) / k);
}

std::vector<double> fractional_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double shared = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  return pearson(rx, ry);
}

double ks_uniform_statistic(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("KS statistic of an empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = std::clamp(s[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  if (n == 0) throw std::invalid_argument("KS p-value needs n > 0");
  const double root = std::sqrt(static_cast<double>(n));
  const double lambda = (root + 0.12 + 0.11 / root) * d;
  if (lambda < 1e-3) return 1.0;
  // Kolmogorov tail series 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

struct GroupMoments {
  std::vector<double> sum;
  std::vector<double> sum_sq;
  std::vector<std::size_t> count;
};

GroupMoments moments(std::span<const double> values, std::span<const int> groups, int k) {
  if (values.size() != groups.size()) throw std::invalid_argument("values/groups length mismatch");
  GroupMoments m{std::vector<double>(static_cast<std::size_t>(k), 0.0),
                 std::vector<double>(static_cast<std::size_t>(k), 0.0),
                 std::vector<std::size_t>(static_cast<std::size_t>(k), 0)};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto g = static_cast<std::size_t>(groups[i]);
    m.sum[g] += values[i];
    m.sum_sq[g] += values[i] * values[i];
    ++m.count[g];
  }
  return m;
}

}  // namespace

double anova_f(std::span<const double> values, std::span<const int> groups, int k) {
  const GroupMoments m = moments(values, groups, k);
  const double grand = mean(values);
  const double total_n = static_cast<double>(values.size());
  double between = 0.0, within = 0.0;
  int present = 0;
  for (std::size_t g = 0; g < m.count.size(); ++g) {
    if (m.count[g] == 0) continue;
    ++present;
    const double c = static_cast<double>(m.count[g]);
    const double gm = m.sum[g] / c;
    between += c * (gm - grand) * (gm - grand);
    within += m.sum_sq[g] - c * gm * gm;
  }
  const double df_between = present - 1;
  const double df_within = total_n - present;
  if (df_between <= 0 || df_within <= 0) return std::numeric_limits<double>::quiet_NaN();
  within = std::max(within, 0.0);
  if (within == 0.0) return between > 0.0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
  return (between / df_between) / (within / df_within);
}

double welch_t(std::span<const double> values, std::span<const int> groups, int a, int b) {
  double sa = 0, sqa = 0, sb = 0, sqb = 0;
  double na = 0, nb = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (groups[i] == a) {
      sa += values[i];
      sqa += values[i] * values[i];
      na += 1;
    } else if (groups[i] == b) {
      sb += values[i];
      sqb += values[i] * values[i];
      nb += 1;
    }
  }
  if (na < 2 || nb < 2) return std::numeric_limits<double>::quiet_NaN();
  const double ma = sa / na, mb = sb / nb;
  const double va = std::max(0.0, (sqa - na * ma * ma) / (na - 1));
  const double vb = std::max(0.0, (sqb - nb * mb * mb) / (nb - 1));
  const double se = std::sqrt(va / na + vb / nb);
  if (se == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (ma - mb) / se;
}

}  // namespace statusrank::stats
