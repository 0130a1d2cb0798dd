#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace statusrank::stats {

double mean(std::span<const double> x);
/// Standard error of the mean; 0 for fewer than two values.
double standard_error(std::span<const double> x);

/// Average ranks (1-based), ties sharing their mean rank.
std::vector<double> fractional_ranks(std::span<const double> x);
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

/// Kolmogorov-Smirnov distance between the sample and uniform on [0, 1].
double ks_uniform_statistic(std::span<const double> sample);
/// Two-sided p-value of the KS statistic for sample size n (asymptotic
/// Kolmogorov distribution with the Stephens small-sample correction).
double ks_pvalue(double d, std::size_t n);

/// One-way ANOVA F over groups given as labels 0..k-1. NaN when undefined.
double anova_f(std::span<const double> values, std::span<const int> groups, int k);
/// Welch t statistic of group a vs group b. NaN when undefined.
double welch_t(std::span<const double> values, std::span<const int> groups, int a, int b);

}  // namespace statusrank::stats
