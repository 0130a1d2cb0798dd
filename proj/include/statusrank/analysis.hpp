#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "statusrank/em.hpp"
#include "statusrank/network.hpp"

namespace statusrank {

/// Carrier for one plotted curve. x, y and (when present) yerr have equal length.
struct FigureSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> yerr;
  std::map<std::string, std::string> metadata;
};

void write_series_csv(std::ostream& out, const FigureSeries& series);

/// (mean_rank - 1) / (n - 1), in [0, 1].
std::vector<double> rescale_ranks(const PosteriorSummary& posterior, int n);

/// Curves of the fitted model against the observed histograms:
///  - a(z), b(z), alpha(z), beta(z) against z / (n - 1);
///  - alpha and the central beta peak against z / mean degree;
///  - beta minus its central peak against z / (n - 1), divided by the mean
///    per-pair edge probability (2|S| + |T|) / (n (n - 1)).
/// `net` must be the network the fit was run on (any node order).
std::vector<FigureSeries> histogram_series(const FitResult& fit, const DirectedNetwork& net);

struct DegreeRankCurves {
  std::vector<FigureSeries> series;  // in, out, total
  double spearman_in = 0.0;
  double spearman_out = 0.0;
  double spearman_total = 0.0;
};

/// Mean rescaled rank per exact degree value with standard errors. Bins with
/// fewer than 5 nodes carry metadata flags.
DegreeRankCurves degree_rank_curves(const FitResult& fit, const DirectedNetwork& net);

/// Per-node categorical attributes keyed by label. Missing values are nullopt.
class AttributeTable {
 public:
  AttributeTable() = default;
  AttributeTable(std::vector<std::string> columns, std::map<std::string, std::vector<std::optional<std::string>>> rows);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::size_t size() const noexcept { return rows_.size(); }
  /// Value of `column` for `label`, nullopt when missing or unknown.
  std::optional<std::string> value(const std::string& label, const std::string& column) const;

 private:
  std::vector<std::string> columns_;
  std::map<std::string, std::vector<std::optional<std::string>>> rows_;
};

/// CSV with a header row; first column is the node label. Empty cells and
/// "NA" are missing. Throws ParseError on ragged rows or duplicate labels.
AttributeTable parse_attributes(std::istream& in);
AttributeTable read_attributes(const std::string& path);

struct GroupSummary {
  std::string value;
  std::size_t count = 0;
  double mean_rescaled_rank = 0.0;
  double stderr_rescaled_rank = 0.0;
  double ks_d = 0.0;  // against uniform on [0, 1]
};

struct ContrastResult {
  std::string group_a;
  std::string group_b;
  double t_statistic = 0.0;
  double p_value = 1.0;  // two-sided permutation p
};

struct AttributeSummary {
  std::string column;
  std::vector<GroupSummary> groups;
  std::size_t nodes_used = 0;
  /// Absent when fewer than two groups are present.
  std::optional<double> f_statistic;
  std::optional<double> f_p_value;
  std::vector<ContrastResult> contrasts;
};

struct AttributeOptions {
  int permutations = 10000;
  std::uint64_t seed = 1;
  /// Pairs to contrast per column; when a column has none listed, consecutive
  /// groups in sorted order (numeric when every value parses) are used.
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> contrasts;
};

/// Group means, KS distances from uniform, and label-shuffling p-values for
/// the one-way F statistic and pairwise Welch t statistics.
std::vector<AttributeSummary> attribute_rank_summary(const FitResult& fit, const AttributeTable& attrs,
                                                     const AttributeOptions& options = {});

}  // namespace statusrank
