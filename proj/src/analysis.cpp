#include "statusrank/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "statusrank/random.hpp"
#include "statusrank/stats.hpp"

namespace statusrank {

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<double> rescaled_by_network_index(const FitResult& fit, const DirectedNetwork& net) {
  if (fit.labels.size() != net.size()) throw std::invalid_argument("fit and network have different node counts");
  const std::vector<double> s = rescale_ranks(fit.posterior, static_cast<int>(net.size()));
  std::vector<double> out(net.size());
  for (std::size_t i = 0; i < fit.labels.size(); ++i) {
    const auto v = net.index_of(fit.labels[i]);
    if (!v) throw std::invalid_argument("fit label '" + fit.labels[i] + "' is not in the network");
    out[static_cast<std::size_t>(*v)] = s[i];
  }
  return out;
}

}  // namespace

void write_series_csv(std::ostream& out, const FigureSeries& series) {
  if (series.x.size() != series.y.size() || (!series.yerr.empty() && series.yerr.size() != series.x.size())) {
    throw std::invalid_argument("series '" + series.name + "' has arrays of different length");
  }
  out << "# series: " << series.name << '\n';
  for (const auto& [key, value] : series.metadata) out << "# " << key << ": " << value << '\n';
  out << (series.yerr.empty() ? "x,y\n" : "x,y,yerr\n");
  for (std::size_t i = 0; i < series.x.size(); ++i) {
    out << format_number(series.x[i]) << ',' << format_number(series.y[i]);
    if (!series.yerr.empty()) out << ',' << format_number(series.yerr[i]);
    out << '\n';
  }
}

std::vector<double> rescale_ranks(const PosteriorSummary& posterior, int n) {
  if (n < 2) throw std::invalid_argument("rescale_ranks needs n >= 2");
  std::vector<double> s;
  s.reserve(posterior.mean_rank.size());
  for (double r : posterior.mean_rank) s.push_back((r - 1.0) / static_cast<double>(n - 1));
  return s;
}

std::vector<FigureSeries> histogram_series(const FitResult& fit, const DirectedNetwork& net) {
  const int n = fit.params.n;
  if (static_cast<std::size_t>(n) != net.size() || fit.histograms.n != n) {
    throw std::invalid_argument("fit does not belong to this network");
  }
  const double mean_degree = degree_summary(net).mean_degree;
  const double pairs = static_cast<double>(n) * (n - 1);
  const double edge_probability = (2.0 * net.mutual().size() + net.oneway().size()) / pairs;
  const ModelParams& p = fit.params;

  auto make = [&](std::string name, std::string normalization, std::string x_axis) {
    FigureSeries s;
    s.name = std::move(name);
    s.metadata["normalization"] = std::move(normalization);
    s.metadata["x"] = std::move(x_axis);
    s.metadata["n"] = std::to_string(n);
    s.metadata["mutual_pairs"] = std::to_string(net.mutual().size());
    s.metadata["oneway_claims"] = std::to_string(net.oneway().size());
    return s;
  };

  const std::string per_pair = "expected edges per ordered node pair";
  FigureSeries a_obs = make("reciprocated_expected", per_pair, "z/(n-1)");
  FigureSeries a_fit = make("reciprocated_fitted", per_pair, "z/(n-1)");
  FigureSeries b_obs = make("oneway_expected", per_pair, "z/(n-1)");
  FigureSeries b_fit = make("oneway_fitted", per_pair, "z/(n-1)");
  for (int z = -(n - 1); z <= n - 1; ++z) {
    const double x = static_cast<double>(z) / (n - 1);
    for (FigureSeries* s : {&a_obs, &a_fit, &b_obs, &b_fit}) s->x.push_back(x);
    a_obs.y.push_back(fit.histograms.a_at(z));
    a_fit.y.push_back(alpha_eval(p, z));
    b_obs.y.push_back(fit.histograms.b_at(z));
    b_fit.y.push_back(beta_eval(p, z));
  }

  // Central window: five mean degrees either side.
  const int reach = std::min(n - 1, static_cast<int>(std::ceil(5.0 * mean_degree)));
  FigureSeries a_peak = make("peak_reciprocated", per_pair, "z/mean_degree");
  FigureSeries b_peak = make("peak_oneway", per_pair + ", central Gaussian of beta only", "z/mean_degree");
  for (FigureSeries* s : {&a_peak, &b_peak}) {
    s->metadata["mean_degree"] = format_number(mean_degree);
    s->metadata["max_abs_z"] = std::to_string(reach);
  }
  for (int z = -reach; z <= reach; ++z) {
    const double x = static_cast<double>(z) / mean_degree;
    a_peak.x.push_back(x);
    b_peak.x.push_back(x);
    a_peak.y.push_back(alpha_eval(p, z));
    b_peak.y.push_back(beta_peak_eval(p, z));
  }

  FigureSeries tail = make("oneway_tail", "(beta - central Gaussian) / mean edge probability per pair", "z/(n-1)");
  tail.metadata["edge_probability"] = format_number(edge_probability);
  for (int z = -(n - 1); z <= n - 1; ++z) {
    tail.x.push_back(static_cast<double>(z) / (n - 1));
    tail.y.push_back(edge_probability > 0.0 ? beta_tail_eval(p, z) / edge_probability : 0.0);
  }

  return {a_obs, a_fit, b_obs, b_fit, a_peak, b_peak, tail};
}

DegreeRankCurves degree_rank_curves(const FitResult& fit, const DirectedNetwork& net) {
  const std::vector<double> s = rescaled_by_network_index(fit, net);
  const DegreeSummary deg = degree_summary(net);

  DegreeRankCurves result;
  auto curve = [&](const std::string& name, const std::vector<int>& degree, double& rho) {
    std::map<int, std::vector<double>> bins;
    for (std::size_t v = 0; v < s.size(); ++v) bins[degree[v]].push_back(s[v]);
    FigureSeries series;
    series.name = name;
    series.metadata["normalization"] = "mean rescaled rank (r-1)/(n-1) per exact degree";
    series.metadata["n"] = std::to_string(net.size());
    std::string sparse;
    for (const auto& [d, values] : bins) {
      series.x.push_back(d);
      series.y.push_back(stats::mean(values));
      series.yerr.push_back(stats::standard_error(values));
      if (values.size() < 5) sparse += (sparse.empty() ? "" : " ") + std::to_string(d);
    }
    series.metadata["bins_below_5_nodes"] = sparse;
    const std::vector<double> dd(degree.begin(), degree.end());
    rho = stats::spearman(dd, s);
    series.metadata["spearman"] = format_number(rho);
    result.series.push_back(std::move(series));
  };
  curve("rank_by_in_degree", deg.in_degree, result.spearman_in);
  curve("rank_by_out_degree", deg.out_degree, result.spearman_out);
  curve("rank_by_total_degree", deg.total_degree, result.spearman_total);
  return result;
}

AttributeTable::AttributeTable(std::vector<std::string> columns,
                               std::map<std::string, std::vector<std::optional<std::string>>> rows)
    : columns_(std::move(columns)), rows_(std::move(rows)) {
  for (const auto& [label, values] : rows_) {
    if (values.size() != columns_.size()) throw std::invalid_argument("attribute row '" + label + "' is ragged");
  }
}

std::optional<std::string> AttributeTable::value(const std::string& label, const std::string& column) const {
  const auto row = rows_.find(label);
  if (row == rows_.end()) return std::nullopt;
  const auto col = std::find(columns_.begin(), columns_.end(), column);
  if (col == columns_.end()) return std::nullopt;
  return row->second[static_cast<std::size_t>(col - columns_.begin())];
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

/// Splits one CSV record. Quoted fields may hold commas and doubled quotes.
std::vector<std::optional<std::string>> split_record(const std::string& line, std::size_t line_no) {
  std::vector<std::optional<std::string>> fields;
  std::size_t i = 0;
  while (true) {
    std::string field;
    bool quoted = false;
    const std::size_t start = i;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i < line.size() && line[i] == '"') {
      quoted = true;
      ++i;
      while (true) {
        if (i >= line.size()) throw ParseError(line_no, "unterminated quoted field");
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        field += line[i++];
      }
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i < line.size() && line[i] != ',') throw ParseError(line_no, "text after closing quote");
    } else {
      i = start;
      const std::size_t comma = line.find(',', i);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      field = trim(std::string_view(line).substr(i, end - i));
      i = end;
    }
    if (!quoted && (field.empty() || field == "NA")) {
      fields.emplace_back(std::nullopt);
    } else {
      fields.emplace_back(std::move(field));
    }
    if (i >= line.size()) break;
    ++i;  // comma
  }
  return fields;
}

}  // namespace

AttributeTable parse_attributes(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::map<std::string, std::vector<std::optional<std::string>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_record(line, line_no);
    if (header.empty()) {
      if (fields.size() < 2) throw ParseError(line_no, "attribute header needs a label column and one attribute");
      for (std::size_t k = 1; k < fields.size(); ++k) {
        if (!fields[k]) throw ParseError(line_no, "empty attribute column name");
        header.push_back(*fields[k]);
      }
      continue;
    }
    if (fields.size() != header.size() + 1) {
      throw ParseError(line_no, "expected " + std::to_string(header.size() + 1) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    if (!fields[0]) throw ParseError(line_no, "missing node label");
    std::string label = std::move(*fields[0]);
    fields.erase(fields.begin());
    if (!rows.emplace(label, std::move(fields)).second) throw ParseError(line_no, "duplicate node label '" + label + "'");
  }
  if (header.empty()) throw ParseError(line_no, "attribute file has no header");
  return AttributeTable(std::move(header), std::move(rows));
}

AttributeTable read_attributes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open attribute file " + path);
  return parse_attributes(in);
}

namespace {

std::optional<double> as_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Group values in display order: numeric when every value parses, else lexicographic.
std::vector<std::string> ordered_groups(std::vector<std::string> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const bool numeric = std::all_of(values.begin(), values.end(), [](const std::string& v) { return as_number(v).has_value(); });
  if (numeric) {
    std::stable_sort(values.begin(), values.end(),
                     [](const std::string& a, const std::string& b) { return *as_number(a) < *as_number(b); });
  }
  return values;
}

bool at_least(double perm, double observed) {
  return perm >= observed - 1e-12 * std::abs(observed);
}

}  // namespace

std::vector<AttributeSummary> attribute_rank_summary(const FitResult& fit, const AttributeTable& attrs,
                                                     const AttributeOptions& options) {
  if (options.permutations < 1) throw std::invalid_argument("permutations must be positive");
  const std::vector<double> rescaled = rescale_ranks(fit.posterior, static_cast<int>(fit.labels.size()));

  std::vector<AttributeSummary> report;
  std::size_t covered = 0;
  for (const std::string& column : attrs.columns()) {
    AttributeSummary summary;
    summary.column = column;

    std::vector<std::string> raw;
    std::vector<double> values;
    for (std::size_t i = 0; i < fit.labels.size(); ++i) {
      if (auto v = attrs.value(fit.labels[i], column)) {
        raw.push_back(std::move(*v));
        values.push_back(rescaled[i]);
      }
    }
    summary.nodes_used = values.size();
    covered = std::max(covered, values.size());
    const std::vector<std::string> names = ordered_groups(raw);
    std::map<std::string, int> group_of;
    for (std::size_t g = 0; g < names.size(); ++g) group_of[names[g]] = static_cast<int>(g);
    std::vector<int> groups;
    groups.reserve(raw.size());
    for (const std::string& v : raw) groups.push_back(group_of.at(v));

    for (std::size_t g = 0; g < names.size(); ++g) {
      std::vector<double> members;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (groups[i] == static_cast<int>(g)) members.push_back(values[i]);
      }
      summary.groups.push_back({names[g], members.size(), stats::mean(members), stats::standard_error(members),
                                stats::ks_uniform_statistic(members)});
    }

    const int k = static_cast<int>(names.size());
    if (k >= 2) {
      const double f = stats::anova_f(values, groups, k);
      if (!std::isnan(f)) {
        Rng rng(derive_seed(options.seed, "anova:" + column));
        std::vector<int> shuffled = groups;
        int hits = 0;
        for (int b = 0; b < options.permutations; ++b) {
          std::shuffle(shuffled.begin(), shuffled.end(), rng);
          if (at_least(stats::anova_f(values, shuffled, k), f)) ++hits;
        }
        summary.f_statistic = f;
        summary.f_p_value = (1.0 + hits) / (1.0 + options.permutations);
      }

      std::vector<std::pair<std::string, std::string>> pairs;
      if (const auto it = options.contrasts.find(column); it != options.contrasts.end()) {
        pairs = it->second;
      } else {
        for (std::size_t g = 0; g + 1 < names.size(); ++g) pairs.emplace_back(names[g], names[g + 1]);
      }
      for (const auto& [name_a, name_b] : pairs) {
        const auto ga = group_of.find(name_a), gb = group_of.find(name_b);
        if (ga == group_of.end() || gb == group_of.end() || ga == gb) continue;
        std::vector<double> sub_values;
        std::vector<int> sub_groups;
        for (std::size_t i = 0; i < values.size(); ++i) {
          if (groups[i] == ga->second || groups[i] == gb->second) {
            sub_values.push_back(values[i]);
            sub_groups.push_back(groups[i] == ga->second ? 0 : 1);
          }
        }
        const double t = stats::welch_t(sub_values, sub_groups, 0, 1);
        if (std::isnan(t)) continue;
        Rng rng(derive_seed(options.seed, "contrast:" + column + ":" + name_a + ":" + name_b));
        int hits = 0;
        for (int b = 0; b < options.permutations; ++b) {
          std::shuffle(sub_groups.begin(), sub_groups.end(), rng);
          const double tp = stats::welch_t(sub_values, sub_groups, 0, 1);
          if (!std::isnan(tp) && at_least(std::abs(tp), std::abs(t))) ++hits;
        }
        summary.contrasts.push_back({name_a, name_b, t, (1.0 + hits) / (1.0 + options.permutations)});
      }
    }
    report.push_back(std::move(summary));
  }
  if (covered == 0) throw std::invalid_argument("attribute table covers none of the fitted nodes");
  return report;
}

}  // namespace statusrank
