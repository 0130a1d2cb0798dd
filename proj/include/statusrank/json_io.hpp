#pragma once

#include <string>

#include <json.hpp>

#include "statusrank/analysis.hpp"
#include "statusrank/em.hpp"
#include "statusrank/mvr.hpp"
#include "statusrank/rank_model.hpp"

namespace statusrank {

using Json = nlohmann::ordered_json;

/// Malformed or out-of-range JSON input.
class JsonFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const ModelParams& p);
/// Validates the result.
ModelParams model_params_from_json(const Json& j);

Json to_json(const ViolationReport& r);
ViolationReport violation_report_from_json(const Json& j);

Json to_json(const McmcConfig& c);
Json to_json(const EmConfig& c);

/// Core fields (params, posterior, histograms, objective_trace, em_iterations,
/// converged) followed by diagnostics.
Json to_json(const FitResult& fit);
/// Reads the core fields; diagnostics are optional.
FitResult fit_result_from_json(const Json& j);

Json to_json(const FigureSeries& s);
Json to_json(const AttributeSummary& s);

Json parse_json_file(const std::string& path);
/// Two-space indentation and a trailing newline.
void write_json_file(const std::string& path, const Json& j);

}  // namespace statusrank
