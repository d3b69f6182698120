#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "proxctl/analysis.hpp"
#include "proxctl/experiment.hpp"
#include "proxctl/metrics.hpp"
#include "proxctl/problem.hpp"
#include "proxctl/solvers.hpp"

namespace proxctl {

using Json = nlohmann::json;

// Instance file: {m, n, A (row-major flat array), y, x_true?, seed?}.
Json instance_to_json(const ProblemInstance& p);
ProblemInstance instance_from_json(const Json& j);

// Spec file; missing fields take ExperimentSpec defaults, unknown fields are
// rejected. Errors are ValidationError naming the field.
Json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const Json& j);

Json recipe_to_json(const SolverRecipe& r);
SolverRecipe recipe_from_json(const Json& j, const std::string& where);

Json config_to_json(const SolverConfig& c);
Json summary_to_json(const RunSummary& s);
RunSummary summary_from_json(const Json& j);
Json stats_to_json(const AggregateStats& a);
Json certificate_to_json(const ContractionCertificate& c);
Json report_to_json(const EquilibriumReport& r);

/// Sets `dotted.path` in `target` to `value`, parsed as JSON when possible and
/// kept as a string otherwise. Array elements are addressed by index.
void apply_override(Json& target, std::string_view dotted_path, std::string_view value);

Json read_json(const std::filesystem::path& path);
/// Writes through a temporary file and renames, so readers never see a partial file.
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace proxctl
