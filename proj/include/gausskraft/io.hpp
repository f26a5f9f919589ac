#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gausskraft/admissibility.hpp"
#include "gausskraft/ingest.hpp"
#include "gausskraft/solver.hpp"
#include "gausskraft/transport.hpp"

namespace gausskraft {

using Json = nlohmann::ordered_json;

/// Serializes with every floating-point number printed as %.17g, so equal
/// values always give identical text. Non-finite numbers become null.
std::string dump_json(const Json& value, int indent = 2);

/// Reads and parses a JSON file. Throws ParseError.
Json read_json_file(const std::filesystem::path& path);

/// {"dimension", "points", "mu"}. Points are normalized; 2-coordinate points
/// are accepted for dimension 1. Throws ParseError on malformed content.
ProblemInstance instance_from_json(const Json& j);
Json instance_to_json(const ProblemInstance& instance);
ProblemInstance load_instance(const std::filesystem::path& path);

/// {"kind": "uniform"} | {"kind": "cosine_power_bump", "axis", "power",
/// "floor"} | {"kind": "tabulated", "level", "values"}.
DensitySpec density_from_json(const Json& j);
Json density_to_json(const DensitySpec& density);

/// A density file path, or one of the names "uniform" and "bump" (axis e₃,
/// power 2, floor 0.1).
DensitySpec load_density(const std::string& path_or_name);

Json report_to_json(const AdmissibilityReport& report);
Json config_to_json(const SolveConfig& config);
Json solution_to_json(const SolveReport& report, const SolveConfig& config, double duality_gap);
Json plan_to_json(const LpResult& result);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gausskraft
