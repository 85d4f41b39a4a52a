#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "umbilic/flowlines.hpp"
#include "umbilic/umbilic.hpp"

namespace umb {

using Json = nlohmann::json;

/// Strict per-family schema: "family" plus exactly the family's parameters.
/// Throws InvalidSpec.
SurfaceSpec spec_from_json(const Json& j);
Json spec_to_json(const SurfaceSpec& spec);
SurfaceSpec load_spec(const std::string& path);

/// Sorted keys, doubles printed with %.17g, two-space indent.
std::string dump_json(const Json& j);

Json forms_to_json(const ChartPoint& cp, const FundamentalForms& ff, const CurvatureSummary& cs);
Json umbilic_to_json(const UmbilicRecord& rec);
Json umbilics_to_json(const std::vector<UmbilicRecord>& records);

}  // namespace umb
