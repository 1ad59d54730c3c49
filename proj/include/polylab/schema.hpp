#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace polylab {

/// Checks `doc` against a JSON Schema restricted to the keywords used by the
/// published schema files: $ref (local "#/definitions/…"), type, enum,
/// required, properties, additionalProperties, items, minimum, maximum,
/// exclusiveMinimum, exclusiveMaximum, oneOf. Returns one message per
/// violation, each prefixed with the JSON pointer of the offending value.
std::vector<std::string> validate_schema(const nlohmann::json& doc, const nlohmann::json& schema);

/// Text of the published schema files, embedded at build time.
const char* report_schema_text();
const char* config_schema_text();

nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace polylab
