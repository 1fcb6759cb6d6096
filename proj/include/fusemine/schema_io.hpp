#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fusemine/table.hpp"
#include "json.hpp"

namespace fusemine {

// Schema documents list {name, kind, labels?, role} per attribute.
nlohmann::json schema_to_json(const std::vector<AttributeSpec>& specs);
std::vector<AttributeSpec> schema_from_json(const nlohmann::json& doc);

// A bundle directory holds <source>.csv for each source plus schema.json,
// an object mapping source name to its attribute list.
void save_bundle(const SourceBundle& bundle, const std::filesystem::path& dir);
SourceBundle load_bundle(const std::filesystem::path& dir);

}  // namespace fusemine
