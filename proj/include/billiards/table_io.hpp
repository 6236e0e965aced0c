#pragma once
// JSON table description files:
//   {"walls":[{"kind":"segment","p0":[x,y],"p1":[x,y]},
//             {"kind":"arc","center":[x,y],"radius":r,"from":a0,"to":a1,
//              "interior":"outside"|"inside"}]}

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "billiards/geometry.hpp"

namespace billiards {

nlohmann::json table_to_json(const Table& table);

/// Throws InvalidArgument on schema errors or when the walls do not form a valid table.
Table table_from_json(const nlohmann::json& doc);

Table load_table(const std::filesystem::path& path);
void save_table(const Table& table, const std::filesystem::path& path);

}  // namespace billiards
