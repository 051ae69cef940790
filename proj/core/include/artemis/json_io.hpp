#pragma once

#include <filesystem>

#include <json.hpp>

namespace artemis {

// DataError when the file is missing or not valid JSON.
nlohmann::json read_json(const std::filesystem::path& path);

// Pretty-printed, newline-terminated; output is byte-stable for equal input.
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace artemis
