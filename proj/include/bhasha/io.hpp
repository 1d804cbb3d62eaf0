#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace bhasha {

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view content);

// Blank lines are skipped; a line that is not a JSON object is a DataError
// naming the file and line.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const nlohmann::json&, std::size_t line_no)>& fn);
std::string to_jsonl(const std::vector<nlohmann::json>& records);

}  // namespace bhasha
