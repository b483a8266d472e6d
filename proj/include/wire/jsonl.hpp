#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

namespace wire {

using json = nlohmann::json;

// Line-delimited JSON records, one object per line. Every pipeline artifact
// (rules, clauses, candidates, witnesses, trials) is stored this way.
std::vector<json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);
void append_jsonl(const std::filesystem::path& path, const json& record);

}  // namespace wire
