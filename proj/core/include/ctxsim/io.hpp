#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctxsim/types.hpp"

namespace ctxsim::io {

using OrderedJson = nlohmann::ordered_json;

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Write-temp-then-rename so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Dataset JSONL: one LabeledPair per line with keys in the order
// id, source, lang, label, graded_score, s1, t1, s2, t2.
OrderedJson pair_to_json(const LabeledPair& pair);
LabeledPair pair_from_json(const nlohmann::json& j);
std::string dataset_to_jsonl(const std::vector<LabeledPair>& pairs);
void write_dataset(const std::filesystem::path& path, const std::vector<LabeledPair>& pairs);
std::vector<LabeledPair> read_dataset(const std::filesystem::path& path);

}  // namespace ctxsim::io
