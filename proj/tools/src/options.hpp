#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ctxsim::cli {

enum class Kind { kString, kPath, kInt, kUInt, kReal, kRealList, kIntList, kStringList };

// One flag, one config key: "--max-len" <-> "max_len".
struct Param {
  std::string name;
  Kind kind;
  nlohmann::json default_value;  // null = unset
  std::string help;
};

using Params = std::vector<Param>;

std::string config_key(const std::string& flag_name);

// Defaults, then the --config document, then explicit flags.
nlohmann::ordered_json resolve(const std::string& command, const Params& params,
                               const nlohmann::json* file_config,
                               const std::map<std::string, std::string>& flags);

class Resolved {
 public:
  explicit Resolved(nlohmann::ordered_json j) : j_(std::move(j)) {}

  const nlohmann::ordered_json& json() const { return j_; }
  bool has(const std::string& key) const;

  std::string str(const std::string& key) const;
  std::filesystem::path path(const std::string& key) const;
  // Path that must be set and exist; `format` describes the expected contents.
  std::filesystem::path input(const std::string& key, const std::string& format) const;
  std::optional<std::filesystem::path> optional_input(const std::string& key,
                                                      const std::string& format) const;
  long long integer(const std::string& key) const;
  std::uint64_t uinteger(const std::string& key) const;
  double real(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;
  std::vector<std::string> strings(const std::string& key) const;

 private:
  const nlohmann::ordered_json& at(const std::string& key) const;
  nlohmann::ordered_json j_;
};

}  // namespace ctxsim::cli
