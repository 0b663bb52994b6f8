#include "options.hpp"

#include <cstdlib>

#include "ctxsim/errors.hpp"
#include "ctxsim/text.hpp"

namespace ctxsim::cli {

std::string config_key(const std::string& flag_name) {
  std::string key = flag_name;
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  return key;
}

namespace {

long long to_int(const std::string& flag, const std::string& text) {
  char* end = nullptr;
  const long long v = std::strtoll(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0') {
    throw InvalidConfig("--" + flag + ": '" + text + "' is not an integer");
  }
  return v;
}

double to_real(const std::string& flag, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') {
    throw InvalidConfig("--" + flag + ": '" + text + "' is not a number");
  }
  return v;
}

std::vector<std::string> list_items(const std::string& text) {
  std::vector<std::string> out;
  if (text::trim(text).empty()) return out;
  for (const auto& item : text::split(text, ',')) out.push_back(text::trim(item));
  return out;
}

nlohmann::json from_text(const Param& p, const std::string& text) {
  switch (p.kind) {
    case Kind::kString:
    case Kind::kPath:
      return text;
    case Kind::kInt:
      return to_int(p.name, text);
    case Kind::kUInt: {
      const long long v = to_int(p.name, text);
      if (v < 0) throw InvalidConfig("--" + p.name + " must be non-negative");
      return static_cast<std::uint64_t>(v);
    }
    case Kind::kReal:
      return to_real(p.name, text);
    case Kind::kRealList: {
      auto arr = nlohmann::json::array();
      for (const auto& item : list_items(text)) arr.push_back(to_real(p.name, item));
      return arr;
    }
    case Kind::kIntList: {
      auto arr = nlohmann::json::array();
      for (const auto& item : list_items(text)) arr.push_back(to_int(p.name, item));
      return arr;
    }
    case Kind::kStringList: {
      auto arr = nlohmann::json::array();
      for (const auto& item : list_items(text)) arr.push_back(item);
      return arr;
    }
  }
  return nullptr;
}

// Config documents may use native JSON values or the flag's text syntax.
nlohmann::json from_config(const Param& p, const nlohmann::json& v) {
  if (v.is_null()) return v;
  if (v.is_string()) return from_text(p, v.get<std::string>());
  const std::string where = "config key '" + config_key(p.name) + "'";
  switch (p.kind) {
    case Kind::kString:
    case Kind::kPath:
      break;
    case Kind::kInt:
      if (v.is_number_integer()) return v;
      break;
    case Kind::kUInt:
      if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
        return v.get<std::uint64_t>();
      }
      break;
    case Kind::kReal:
      if (v.is_number()) return v.get<double>();
      break;
    case Kind::kRealList:
    case Kind::kIntList:
    case Kind::kStringList: {
      if (!v.is_array()) break;
      auto arr = nlohmann::json::array();
      for (const auto& item : v) {
        if (p.kind == Kind::kStringList && item.is_string()) {
          arr.push_back(item);
        } else if (p.kind == Kind::kRealList && item.is_number()) {
          arr.push_back(item.get<double>());
        } else if (p.kind == Kind::kIntList && item.is_number_integer()) {
          arr.push_back(item);
        } else {
          throw InvalidConfig(where + ": unexpected list element " + item.dump());
        }
      }
      return arr;
    }
  }
  throw InvalidConfig(where + ": unexpected value " + v.dump());
}

}  // namespace

nlohmann::ordered_json resolve(const std::string& command, const Params& params,
                               const nlohmann::json* file_config,
                               const std::map<std::string, std::string>& flags) {
  nlohmann::ordered_json out;
  out["command"] = command;
  for (const auto& p : params) out[config_key(p.name)] = p.default_value;

  if (file_config) {
    if (!file_config->is_object()) throw InvalidConfig("--config must hold a JSON object");
    for (const auto& [key, value] : file_config->items()) {
      if (key == "command") {
        if (value != command) {
          throw InvalidConfig("config was written for command '" + value.dump() + "', not '" +
                              command + "'");
        }
        continue;
      }
      const Param* match = nullptr;
      for (const auto& p : params) {
        if (config_key(p.name) == key) match = &p;
      }
      if (!match) throw InvalidConfig("unknown config key '" + key + "' for " + command);
      out[key] = from_config(*match, value);
    }
  }
  for (const auto& p : params) {
    const auto it = flags.find(p.name);
    if (it != flags.end()) out[config_key(p.name)] = from_text(p, it->second);
  }
  return out;
}

const nlohmann::ordered_json& Resolved::at(const std::string& key) const {
  if (!j_.contains(key)) throw InvalidConfig("internal: no option '" + key + "'");
  const auto& v = j_.at(key);
  if (v.is_null()) {
    std::string flag = key;
    for (char& c : flag) {
      if (c == '_') c = '-';
    }
    throw InvalidConfig("--" + flag + " is required here");
  }
  return v;
}

bool Resolved::has(const std::string& key) const {
  return j_.contains(key) && !j_.at(key).is_null();
}

std::string Resolved::str(const std::string& key) const { return at(key).get<std::string>(); }

std::filesystem::path Resolved::path(const std::string& key) const {
  std::filesystem::path p = str(key);
  if (p.is_relative()) {
    if (const char* root = std::getenv("CTXSIM_RESOURCE_ROOT"); root && *root) {
      const auto rooted = std::filesystem::path(root) / p;
      if (std::filesystem::exists(rooted)) return rooted;
    }
  }
  return p;
}

std::filesystem::path Resolved::input(const std::string& key, const std::string& format) const {
  const auto p = path(key);
  if (!std::filesystem::exists(p)) {
    throw MissingResource("'" + p.string() + "' does not exist; expected " + format);
  }
  return p;
}

std::optional<std::filesystem::path> Resolved::optional_input(const std::string& key,
                                                              const std::string& format) const {
  if (!has(key)) return std::nullopt;
  return input(key, format);
}

long long Resolved::integer(const std::string& key) const { return at(key).get<long long>(); }

std::uint64_t Resolved::uinteger(const std::string& key) const {
  return at(key).get<std::uint64_t>();
}

double Resolved::real(const std::string& key) const { return at(key).get<double>(); }

std::vector<double> Resolved::reals(const std::string& key) const {
  return at(key).get<std::vector<double>>();
}

std::vector<int> Resolved::integers(const std::string& key) const {
  return at(key).get<std::vector<int>>();
}

std::vector<std::string> Resolved::strings(const std::string& key) const {
  return at(key).get<std::vector<std::string>>();
}

}  // namespace ctxsim::cli
