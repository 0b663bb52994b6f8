#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

namespace ctxsim::cli {

// A fresh output directory holding config.json, log.jsonl, the command's
// outputs and a manifest.json of content hashes. Nothing in it depends on
// wall-clock time or on where the directory lives.
class RunDir {
 public:
  RunDir(const std::filesystem::path& root, const nlohmann::ordered_json& config,
         std::ostream& err);

  const std::filesystem::path& root() const { return root_; }

  void log(const std::string& event, nlohmann::ordered_json fields = nlohmann::ordered_json::object());
  void warn(const std::string& message);

  void record_input(const std::string& name, const std::filesystem::path& path);
  void set(const std::string& key, nlohmann::ordered_json value) { extra_[key] = std::move(value); }

  void write(const std::filesystem::path& relative, const std::string& content);

  // Hashes every file except the manifest itself and writes manifest.json.
  // Returns the manifest's own SHA-256.
  std::string finalize();

 private:
  std::filesystem::path root_;
  std::ostream& err_;
  std::ofstream log_;
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::object();
  nlohmann::ordered_json extra_ = nlohmann::ordered_json::object();
  std::string command_;
  std::string config_sha_;
};

}  // namespace ctxsim::cli
