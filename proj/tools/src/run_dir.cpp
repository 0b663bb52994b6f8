#include "run_dir.hpp"

#include <algorithm>
#include <ostream>

#include "ctxsim/errors.hpp"
#include "ctxsim/io.hpp"

namespace ctxsim::cli {

namespace fs = std::filesystem;

RunDir::RunDir(const fs::path& root, const nlohmann::ordered_json& config, std::ostream& err)
    : root_(root), err_(err), command_(config.value("command", "")) {
  if (fs::exists(root_) && (!fs::is_directory(root_) || !fs::is_empty(root_))) {
    throw InvalidConfig("output directory '" + root_.string() +
                        "' already exists and is not empty; every run needs a fresh directory");
  }
  fs::create_directories(root_);
  const std::string text = config.dump(2) + "\n";
  config_sha_ = io::sha256_hex(text);
  io::write_file_atomic(root_ / "config.json", text);
  log_.open(root_ / "log.jsonl", std::ios::binary);
  log("start", {{"command", command_}});
}

void RunDir::log(const std::string& event, nlohmann::ordered_json fields) {
  nlohmann::ordered_json line;
  line["event"] = event;
  for (auto& [k, v] : fields.items()) line[k] = v;
  log_ << line.dump() << '\n';
  log_.flush();
}

void RunDir::warn(const std::string& message) {
  err_ << "warning: " << message << '\n';
  log("warning", {{"message", message}});
}

void RunDir::record_input(const std::string& name, const fs::path& path) {
  inputs_[name] = io::sha256_file(path);
}

void RunDir::write(const fs::path& relative, const std::string& content) {
  const fs::path full = root_ / relative;
  fs::create_directories(full.parent_path());
  io::write_file_atomic(full, content);
}

std::string RunDir::finalize() {
  log("done");
  log_.close();
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : fs::recursive_directory_iterator(root_)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), root_).generic_string();
    if (rel == "manifest.json") continue;
    files.emplace_back(rel, io::sha256_file(entry.path()));
  }
  std::sort(files.begin(), files.end());
  nlohmann::ordered_json manifest;
  manifest["command"] = command_;
  manifest["config_sha256"] = config_sha_;
  for (auto& [k, v] : extra_.items()) manifest[k] = v;
  manifest["inputs"] = inputs_;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  for (const auto& [rel, sha] : files) outputs[rel] = sha;
  manifest["outputs"] = std::move(outputs);
  const std::string text = manifest.dump(2) + "\n";
  io::write_file_atomic(root_ / "manifest.json", text);
  return io::sha256_hex(text);
}

}  // namespace ctxsim::cli
