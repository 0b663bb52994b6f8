#include "ctxsim/cli.hpp"

#include <map>
#include <memory>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ctxsim/errors.hpp"
#include "ctxsim/io.hpp"

namespace ctxsim::cli {

namespace {

std::optional<std::string> scan_config_flag(const std::vector<std::string>& args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<Command> commands = {build_data_command(), finetune_command(), predict_command(),
                                   evaluate_command(), grid_command()};

  CLI::App app{"Lexical-semantic fine-tuning data, training, and graded word similarity in context"};
  app.name(args.empty() ? "ctxsim" : args[0]);
  app.require_subcommand(1);

  std::map<std::string, std::map<std::string, std::string>> storage;
  std::map<std::string, CLI::App*> subs;
  std::string config_path;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.description);
    subs[cmd.name] = sub;
    sub->add_option("--config", config_path, "JSON document of option defaults (keys use _)");
    auto& store = storage[cmd.name];
    for (const auto& p : cmd.params) {
      std::string help = p.help;
      if (!p.default_value.is_null()) {
        help += " [default: " +
                (p.default_value.is_string() ? p.default_value.get<std::string>()
                                             : p.default_value.dump()) +
                "]";
      }
      sub->add_option("--" + p.name, store[p.name], help);
    }
  }

  std::unique_ptr<RunDir> run_dir;
  try {
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitConfig;
    }

    const Command* chosen = nullptr;
    for (const auto& cmd : commands) {
      if (subs[cmd.name]->parsed()) chosen = &cmd;
    }
    std::map<std::string, std::string> flags;
    for (const auto& p : chosen->params) {
      if (subs[chosen->name]->get_option("--" + p.name)->count() > 0) {
        flags[p.name] = storage[chosen->name][p.name];
      }
    }
    std::optional<nlohmann::json> file_config;
    if (const auto path = scan_config_flag(args)) {
      if (!std::filesystem::exists(*path)) {
        throw MissingResource("config file '" + *path + "' does not exist (expected a JSON object)");
      }
      try {
        file_config = nlohmann::json::parse(io::read_file(*path));
      } catch (const nlohmann::json::parse_error& e) {
        throw InvalidConfig("config file '" + *path + "' is not valid JSON: " + e.what());
      }
    }
    const Resolved config(
        resolve(chosen->name, chosen->params, file_config ? &*file_config : nullptr, flags));

    if (config.has("out")) {
      run_dir = std::make_unique<RunDir>(config.path("out"), config.json(), err);
    } else if (chosen->out_required) {
      throw InvalidConfig("--out is required");
    }
    chosen->execute(config, run_dir.get(), out);
    if (run_dir) {
      const std::string sha = run_dir->finalize();
      out << "manifest sha256 " << sha << '\n';
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    if (run_dir) run_dir->log("error", {{"kind", "config"}, {"message", e.what()}});
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    if (run_dir) run_dir->log("error", {{"kind", "runtime"}, {"message", e.what()}});
    return kExitRuntime;
  }
}

}  // namespace ctxsim::cli
