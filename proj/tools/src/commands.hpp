#pragma once

#include <functional>
#include <memory>
#include <iosfwd>
#include <string>

#include "options.hpp"
#include "run_dir.hpp"

namespace ctxsim::cli {

struct Command {
  std::string name;
  std::string description;
  Params params;
  // The RunDir is null only when --out is optional and absent (evaluate).
  std::function<void(const Resolved&, RunDir*, std::ostream& out)> execute;
  bool out_required = true;
};

Command build_data_command();
Command finetune_command();
Command grid_command();
Command predict_command();
Command evaluate_command();

}  // namespace ctxsim::cli

namespace ctxsim {
class ToyEncoder;
}

namespace ctxsim::cli {

// Toy-encoder shape flags shared by every command that builds a backend.
Params backend_params(const std::string& checkpoint_flag, const std::string& checkpoint_help);

// Loads `checkpoint_key` when set (recording its hash), otherwise builds a
// fresh toy encoder from the toy_* options.
std::unique_ptr<ToyEncoder> make_backend(const Resolved& c, const std::string& checkpoint_key,
                                         RunDir* run);

}  // namespace ctxsim::cli
