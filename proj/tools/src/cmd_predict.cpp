#include <algorithm>
#include <ostream>

#include "commands.hpp"
#include "ctxsim/errors.hpp"
#include "ctxsim/metrics.hpp"
#include "ctxsim/similarity.hpp"
#include "ctxsim/toy_encoder.hpp"

namespace ctxsim::cli {

namespace {

using nlohmann::ordered_json;

const char* kGwscFormat = "TSV: word1, word2, context1, context2 (targets in <strong> tags)";

void execute_predict(const Resolved& c, RunDir* run, std::ostream& out) {
  const int subtask = static_cast<int>(c.integer("subtask"));
  if (subtask != 1 && subtask != 2) throw InvalidConfig("--subtask must be 1 or 2");
  const auto input = c.input("input", kGwscFormat);
  run->record_input("input", input);
  const auto backend = make_backend(c, "checkpoint", run);

  std::vector<int> layers;
  if (c.has("layers")) {
    layers = c.integers("layers");
    if (layers.empty()) throw InvalidConfig("--layers is empty; name at least one layer");
  } else {
    layers = {backend->n_layers()};
  }
  for (int l : layers) {
    if (l < 0 || l > backend->n_layers()) {
      throw InvalidConfig("layer " + std::to_string(l) + " outside 0.." +
                          std::to_string(backend->n_layers()) + " (" +
                          similarity::kLayerIndexing + ")");
    }
  }
  int chosen = layers.front();
  for (int l : layers) chosen = std::max(chosen, l);
  if (c.has("chosen_layer")) {
    chosen = static_cast<int>(c.integer("chosen_layer"));
    if (std::find(layers.begin(), layers.end(), chosen) == layers.end()) {
      throw InvalidConfig("--chosen-layer must be one of --layers");
    }
  }

  const auto items = similarity::read_gwsc(input, parse_language(c.str("language")));
  auto records = similarity::predict_batch(*backend, items, layers, c.uinteger("max_len"));
  similarity::set_chosen_layer(records, chosen);
  std::size_t nulls = 0;
  for (const auto& r : records) {
    for (const auto& w : r.warnings) {
      run->warn("item " + r.id + ": " + w);
      ++nulls;
    }
  }
  run->write("predictions.tsv", subtask == 1 ? similarity::format_subtask1(records)
                                             : similarity::format_subtask2(records));
  run->write("predictions.json", similarity::to_json(records).dump(2) + "\n");
  run->log("predict", {{"items", items.size()}, {"layers", layers}, {"chosen_layer", chosen},
                       {"truncated_contexts", nulls}});
  run->set("items", items.size());
  run->set("chosen_layer", chosen);
  run->set("layer_indexing", similarity::kLayerIndexing);
  out << "predicted " << items.size() << " items at layer " << chosen << '\n';
}

void execute_evaluate(const Resolved& c, RunDir* run, std::ostream& out) {
  const int subtask = static_cast<int>(c.integer("subtask"));
  const auto pred = c.input("pred", "prediction TSV");
  const auto gold = c.input("gold", "gold TSV with the same header as the predictions");
  const auto aggregation = metrics::parse_aggregation(c.str("aggregation"));
  const auto result = metrics::evaluate_files(pred, gold, subtask, aggregation);
  const auto j = metrics::to_json(result);
  for (const auto& w : result.warnings) {
    if (run) {
      run->warn(w);
    }
  }
  if (run) {
    run->record_input("pred", pred);
    run->record_input("gold", gold);
    run->write("eval.json", j.dump(2) + "\n");
    run->set("result", j);
  }
  out << j.dump() << '\n';
}

}  // namespace

Command predict_command() {
  Command cmd;
  cmd.name = "predict";
  cmd.description = "Predict GWSC similarities (Subtask 2) or changes (Subtask 1)";
  cmd.params = {
      {"input", Kind::kPath, nullptr, kGwscFormat},
      {"out", Kind::kPath, nullptr, "fresh output directory"},
      {"subtask", Kind::kInt, 1, "1 (change) or 2 (similarities)"},
      {"layers", Kind::kIntList, nullptr, "layers to compute [default: last]"},
      {"chosen-layer", Kind::kInt, nullptr, "layer written to the TSV [default: highest]"},
      {"max-len", Kind::kUInt, 128, "wordpiece cap per context"},
      {"language", Kind::kString, "en", "en | fi"},
  };
  for (auto& p : backend_params("checkpoint", "checkpoint epoch directory to load")) {
    cmd.params.push_back(std::move(p));
  }
  cmd.execute = execute_predict;
  return cmd;
}

Command evaluate_command() {
  Command cmd;
  cmd.name = "evaluate";
  cmd.description = "Score predictions against gold";
  cmd.params = {
      {"pred", Kind::kPath, nullptr, "prediction TSV"},
      {"gold", Kind::kPath, nullptr, "gold TSV"},
      {"subtask", Kind::kInt, 1, "1 (uncentered Pearson) or 2 (harmonic mean)"},
      {"aggregation", Kind::kString, "concatenate", "subtask 2: concatenate | per-column-average"},
      {"out", Kind::kPath, nullptr, "optional output directory for eval.json"},
  };
  cmd.execute = execute_evaluate;
  cmd.out_required = false;
  return cmd;
}

}  // namespace ctxsim::cli
