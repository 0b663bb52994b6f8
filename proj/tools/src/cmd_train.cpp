#include <algorithm>
#include <ostream>

#include "commands.hpp"
#include "ctxsim/errors.hpp"
#include "ctxsim/io.hpp"
#include "ctxsim/metrics.hpp"
#include "ctxsim/similarity.hpp"
#include "ctxsim/toy_encoder.hpp"
#include "ctxsim/training.hpp"

namespace ctxsim::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

const char* kJsonlFormat = "dataset JSONL, one labeled pair per line";
const char* kGwscFormat = "TSV: word1, word2, context1, context2 (targets in <strong> tags)";

Params training_params() {
  return {
      {"data", Kind::kPath, nullptr, kJsonlFormat},
      {"out", Kind::kPath, nullptr, "fresh output directory"},
      {"head", Kind::kString, "CLASSIF", "CLASSIF | COSDIST"},
      {"learning-rate", Kind::kReal, 5e-5, "Adam learning rate"},
      {"epochs", Kind::kInt, 1, "training epochs (no early stopping)"},
      {"dropout", Kind::kReal, 0.1, "dropout on head input and inside the encoder"},
      {"max-len", Kind::kUInt, 128, "wordpiece cap; pairs with a target beyond it are dropped"},
      {"batch-size", Kind::kUInt, 32, "pairs per optimizer step"},
      {"seed", Kind::kUInt, 0, "shuffling, dropout and head-initialisation seed"},
      {"margin", Kind::kReal, 0.0, "COSDIST margin for F pairs"},
      {"n-classes", Kind::kInt, 2, "CLASSIF classes: 2 (T/F) or 3 (ukWaC-subs a/b/c)"},
  };
}

training::FineTuneConfig finetune_config(const Resolved& c) {
  training::FineTuneConfig f;
  f.head = training::parse_head(c.str("head"));
  f.learning_rate = c.real("learning_rate");
  f.epochs = static_cast<int>(c.integer("epochs"));
  f.dropout = c.real("dropout");
  f.max_len = c.uinteger("max_len");
  f.batch_size = c.uinteger("batch_size");
  f.seed = c.uinteger("seed");
  f.margin = c.real("margin");
  f.n_classes = static_cast<int>(c.integer("n_classes"));
  f.validate();
  return f;
}

std::string relative_to(const fs::path& p, const fs::path& root) {
  if (p.empty()) return "";
  return fs::relative(p, root).generic_string();
}

void log_report(RunDir& run, const training::TrainReport& report, const std::string& cell) {
  if (report.dropped_truncated > 0) {
    run.warn(cell + std::to_string(report.dropped_truncated) +
             " pair(s) dropped: a target sits beyond max_len");
  }
  for (const auto& e : report.epochs) {
    ordered_json f;
    if (!cell.empty()) f["cell"] = cell;
    f["epoch"] = e.epoch;
    f["mean_loss"] = e.mean_loss;
    f["steps"] = e.steps;
    if (e.heldout_accuracy) f["heldout_accuracy"] = *e.heldout_accuracy;
    if (e.heldout_cos_gap) f["heldout_cos_gap"] = *e.heldout_cos_gap;
    run.log("epoch", f);
  }
}

std::vector<LabeledPair> load_data(const Resolved& c, const std::string& key, RunDir& run) {
  const auto path = c.input(key, kJsonlFormat);
  run.record_input(key, path);
  return io::read_dataset(path);
}

void execute_finetune(const Resolved& c, RunDir* run, std::ostream& out) {
  const auto config = finetune_config(c);
  const auto data = load_data(c, "data", *run);
  training::check_compatible(config, data);
  std::optional<std::vector<LabeledPair>> heldout;
  if (c.has("heldout")) heldout = load_data(c, "heldout", *run);
  const auto backend = make_backend(c, "init_checkpoint", run);

  training::CheckpointTarget target;
  target.root = run->root() / "checkpoints";
  target.run_id = c.str("run_id");
  target.dataset_hash = io::sha256_file(c.path("data"));
  run->log("finetune", {{"config", training::to_json(config)}, {"pairs", data.size()},
                        {"dataset_sha256", target.dataset_hash}});

  auto result = training::finetune(*backend, data, config, heldout ? &*heldout : nullptr, &target);
  result.report.final_checkpoint = relative_to(result.report.final_checkpoint, run->root());
  log_report(*run, result.report, "");
  run->write("train_report.json", training::to_json(result.report).dump(2) + "\n");
  run->set("finetune_config", training::to_json(config));
  run->set("dataset_sha256", target.dataset_hash);
  run->set("examples_used", result.report.examples_used);
  run->set("dropped_truncated", result.report.dropped_truncated);
  run->set("final_checkpoint", result.report.final_checkpoint);
  out << "trained " << result.report.epochs.size() << " epoch(s) on "
      << result.report.examples_used << " pairs; final loss "
      << result.report.epochs.back().mean_loss << "; checkpoint "
      << result.report.final_checkpoint << '\n';
}

struct Entry {
  std::size_t cell = 0;
  std::string head;
  double learning_rate = 0.0;
  int epochs = 0;
  int layer = 0;
  std::optional<double> score;
  std::size_t n = 0;
  std::string checkpoint;
};

ordered_json to_json(const Entry& e) {
  ordered_json j;
  j["cell"] = e.cell;
  j["head"] = e.head;
  j["learning_rate"] = e.learning_rate;
  j["epochs"] = e.epochs;
  j["layer"] = e.layer;
  j["score"] = e.score ? ordered_json(*e.score) : ordered_json();
  j["n"] = e.n;
  j["checkpoint"] = e.checkpoint;
  return j;
}

// Scores every layer of one backend on the dev set.
void score_layers(const EncoderBackend& backend, const std::vector<similarity::GwscItem>& dev,
                  const metrics::ScoreTable& gold, int subtask, const std::vector<int>& layers,
                  std::size_t max_len, Entry base, std::vector<Entry>& entries, RunDir& run) {
  auto records = similarity::predict_batch(backend, dev, layers, max_len);
  for (int layer : layers) {
    similarity::set_chosen_layer(records, layer);
    const std::string text = subtask == 1 ? similarity::format_subtask1(records)
                                          : similarity::format_subtask2(records);
    Entry e = base;
    e.layer = layer;
    try {
      const auto r = metrics::evaluate(metrics::parse_scores(text, subtask), gold, subtask);
      e.score = r.value;
      e.n = r.n;
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& err) {
      run.warn("cell " + std::to_string(e.cell) + " layer " + std::to_string(layer) +
               " not scored: " + err.what());
    }
    run.log("grid_score", to_json(e));
    entries.push_back(std::move(e));
  }
}

void execute_grid(const Resolved& c, RunDir* run, std::ostream& out) {
  const int subtask = static_cast<int>(c.integer("subtask"));
  if (subtask != 1 && subtask != 2) throw InvalidConfig("--subtask must be 1 or 2");
  const auto dev_path = c.input("dev", kGwscFormat);
  const auto gold_path = c.input("dev_gold", "score TSV with the subtask's header");
  run->record_input("dev", dev_path);
  run->record_input("dev_gold", gold_path);
  const auto dev = similarity::read_gwsc(dev_path, parse_language(c.str("language")));
  const auto gold = metrics::read_scores(gold_path, subtask);
  if (gold.rows.size() != dev.size()) {
    throw RowCountMismatch("dev set has " + std::to_string(dev.size()) + " items, gold has " +
                           std::to_string(gold.rows.size()) + " rows");
  }
  const std::size_t max_len = c.uinteger("max_len");

  std::vector<Entry> entries;
  std::size_t trainings = 0;
  const auto base_backend = make_backend(c, "checkpoint", run);
  std::vector<int> layers;
  if (c.has("layers")) {
    layers = c.integers("layers");
  } else {
    for (int l = 0; l <= base_backend->n_layers(); ++l) layers.push_back(l);
  }
  if (layers.empty()) throw InvalidConfig("--layers must name at least one layer");

  if (c.has("checkpoint")) {
    // Layer-only grid: one backend, no retraining.
    Entry base;
    base.head = "";
    base.checkpoint = c.str("checkpoint");
    score_layers(*base_backend, dev, gold, subtask, layers, max_len, base, entries, *run);
  } else {
    const auto data = load_data(c, "data", *run);
    const auto heads = c.strings("heads");
    const auto lrs = c.reals("learning_rates");
    const auto epoch_list = c.integers("epochs_list");
    if (heads.empty() || lrs.empty() || epoch_list.empty()) {
      throw InvalidConfig("--heads, --learning-rates and --epochs-list must be non-empty");
    }
    // Reject incompatible cells before any training starts.
    std::vector<training::FineTuneConfig> cells;
    for (const auto& h : heads) {
      for (double lr : lrs) {
        for (int ep : epoch_list) {
          auto f = finetune_config(c);
          f.head = training::parse_head(h);
          f.learning_rate = lr;
          f.epochs = ep;
          if (f.head == training::Head::kCosdist) f.n_classes = 2;
          training::check_compatible(f, data);
          cells.push_back(f);
        }
      }
    }
    run->log("grid", {{"training_runs", cells.size()}, {"layers", layers}});
    for (std::size_t k = 0; k < cells.size(); ++k) {
      training::CheckpointTarget target;
      target.root = run->root() / "cells";
      target.run_id = "cell-" + std::to_string(k);
      target.dataset_hash = io::sha256_file(c.path("data"));
      auto result = training::finetune(*base_backend, data, cells[k], nullptr, &target);
      ++trainings;
      log_report(*run, result.report, "cell-" + std::to_string(k) + ": ");
      Entry base;
      base.cell = k;
      base.head = std::string(training::to_string(cells[k].head));
      base.learning_rate = cells[k].learning_rate;
      base.epochs = cells[k].epochs;
      base.checkpoint = relative_to(result.report.final_checkpoint, run->root());
      score_layers(*result.backend, dev, gold, subtask, layers, max_len, base, entries, *run);
    }
  }

  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.score.has_value() != b.score.has_value()) return a.score.has_value();
    if (a.score && *a.score != *b.score) return *a.score > *b.score;
    return a.layer > b.layer;
  });
  ordered_json board;
  board["subtask"] = subtask;
  board["metric"] = subtask == 1 ? "uncentered_pearson" : "harmonic_mean_pearson_spearman";
  board["training_runs"] = trainings;
  auto arr = ordered_json::array();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto j = to_json(entries[i]);
    j["rank"] = i + 1;
    arr.push_back(std::move(j));
  }
  board["entries"] = std::move(arr);
  run->write("leaderboard.json", board.dump(2) + "\n");
  run->set("training_runs", trainings);
  run->set("cells_scored", entries.size());
  if (!entries.empty() && entries.front().score) {
    const auto& best = entries.front();
    out << "best: " << (best.head.empty() ? "checkpoint" : best.head) << " lr="
        << best.learning_rate << " epochs=" << best.epochs << " layer=" << best.layer
        << " score=" << *best.score << '\n';
  } else {
    out << "no grid cell produced a score\n";
  }
}

}  // namespace

Params backend_params(const std::string& checkpoint_flag, const std::string& checkpoint_help) {
  return {
      {checkpoint_flag, Kind::kPath, nullptr, checkpoint_help},
      {"toy-hidden-dim", Kind::kInt, 16, "toy encoder hidden size"},
      {"toy-layers", Kind::kInt, 2, "toy encoder blocks"},
      {"toy-seed", Kind::kUInt, 13, "toy encoder weight seed"},
      {"toy-vocab-size", Kind::kUInt, 4096, "toy tokenizer hash buckets"},
      {"toy-chunk-chars", Kind::kUInt, 4, "toy tokenizer characters per wordpiece"},
  };
}

std::unique_ptr<ToyEncoder> make_backend(const Resolved& c, const std::string& checkpoint_key,
                                         RunDir* run) {
  if (c.has(checkpoint_key)) {
    const auto dir = c.input(checkpoint_key, "checkpoint directory with backend.json");
    if (run) run->record_input(checkpoint_key, dir / "backend.json");
    return std::make_unique<ToyEncoder>(
        ToyEncoder::from_json(json::parse(io::read_file(dir / "backend.json"))));
  }
  ToyEncoderConfig tc;
  tc.hidden_dim = static_cast<int>(c.integer("toy_hidden_dim"));
  tc.n_layers = static_cast<int>(c.integer("toy_layers"));
  tc.seed = c.uinteger("toy_seed");
  tc.vocab_size = c.uinteger("toy_vocab_size");
  tc.chunk_chars = c.uinteger("toy_chunk_chars");
  if (tc.hidden_dim <= 0 || tc.n_layers <= 0 || tc.chunk_chars == 0 || tc.vocab_size <= 5) {
    throw InvalidConfig("toy encoder needs positive hidden dim, layers, chunk size and > 5 ids");
  }
  return std::make_unique<ToyEncoder>(tc);
}

Command finetune_command() {
  Command cmd;
  cmd.name = "finetune";
  cmd.description = "Fine-tune the encoder with a CLASSIF or COSDIST head";
  cmd.params = training_params();
  cmd.params.push_back({"heldout", Kind::kPath, nullptr, "held-out JSONL scored after each epoch"});
  cmd.params.push_back({"run-id", Kind::kString, "run", "checkpoints go to checkpoints/<run-id>/epoch_k"});
  for (auto& p : backend_params("init-checkpoint", "start from this checkpoint's encoder")) {
    cmd.params.push_back(std::move(p));
  }
  cmd.execute = execute_finetune;
  return cmd;
}

Command grid_command() {
  Command cmd;
  cmd.name = "grid";
  cmd.description = "Grid over heads, learning rates, epochs and layers on a dev set";
  cmd.params = training_params();
  cmd.params.push_back({"dev", Kind::kPath, nullptr, kGwscFormat});
  cmd.params.push_back({"dev-gold", Kind::kPath, nullptr, "gold score TSV for the dev set"});
  cmd.params.push_back({"subtask", Kind::kInt, 1, "1 (change) or 2 (similarities)"});
  cmd.params.push_back({"language", Kind::kString, "en", "en | fi"});
  cmd.params.push_back({"heads", Kind::kStringList, json::array({"CLASSIF", "COSDIST"}), "heads"});
  cmd.params.push_back(
      {"learning-rates", Kind::kRealList, json::array({5e-5, 1e-6, 1e-7}), "learning rates"});
  cmd.params.push_back({"epochs-list", Kind::kIntList, json::array({1}), "epoch counts"});
  cmd.params.push_back({"layers", Kind::kIntList, nullptr, "layers to score [default: all]"});
  for (auto& p : backend_params("checkpoint", "score this checkpoint over layers, no training")) {
    cmd.params.push_back(std::move(p));
  }
  cmd.execute = execute_grid;
  return cmd;
}

}  // namespace ctxsim::cli
