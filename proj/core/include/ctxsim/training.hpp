#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctxsim/encoder.hpp"
#include "ctxsim/toy_encoder.hpp"
#include "ctxsim/types.hpp"

namespace ctxsim::training {

enum class Head { kClassif, kCosdist };

std::string_view to_string(Head head);
Head parse_head(std::string_view text);

struct FineTuneConfig {
  Head head = Head::kClassif;
  double learning_rate = 5e-5;
  int epochs = 1;
  double dropout = 0.1;
  std::size_t max_len = kDefaultMaxLen;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double margin = 0.0;  // COSDIST only
  int n_classes = 2;    // CLASSIF only

  // Range checks; throws InvalidConfig.
  void validate() const;

  friend bool operator==(const FineTuneConfig&, const FineTuneConfig&) = default;
};

nlohmann::ordered_json to_json(const FineTuneConfig& config);
FineTuneConfig config_from_json(const nlohmann::json& j);

// Head/data compatibility: COSDIST needs binary labels, 3-class CLASSIF is
// only for ukWaC-subs, and every label must fit n_classes.
void check_compatible(const FineTuneConfig& config, const std::vector<LabeledPair>& data);

struct LinearPairHead {
  Matrix weight;  // [n_classes x 2*hidden_dim]
  Vector bias;    // [n_classes]

  static LinearPairHead zeros(int n_classes, int hidden_dim);
  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation.
  static LinearPairHead init(int n_classes, int hidden_dim, Rng& rng);
  int n_classes() const { return static_cast<int>(weight.rows()); }
};

nlohmann::json to_json(const LinearPairHead& head);
LinearPairHead head_from_json(const nlohmann::json& j);

// softmax(W [a; b] + bias)
Vector classif_forward(const Vector& rep_a, const Vector& rep_b, const LinearPairHead& head);

// -log p(gold)
double classif_loss(const Vector& probs, int gold_class);

// Loss and its gradients with respect to both representations and the head.
struct ClassifGrad {
  double loss = 0.0;
  Vector d_rep_a;
  Vector d_rep_b;
  Matrix d_weight;
  Vector d_bias;
};
ClassifGrad classif_loss_grad(const Vector& rep_a, const Vector& rep_b, const LinearPairHead& head,
                              int gold_class);

// T: 1 - cos(a, b); F: max(0, cos(a, b) - margin).
double cosdist_loss(const Vector& rep_a, const Vector& rep_b, Label label, double margin = 0.0);

struct CosdistGrad {
  double loss = 0.0;
  Vector d_rep_a;
  Vector d_rep_b;
};
CosdistGrad cosdist_loss_grad(const Vector& rep_a, const Vector& rep_b, Label label,
                              double margin = 0.0);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  std::size_t steps = 0;
  std::optional<double> heldout_accuracy;  // CLASSIF with held-out data
  std::optional<double> heldout_cos_gap;   // COSDIST with held-out data
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::size_t examples_used = 0;
  std::size_t dropped_truncated = 0;
  std::string final_checkpoint;
};

nlohmann::ordered_json to_json(const TrainReport& report);

struct CheckpointTarget {
  std::filesystem::path root;  // checkpoints go to root/run_id/epoch_k/
  std::string run_id = "run";
  std::string dataset_hash;
};

struct FineTuneResult {
  std::unique_ptr<TrainableBackend> backend;
  LinearPairHead head;
  TrainReport report;
};

// Fine-tunes a copy of `backend` (the argument is left untouched) with Adam,
// on target representations from the last layer.
FineTuneResult finetune(const TrainableBackend& backend, const std::vector<LabeledPair>& data,
                        const FineTuneConfig& config,
                        const std::vector<LabeledPair>* heldout = nullptr,
                        const CheckpointTarget* checkpoint = nullptr);

// Fraction of argmax-correct CLASSIF predictions (ties resolve to the lowest
// class index). Pairs whose targets are truncated away are not scored.
double heldout_accuracy(const EncoderBackend& backend, const LinearPairHead& head,
                        const std::vector<LabeledPair>& pairs, std::size_t max_len = kDefaultMaxLen);

// mean cos(T pairs) - mean cos(F pairs) at `layer` (default: last) using
// pair encoding; measures how well a layer separates senses.
double cos_gap(const EncoderBackend& backend, const std::vector<LabeledPair>& pairs,
               std::size_t max_len = kDefaultMaxLen, std::optional<int> layer = std::nullopt);

struct Checkpoint {
  ToyEncoder backend;
  LinearPairHead head;
  FineTuneConfig config;
  nlohmann::json manifest;
};

// Writes dir/{backend.json, head.json, manifest.json} via a temporary
// directory renamed into place.
void save_checkpoint(const std::filesystem::path& dir, const TrainableBackend& backend,
                     const LinearPairHead& head, const FineTuneConfig& config,
                     const std::string& dataset_hash, int epoch);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace ctxsim::training
