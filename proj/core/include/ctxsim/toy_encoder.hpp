#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctxsim/encoder.hpp"
#include "ctxsim/rng.hpp"

namespace ctxsim {

// An encoder whose parameters can be fine-tuned: it exposes a recording
// forward pass and a backward pass from last-layer gradients.
class TrainableBackend : public EncoderBackend {
 public:
  struct Tape {
    virtual ~Tape() = default;
  };

  // Forward pass with backend-internal dropout (rate 0 disables it). When
  // `tape` is non-null the activations needed by backward() are recorded.
  virtual EncoderOutput forward(const EncodedPair& input, double dropout, Rng& rng,
                                std::unique_ptr<Tape>* tape) const = 0;

  // Adds dLoss/dparams into `grads` (same shapes as parameters()).
  virtual void backward(const Tape& tape, const Matrix& grad_last_layer,
                        std::vector<Matrix>& grads) const = 0;

  virtual std::vector<Matrix>& parameters() = 0;
  virtual const std::vector<Matrix>& parameters() const = 0;
  virtual std::vector<std::string> parameter_names() const = 0;

  virtual std::unique_ptr<TrainableBackend> clone() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

struct ToyEncoderConfig {
  std::size_t vocab_size = 4096;
  int hidden_dim = 16;
  int n_layers = 2;
  std::size_t max_positions = 512;
  std::size_t chunk_chars = 4;
  std::uint64_t seed = 13;
  double init_scale = 0.5;

  friend bool operator==(const ToyEncoderConfig&, const ToyEncoderConfig&) = default;
};

// Small deterministic contextual encoder used for tests and CI runs.
//
// Embeddings: token + position + segment. Each block is a residual update
//   h_i <- h_i + tanh(W h_i + U mean_{j in seg(i)} h_j + b)
// so every token mixes in the mean of its own sentence segment; in a pair
// input the two sentences therefore contextualise independently.
class ToyEncoder final : public TrainableBackend {
 public:
  explicit ToyEncoder(const ToyEncoderConfig& config = {});

  int n_layers() const override { return config_.n_layers; }
  int hidden_dim() const override { return config_.hidden_dim; }
  const Tokenizer& tokenizer() const override { return tokenizer_; }
  EncoderOutput encode(const EncodedPair& input) const override;

  EncoderOutput forward(const EncodedPair& input, double dropout, Rng& rng,
                        std::unique_ptr<Tape>* tape) const override;
  void backward(const Tape& tape, const Matrix& grad_last_layer,
                std::vector<Matrix>& grads) const override;

  std::vector<Matrix>& parameters() override { return params_; }
  const std::vector<Matrix>& parameters() const override { return params_; }
  std::vector<std::string> parameter_names() const override;

  std::unique_ptr<TrainableBackend> clone() const override;
  nlohmann::json to_json() const override;
  static ToyEncoder from_json(const nlohmann::json& j);

  const ToyEncoderConfig& config() const { return config_; }

 private:
  enum : std::size_t { kTokenEmb = 0, kPosEmb = 1, kSegEmb = 2, kFirstBlock = 3 };
  const Matrix& w(int layer) const { return params_[kFirstBlock + 3 * layer]; }
  const Matrix& u(int layer) const { return params_[kFirstBlock + 3 * layer + 1]; }
  const Matrix& b(int layer) const { return params_[kFirstBlock + 3 * layer + 2]; }

  ToyEncoderConfig config_;
  ChunkTokenizer tokenizer_;
  std::vector<Matrix> params_;
};

}  // namespace ctxsim
