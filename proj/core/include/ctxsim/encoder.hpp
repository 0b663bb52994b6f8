#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ctxsim/tokenizer.hpp"
#include "ctxsim/types.hpp"

namespace ctxsim {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultMaxLen = 128;

enum class SentenceRole { kFirst, kSecond };

struct EncodedToken {
  int id = 0;
  Span span;         // offsets into the sentence named by `role`; empty for markers
  int segment = 0;   // token type id: 0 = [CLS] s1 [SEP], 1 = s2 [SEP]
  bool special = false;
  SentenceRole role = SentenceRole::kFirst;
};

// [CLS] s1 [SEP] (s2 [SEP]). The untruncated token list is kept so alignment
// can tell a truncated target from a malformed span; consumers only ever see
// the first `max_len` positions.
class EncodedPair {
 public:
  EncodedPair(std::vector<EncodedToken> tokens, std::size_t max_len, bool has_second)
      : tokens_(std::move(tokens)), max_len_(max_len), has_second_(has_second) {}

  std::size_t length() const { return std::min(tokens_.size(), max_len_); }
  std::size_t untruncated_length() const { return tokens_.size(); }
  std::size_t max_len() const { return max_len_; }
  bool has_second() const { return has_second_; }

  std::span<const EncodedToken> sequence() const { return {tokens_.data(), length()}; }
  std::span<const EncodedToken> all_tokens() const { return tokens_; }

 private:
  std::vector<EncodedToken> tokens_;
  std::size_t max_len_;
  bool has_second_;
};

// Returns nullopt ("dropped") when a declared target's first covering
// wordpiece sits at or beyond max_len. Throws AlignmentNotFound when a
// declared target span overlaps no wordpiece.
std::optional<EncodedPair> build_pair_input(std::string_view s1, std::string_view s2,
                                            const Tokenizer& tokenizer,
                                            std::size_t max_len = kDefaultMaxLen,
                                            std::optional<Span> target1 = std::nullopt,
                                            std::optional<Span> target2 = std::nullopt);

// Single-segment variant: [CLS] s [SEP], right-truncated to max_len.
EncodedPair build_single_input(std::string_view s, const Tokenizer& tokenizer,
                               std::size_t max_len = kDefaultMaxLen);

struct TokenAlignment {
  std::vector<std::size_t> wordpiece_indices;  // contiguous, increasing
};

// Positions (within the truncated sequence) whose offsets overlap `span` in
// the given sentence segment. Pieces cut off by truncation are omitted;
// TargetTruncated if nothing survives, AlignmentNotFound if nothing overlaps.
TokenAlignment locate_target(const EncodedPair& input, Span span, SentenceRole role);

// Per-layer token representations. layers[0] is the embedding output,
// layers[1..n] are the transformer blocks.
struct EncoderOutput {
  std::vector<Matrix> layers;  // each [sequence length x hidden_dim]

  int n_layers() const { return static_cast<int>(layers.size()) - 1; }
  const Matrix& layer(int index) const;
};

class EncoderBackend {
 public:
  virtual ~EncoderBackend() = default;

  virtual int n_layers() const = 0;
  virtual int hidden_dim() const = 0;
  virtual const Tokenizer& tokenizer() const = 0;
  virtual EncoderOutput encode(const EncodedPair& input) const = 0;
};

// Mean of the wordpiece vectors at `layer`; identity for single-piece words.
Vector pool_target(const EncoderOutput& output, const TokenAlignment& alignment, int layer);

// u.v / (|u||v|), clamped to [-1, 1]. Throws ZeroVector / DimensionMismatch.
double cosine_similarity(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v);

}  // namespace ctxsim
