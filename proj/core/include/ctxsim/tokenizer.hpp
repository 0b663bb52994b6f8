#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctxsim/types.hpp"

namespace ctxsim {

struct Wordpiece {
  std::string text;
  int id = 0;
  Span span;  // bytes of the original (un-folded) input this piece covers
};

struct SpecialIds {
  int pad = 0;
  int unk = 1;
  int cls = 2;
  int sep = 3;
  int mask = 4;
};

inline constexpr std::string_view kMaskToken = "[MASK]";

// Text -> wordpieces with character offsets. Case folding is the tokenizer's
// job; offsets always refer to the caller's original text.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::vector<Wordpiece> tokenize(std::string_view text) const = 0;
  virtual const SpecialIds& special() const = 0;
  virtual std::size_t vocab_size() const = 0;
  virtual bool uncased() const = 0;
  virtual std::string name() const = 0;
};

// Deterministic test tokenizer: words are cut into chunks of at most
// `chunk_chars` code points ("##" marks continuations) and piece strings are
// hashed into a fixed-size id space. Needs no vocabulary file.
class ChunkTokenizer final : public Tokenizer {
 public:
  explicit ChunkTokenizer(std::size_t vocab_size = 4096, std::size_t chunk_chars = 4,
                          bool uncased = true);

  std::vector<Wordpiece> tokenize(std::string_view text) const override;
  const SpecialIds& special() const override { return special_; }
  std::size_t vocab_size() const override { return vocab_size_; }
  bool uncased() const override { return uncased_; }
  std::string name() const override { return "chunk"; }
  std::size_t chunk_chars() const { return chunk_chars_; }

 private:
  int piece_id(std::string_view piece) const;

  std::size_t vocab_size_;
  std::size_t chunk_chars_;
  bool uncased_;
  SpecialIds special_;
};

// Greedy longest-match-first WordPiece over a BERT-style vocab.txt.
class WordPieceTokenizer final : public Tokenizer {
 public:
  WordPieceTokenizer(std::vector<std::string> vocab, bool uncased,
                     std::size_t max_chars_per_word = 100);
  static WordPieceTokenizer from_file(const std::string& path, bool uncased);

  std::vector<Wordpiece> tokenize(std::string_view text) const override;
  const SpecialIds& special() const override { return special_; }
  std::size_t vocab_size() const override { return vocab_.size(); }
  bool uncased() const override { return uncased_; }
  std::string name() const override { return "wordpiece"; }

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> ids_;
  bool uncased_;
  std::size_t max_chars_;
  SpecialIds special_;
};

}  // namespace ctxsim
