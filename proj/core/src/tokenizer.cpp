#include "ctxsim/tokenizer.hpp"

#include <fstream>

#include "ctxsim/errors.hpp"
#include "ctxsim/text.hpp"

namespace ctxsim {

namespace {

// Pre-tokenization shared by both tokenizers: word segmentation with the mask
// token kept whole. Returns spans; mask spans are flagged.
struct PreToken {
  Span span;
  bool mask = false;
};

std::vector<PreToken> pre_tokenize(std::string_view text) {
  std::vector<PreToken> out;
  std::size_t cursor = 0;
  while (cursor <= text.size()) {
    const std::size_t hit = text.find(kMaskToken, cursor);
    const std::size_t stop = hit == std::string_view::npos ? text.size() : hit;
    for (const Span& s : text::split_words(text.substr(cursor, stop - cursor))) {
      out.push_back({{s.start + cursor, s.end + cursor}, false});
    }
    if (hit == std::string_view::npos) break;
    out.push_back({{hit, hit + kMaskToken.size()}, true});
    cursor = hit + kMaskToken.size();
  }
  return out;
}

}  // namespace

ChunkTokenizer::ChunkTokenizer(std::size_t vocab_size, std::size_t chunk_chars, bool uncased)
    : vocab_size_(vocab_size), chunk_chars_(chunk_chars), uncased_(uncased) {
  if (vocab_size_ < 16) throw InvalidConfig("ChunkTokenizer vocab_size must be >= 16");
  if (chunk_chars_ == 0) throw InvalidConfig("ChunkTokenizer chunk_chars must be > 0");
}

int ChunkTokenizer::piece_id(std::string_view piece) const {
  const std::size_t reserved = 5;
  return static_cast<int>(reserved + text::fnv1a(piece) % (vocab_size_ - reserved));
}

std::vector<Wordpiece> ChunkTokenizer::tokenize(std::string_view input) const {
  std::vector<Wordpiece> out;
  for (const PreToken& pre : pre_tokenize(input)) {
    if (pre.mask) {
      out.push_back({std::string(kMaskToken), special_.mask, pre.span});
      continue;
    }
    const std::string_view word = input.substr(pre.span.start, pre.span.size());
    std::size_t i = 0;
    bool first = true;
    while (i < word.size()) {
      const std::size_t begin = i;
      for (std::size_t n = 0; n < chunk_chars_ && i < word.size(); ++n) {
        i += text::utf8_length(static_cast<unsigned char>(word[i]));
      }
      if (i > word.size()) i = word.size();
      std::string piece = first ? "" : "##";
      piece += uncased_ ? text::fold_case(word.substr(begin, i - begin))
                        : std::string(word.substr(begin, i - begin));
      const int id = piece_id(piece);
      out.push_back({std::move(piece), id, {pre.span.start + begin, pre.span.start + i}});
      first = false;
    }
  }
  return out;
}

WordPieceTokenizer::WordPieceTokenizer(std::vector<std::string> vocab, bool uncased,
                                       std::size_t max_chars_per_word)
    : vocab_(std::move(vocab)), uncased_(uncased), max_chars_(max_chars_per_word) {
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    ids_.emplace(vocab_[i], static_cast<int>(i));
  }
  auto require = [&](const char* token) {
    auto it = ids_.find(token);
    if (it == ids_.end()) {
      throw InvalidConfig(std::string("WordPiece vocabulary lacks ") + token);
    }
    return it->second;
  };
  special_.pad = ids_.count("[PAD]") ? ids_.at("[PAD]") : 0;
  special_.unk = require("[UNK]");
  special_.cls = require("[CLS]");
  special_.sep = require("[SEP]");
  special_.mask = require("[MASK]");
}

WordPieceTokenizer WordPieceTokenizer::from_file(const std::string& path, bool uncased) {
  std::ifstream in(path);
  if (!in) throw MissingResource("cannot open WordPiece vocabulary '" + path + "'");
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  return WordPieceTokenizer(std::move(vocab), uncased);
}

std::vector<Wordpiece> WordPieceTokenizer::tokenize(std::string_view input) const {
  std::vector<Wordpiece> out;
  for (const PreToken& pre : pre_tokenize(input)) {
    if (pre.mask) {
      out.push_back({std::string(kMaskToken), special_.mask, pre.span});
      continue;
    }
    const std::string_view raw = input.substr(pre.span.start, pre.span.size());
    const std::string word = uncased_ ? text::fold_case(raw) : std::string(raw);
    if (word.size() > max_chars_) {
      out.push_back({"[UNK]", special_.unk, pre.span});
      continue;
    }
    std::vector<Wordpiece> pieces;
    std::size_t start = 0;
    bool bad = false;
    while (start < word.size()) {
      std::size_t end = word.size();
      int found = -1;
      std::string candidate;
      while (start < end) {
        candidate = (start > 0 ? "##" : "") + word.substr(start, end - start);
        auto it = ids_.find(candidate);
        if (it != ids_.end()) {
          found = it->second;
          break;
        }
        // step back one whole UTF-8 code point
        do {
          --end;
        } while (end > start && (static_cast<unsigned char>(word[end]) & 0xC0) == 0x80);
      }
      if (found < 0) {
        bad = true;
        break;
      }
      pieces.push_back({candidate, found, {pre.span.start + start, pre.span.start + end}});
      start = end;
    }
    if (bad) {
      out.push_back({"[UNK]", special_.unk, pre.span});
    } else {
      out.insert(out.end(), pieces.begin(), pieces.end());
    }
  }
  return out;
}

}  // namespace ctxsim
