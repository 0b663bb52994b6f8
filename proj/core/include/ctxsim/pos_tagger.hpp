#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctxsim/types.hpp"

namespace ctxsim {

struct TaggedToken {
  Span span;
  std::string lemma;  // case-folded
  Pos pos = Pos::kOther;
};

// Coarse-tagset POS tagger injected into the dataset builders.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<TaggedToken> tag(std::string_view sentence) const = 0;
};

// Dictionary tagger: a TSV lexicon of `form<TAB>POS[<TAB>lemma]` lines.
// Unknown words are tagged OTHER; lookup is case-folded.
class LexiconTagger final : public PosTagger {
 public:
  LexiconTagger() = default;
  static LexiconTagger from_file(const std::string& path);

  void add(std::string_view form, Pos pos, std::string_view lemma = {});
  std::size_t size() const { return entries_.size(); }
  std::vector<TaggedToken> tag(std::string_view sentence) const override;

 private:
  struct Entry {
    Pos pos;
    std::string lemma;
  };
  std::unordered_map<std::string, Entry> entries_;
};

}  // namespace ctxsim
