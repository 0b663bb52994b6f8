#include "ctxsim/pos_tagger.hpp"

#include <fstream>

#include "ctxsim/errors.hpp"
#include "ctxsim/text.hpp"

namespace ctxsim {

LexiconTagger LexiconTagger::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw MissingResource("cannot open POS lexicon '" + path +
                          "' (expected TSV: form<TAB>POS[<TAB>lemma])");
  }
  LexiconTagger tagger;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() < 2) {
      throw MalformedRow(path + ":" + std::to_string(line_no) + ": expected form<TAB>POS");
    }
    tagger.add(cols[0], parse_pos(cols[1]), cols.size() > 2 ? cols[2] : std::string());
  }
  return tagger;
}

void LexiconTagger::add(std::string_view form, Pos pos, std::string_view lemma) {
  const std::string key = text::fold_case(form);
  entries_[key] = Entry{pos, lemma.empty() ? key : text::fold_case(lemma)};
}

std::vector<TaggedToken> LexiconTagger::tag(std::string_view sentence) const {
  std::vector<TaggedToken> out;
  for (const Span& span : text::split_words(sentence)) {
    const std::string key = text::fold_case(sentence.substr(span.start, span.size()));
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      out.push_back({span, key, Pos::kOther});
    } else {
      out.push_back({span, it->second.lemma, it->second.pos});
    }
  }
  return out;
}

}  // namespace ctxsim
