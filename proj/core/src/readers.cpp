#include <cstdlib>
#include <fstream>

#include "ctxsim/datagen.hpp"
#include "ctxsim/errors.hpp"
#include "ctxsim/io.hpp"
#include "ctxsim/text.hpp"

namespace ctxsim::datagen {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

double parse_double(const std::string& field, const std::string& context) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size()) {
    throw MalformedRow(context + ": '" + field + "' is not a number");
  }
  return v;
}

// Sentence with exactly one <strong>-marked target.
ContextedTarget marked_target(const std::string& field, const std::string& lemma, Pos pos,
                              Language lang, const std::string& context) {
  auto marked = text::strip_markers(field);
  if (marked.marked.size() != 1) {
    throw MalformedRow(context + ": expected exactly one <strong>-marked target, found " +
                       std::to_string(marked.marked.size()));
  }
  ContextedTarget t;
  t.sentence = std::move(marked.text);
  t.span = marked.marked[0];
  t.lemma = text::fold_case(lemma);
  t.pos = pos;
  t.language = lang;
  try {
    t.validate();
  } catch (const InvalidTarget& e) {
    throw MalformedRow(context + ": " + e.what());
  }
  return t;
}

bool skip_line(const std::string& line) { return line.empty() || line[0] == '#'; }

}  // namespace

std::vector<LabeledPair> load_wic(const std::filesystem::path& data_path,
                                  const std::filesystem::path& gold_path) {
  const auto data = io::read_lines(data_path);
  const auto gold = io::read_lines(gold_path);
  std::vector<std::string> labels;
  for (const auto& g : gold) {
    if (!text::trim(g).empty()) labels.push_back(text::trim(g));
  }
  std::vector<LabeledPair> out;
  std::size_t row = 0;
  for (std::size_t line_no = 1; line_no <= data.size(); ++line_no) {
    const std::string& line = data[line_no - 1];
    if (line.empty()) continue;
    const std::string ctx = where(data_path, line_no);
    const auto cols = text::split(line, '\t');
    if (cols.size() != 5) {
      throw MalformedRow(ctx + ": expected 5 tab-separated columns, found " +
                         std::to_string(cols.size()));
    }
    const auto idx = text::split(cols[2], '-');
    if (idx.size() != 2) throw MalformedRow(ctx + ": index column must look like i-j");
    if (row >= labels.size()) {
      throw MalformedRow(ctx + ": no gold label in " + gold_path.string());
    }
    const std::string& label = labels[row];
    if (label != "T" && label != "F") {
      throw MalformedRow(where(gold_path, row + 1) + ": gold label must be T or F");
    }
    Pos pos;
    try {
      pos = parse_pos(cols[1]);
    } catch (const ConfigError&) {
      throw MalformedRow(ctx + ": unknown POS '" + cols[1] + "'");
    }
    LabeledPair p;
    p.id = "wic-" + std::to_string(row);
    p.label = label == "T" ? Label::kT : Label::kF;
    p.source = Source::kWic;
    const std::string* sentences[] = {&cols[3], &cols[4]};
    ContextedTarget* targets[] = {&p.a, &p.b};
    for (int k = 0; k < 2; ++k) {
      const auto tokens = text::split_whitespace(*sentences[k]);
      char* end = nullptr;
      const long i = std::strtol(idx[k].c_str(), &end, 10);
      if (idx[k].empty() || *end != '\0' || i < 0 || static_cast<std::size_t>(i) >= tokens.size()) {
        throw MalformedRow(ctx + ": token index '" + idx[k] + "' out of range");
      }
      targets[k]->sentence = *sentences[k];
      targets[k]->span = tokens[static_cast<std::size_t>(i)];
      targets[k]->lemma = text::fold_case(cols[0]);
      targets[k]->pos = pos;
      targets[k]->language = Language::kEn;
    }
    out.push_back(std::move(p));
    ++row;
  }
  if (row != labels.size()) {
    throw MalformedRow(gold_path.string() + ": " + std::to_string(labels.size()) +
                       " labels for " + std::to_string(row) + " data rows");
  }
  return out;
}

std::vector<UsimAnnotation> read_usim(const std::filesystem::path& path, Language lang) {
  std::vector<UsimAnnotation> out;
  const auto lines = io::read_lines(path);
  for (std::size_t line_no = 1; line_no <= lines.size(); ++line_no) {
    const std::string& line = lines[line_no - 1];
    if (skip_line(line)) continue;
    const std::string ctx = where(path, line_no);
    const auto cols = text::split(line, '\t');
    if (cols.size() != 5) {
      throw MalformedRow(ctx + ": expected lemma, POS, sentence1, sentence2, score");
    }
    Pos pos;
    try {
      pos = parse_pos(cols[1]);
    } catch (const ConfigError&) {
      throw MalformedRow(ctx + ": unknown POS '" + cols[1] + "'");
    }
    UsimAnnotation ann;
    ann.a = marked_target(cols[2], cols[0], pos, lang, ctx);
    ann.b = marked_target(cols[3], cols[0], pos, lang, ctx);
    ann.score = parse_double(cols[4], ctx);
    if (ann.score < 1.0 || ann.score > 5.0) throw MalformedRow(ctx + ": score outside [1, 5]");
    out.push_back(std::move(ann));
  }
  return out;
}

std::map<std::string, std::vector<SubstituteSet>> read_coinco(const std::filesystem::path& path,
                                                              Language lang) {
  std::map<std::string, std::vector<SubstituteSet>> out;
  const auto lines = io::read_lines(path);
  for (std::size_t line_no = 1; line_no <= lines.size(); ++line_no) {
    const std::string& line = lines[line_no - 1];
    if (skip_line(line)) continue;
    const std::string ctx = where(path, line_no);
    const auto cols = text::split(line, '\t');
    if (cols.size() != 5) {
      throw MalformedRow(ctx + ": expected id, lemma, POS, sentence, substitutes");
    }
    Pos pos;
    try {
      pos = parse_pos(cols[2]);
    } catch (const ConfigError&) {
      throw MalformedRow(ctx + ": unknown POS '" + cols[2] + "'");
    }
    ContextedTarget t = marked_target(cols[3], cols[1], pos, lang, ctx);
    std::vector<std::string> subs = cols[4].empty() ? std::vector<std::string>{}
                                                    : text::split(cols[4], ';');
    const std::string lemma = t.lemma;
    out[lemma].push_back(make_substitute_set(std::move(t), subs));
  }
  return out;
}

std::vector<ParaphraseRecord> read_paraphrase_records(const std::filesystem::path& path) {
  std::vector<ParaphraseRecord> out;
  const auto lines = io::read_lines(path);
  for (std::size_t line_no = 1; line_no <= lines.size(); ++line_no) {
    const std::string& line = lines[line_no - 1];
    if (skip_line(line)) continue;
    const std::string ctx = where(path, line_no);
    const auto cols = text::split(line, '\t');
    if (cols.size() != 3 && cols.size() != 4) {
      throw MalformedRow(ctx + ": expected [id,] sentence1, sentence2, quality");
    }
    const std::size_t o = cols.size() - 3;
    ParaphraseRecord r{cols[o], cols[o + 1], parse_double(cols[o + 2], ctx)};
    if (r.s1.empty() || r.s2.empty()) throw MalformedRow(ctx + ": empty sentence");
    out.push_back(std::move(r));
  }
  return out;
}

std::set<std::string> read_stoplist(const std::filesystem::path& path, std::size_t k) {
  std::set<std::string> out;
  std::size_t taken = 0;
  for (const auto& line : io::read_lines(path)) {
    if (taken >= k) break;
    const std::string w = text::trim(text::split(line, '\t')[0]);
    if (w.empty()) continue;
    out.insert(text::fold_case(w));
    ++taken;
  }
  return out;
}

}  // namespace ctxsim::datagen
