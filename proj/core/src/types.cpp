#include "ctxsim/types.hpp"

#include <cctype>

#include "ctxsim/errors.hpp"

namespace ctxsim {

bool is_content_pos(Pos pos) { return pos != Pos::kOther; }

bool is_binary(Label label) { return label == Label::kT || label == Label::kF; }

bool is_ternary(Label label) { return !is_binary(label); }

bool is_binary_source(Source source) { return source != Source::kUkwacSubs; }

int label_index(Label label) {
  switch (label) {
    case Label::kT:
    case Label::kA:
      return 0;
    case Label::kF:
    case Label::kB:
      return 1;
    case Label::kC:
      return 2;
  }
  return 0;
}

Label label_from_index(int index, int n_classes) {
  if (n_classes == 2) {
    if (index == 0) return Label::kT;
    if (index == 1) return Label::kF;
  } else if (n_classes == 3) {
    if (index == 0) return Label::kA;
    if (index == 1) return Label::kB;
    if (index == 2) return Label::kC;
  }
  throw InvalidConfig("class index " + std::to_string(index) + " invalid for " +
                      std::to_string(n_classes) + " classes");
}

std::string_view to_string(Pos pos) {
  switch (pos) {
    case Pos::kNoun: return "NOUN";
    case Pos::kVerb: return "VERB";
    case Pos::kAdj: return "ADJ";
    case Pos::kAdv: return "ADV";
    case Pos::kOther: return "OTHER";
  }
  return "OTHER";
}

std::string_view to_string(Language lang) {
  return lang == Language::kFi ? "fi" : "en";
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kT: return "T";
    case Label::kF: return "F";
    case Label::kA: return "a";
    case Label::kB: return "b";
    case Label::kC: return "c";
  }
  return "T";
}

std::string_view to_string(Source source) {
  switch (source) {
    case Source::kUsim: return "USIM";
    case Source::kCoinco: return "COINCO";
    case Source::kWic: return "WIC";
    case Source::kUkwacSubs: return "UKWAC_SUBS";
    case Source::kOpusparcus: return "OPUSPARCUS";
  }
  return "WIC";
}

namespace {

std::string upper(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

Pos parse_pos(std::string_view text) {
  const std::string u = upper(text);
  if (u == "NOUN" || u == "N" || u == "NN") return Pos::kNoun;
  if (u == "VERB" || u == "V" || u == "VB") return Pos::kVerb;
  if (u == "ADJ" || u == "A" || u == "J" || u == "JJ") return Pos::kAdj;
  if (u == "ADV" || u == "R" || u == "RB") return Pos::kAdv;
  if (u == "OTHER" || u == "X") return Pos::kOther;
  throw InvalidConfig("unknown part-of-speech tag '" + std::string(text) + "'");
}

Language parse_language(std::string_view text) {
  if (text == "en") return Language::kEn;
  if (text == "fi") return Language::kFi;
  throw InvalidConfig("unsupported language '" + std::string(text) + "' (expected en or fi)");
}

Label parse_label(std::string_view text) {
  if (text == "T") return Label::kT;
  if (text == "F") return Label::kF;
  if (text == "a" || text == "A") return Label::kA;
  if (text == "b" || text == "B") return Label::kB;
  if (text == "c" || text == "C") return Label::kC;
  throw InvalidConfig("unknown label '" + std::string(text) + "'");
}

Source parse_source(std::string_view text) {
  const std::string u = upper(text);
  if (u == "USIM") return Source::kUsim;
  if (u == "COINCO") return Source::kCoinco;
  if (u == "WIC") return Source::kWic;
  if (u == "UKWAC_SUBS" || u == "UKWAC-SUBS") return Source::kUkwacSubs;
  if (u == "OPUSPARCUS") return Source::kOpusparcus;
  throw InvalidConfig("unknown dataset source '" + std::string(text) + "'");
}

void ContextedTarget::validate() const {
  if (!(span.start < span.end && span.end <= sentence.size())) {
    throw InvalidTarget("span [" + std::to_string(span.start) + ", " +
                        std::to_string(span.end) + ") outside sentence of length " +
                        std::to_string(sentence.size()));
  }
  for (char c : surface()) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      throw InvalidTarget("span covers whitespace: '" + std::string(surface()) + "'");
    }
  }
}

void LabeledPair::validate() const {
  a.validate();
  b.validate();
  if (is_binary_source(source) != is_binary(label)) {
    throw InvalidTarget(std::string("label ") + std::string(to_string(label)) +
                        " does not match source " + std::string(to_string(source)));
  }
  if (graded_score.has_value() != (source == Source::kUsim)) {
    throw InvalidTarget("graded_score must be present exactly for USIM pairs");
  }
  if (graded_score && (*graded_score < 1.0 || *graded_score > 5.0)) {
    throw InvalidTarget("USIM graded_score outside [1, 5]");
  }
}

}  // namespace ctxsim
