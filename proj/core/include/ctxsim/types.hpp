#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace ctxsim {

// Coarse part-of-speech tagset shared by every resource reader.
enum class Pos { kNoun, kVerb, kAdj, kAdv, kOther };

enum class Language { kEn, kFi };

// Binary labels (T/F) and the three ukWaC-subs classes share one enum so a
// LabeledPair can carry either; is_binary()/is_ternary() tell them apart.
enum class Label { kT, kF, kA, kB, kC };

enum class Source { kUsim, kCoinco, kWic, kUkwacSubs, kOpusparcus };

bool is_content_pos(Pos pos);
bool is_binary(Label label);
bool is_ternary(Label label);
bool is_binary_source(Source source);

// Class index used by the CLASSIF head: T=0, F=1 and a=0, b=1, c=2.
int label_index(Label label);
Label label_from_index(int index, int n_classes);

std::string_view to_string(Pos pos);
std::string_view to_string(Language lang);
std::string_view to_string(Label label);
std::string_view to_string(Source source);

Pos parse_pos(std::string_view text);
Language parse_language(std::string_view text);
Label parse_label(std::string_view text);
Source parse_source(std::string_view text);

// Half-open byte range [start, end) into a UTF-8 sentence.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool overlaps(std::size_t begin, std::size_t finish) const {
    return begin < end && start < finish;
  }
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct ContextedTarget {
  std::string sentence;
  Span span;
  std::string lemma;
  Pos pos = Pos::kOther;
  Language language = Language::kEn;

  std::string_view surface() const {
    return std::string_view(sentence).substr(span.start, span.size());
  }
  // Throws InvalidTarget when the span is empty, out of range or whitespace.
  void validate() const;

  friend bool operator==(const ContextedTarget&, const ContextedTarget&) = default;
};

struct LabeledPair {
  std::string id;
  ContextedTarget a;
  ContextedTarget b;
  Label label = Label::kT;
  std::optional<double> graded_score;
  Source source = Source::kWic;

  // Checks label arity against the source and the graded-score rule.
  void validate() const;

  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

}  // namespace ctxsim
