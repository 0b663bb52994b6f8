#include "ctxsim/datagen.hpp"

#include <algorithm>
#include <tuple>

#include "ctxsim/errors.hpp"
#include "ctxsim/rng.hpp"
#include "ctxsim/text.hpp"

namespace ctxsim::datagen {

std::vector<LabeledPair> binarize_usim(const std::vector<UsimAnnotation>& annotations,
                                       double low, double high) {
  if (!(low < high)) throw InvalidConfig("binarize_usim needs low < high");
  std::vector<LabeledPair> out;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto& ann = annotations[i];
    std::optional<Label> label;
    if (ann.score < low) label = Label::kF;
    if (ann.score > high) label = Label::kT;
    if (!label) continue;
    LabeledPair p;
    p.id = "usim-" + std::to_string(i);
    p.a = ann.a;
    p.b = ann.b;
    p.label = *label;
    p.graded_score = ann.score;
    p.source = Source::kUsim;
    out.push_back(std::move(p));
  }
  return out;
}

SubstituteSet make_substitute_set(ContextedTarget instance,
                                  const std::vector<std::string>& raw_substitutes) {
  SubstituteSet set;
  const std::string own = text::fold_case(instance.lemma);
  for (const auto& raw : raw_substitutes) {
    std::string s = text::fold_case(text::trim(raw));
    if (!s.empty() && s != own) set.substitutes.insert(std::move(s));
  }
  set.instance = std::move(instance);
  return set;
}

Overlap coinco_overlap(const SubstituteSet& s1, const SubstituteSet& s2,
                       OverlapDenominator denominator) {
  if (s1.substitutes.empty() || s2.substitutes.empty()) {
    throw EmptySubstituteSet("instance of '" + s1.instance.lemma + "' has no substitutes");
  }
  std::size_t shared = 0;
  for (const auto& s : s1.substitutes) shared += s2.substitutes.count(s);
  const std::size_t n1 = s1.substitutes.size();
  const std::size_t n2 = s2.substitutes.size();
  std::size_t denom = 0;
  switch (denominator) {
    case OverlapDenominator::kMin: denom = std::min(n1, n2); break;
    case OverlapDenominator::kMax: denom = std::max(n1, n2); break;
    case OverlapDenominator::kUnion: denom = n1 + n2 - shared; break;
  }
  return {shared, static_cast<double>(shared) / static_cast<double>(denom)};
}

PairDecision label_coinco_pair(const SubstituteSet& s1, const SubstituteSet& s2,
                               double t_threshold, std::size_t f_max_shared,
                               OverlapDenominator denominator) {
  const Overlap o = coinco_overlap(s1, s2, denominator);
  if (o.fraction >= t_threshold && o.shared >= 2) return PairDecision::kT;
  if (o.shared <= f_max_shared && o.fraction < t_threshold) return PairDecision::kF;
  return PairDecision::kExcluded;
}

std::vector<LabeledPair> sample_coinco_pairs(
    const std::map<std::string, std::vector<SubstituteSet>>& by_lemma,
    const CoincoSampling& options) {
  Rng rng(options.seed);
  struct Candidate {
    const SubstituteSet* a;
    const SubstituteSet* b;
    std::string id;
    bool positive;
  };
  std::vector<Candidate> kept;
  for (const auto& [lemma, instances] : by_lemma) {
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (!instances[i].substitutes.empty()) usable.push_back(i);
    }
    std::vector<Candidate> labeled;
    for (std::size_t x = 0; x < usable.size(); ++x) {
      for (std::size_t y = x + 1; y < usable.size(); ++y) {
        const auto& a = instances[usable[x]];
        const auto& b = instances[usable[y]];
        const PairDecision d = label_coinco_pair(a, b, options.t_threshold,
                                                 options.f_max_shared, options.denominator);
        if (d == PairDecision::kExcluded) continue;
        labeled.push_back({&a, &b,
                           "coinco-" + lemma + "-" + std::to_string(usable[x]) + "-" +
                               std::to_string(usable[y]),
                           d == PairDecision::kT});
      }
    }
    if (labeled.size() > options.cap_per_lemma) {
      for (std::size_t i : rng.sample_indices(labeled.size(), options.cap_per_lemma)) {
        kept.push_back(labeled[i]);
      }
    } else {
      kept.insert(kept.end(), labeled.begin(), labeled.end());
    }
  }

  std::vector<std::size_t> pos_idx, neg_idx;
  for (std::size_t i = 0; i < kept.size(); ++i) (kept[i].positive ? pos_idx : neg_idx).push_back(i);
  std::vector<bool> keep(kept.size(), true);
  auto& majority = pos_idx.size() > neg_idx.size() ? pos_idx : neg_idx;
  const std::size_t target = std::min(pos_idx.size(), neg_idx.size());
  if (majority.size() > target) {
    std::vector<bool> chosen(majority.size(), false);
    for (std::size_t i : rng.sample_indices(majority.size(), target)) chosen[i] = true;
    for (std::size_t i = 0; i < majority.size(); ++i) {
      if (!chosen[i]) keep[majority[i]] = false;
    }
  }

  std::vector<LabeledPair> out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (!keep[i]) continue;
    LabeledPair p;
    p.id = kept[i].id;
    p.a = kept[i].a->instance;
    p.b = kept[i].b->instance;
    p.label = kept[i].positive ? Label::kT : Label::kF;
    p.source = Source::kCoinco;
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

using TargetKey = std::tuple<std::string, std::size_t, std::size_t>;
using PairKey = std::pair<TargetKey, TargetKey>;

PairKey pair_key(const LabeledPair& p) {
  TargetKey ka{p.a.sentence, p.a.span.start, p.a.span.end};
  TargetKey kb{p.b.sentence, p.b.span.start, p.b.span.end};
  if (kb < ka) std::swap(ka, kb);
  return {std::move(ka), std::move(kb)};
}

}  // namespace

std::vector<LabeledPair> merge_dedupe(const std::vector<LabeledPair>& new_pairs,
                                      const std::vector<LabeledPair>& legacy_pairs) {
  std::map<PairKey, LabeledPair> merged;
  for (const auto& p : legacy_pairs) merged.emplace(pair_key(p), p);
  for (const auto& p : new_pairs) merged.emplace(pair_key(p), p);
  std::vector<LabeledPair> out;
  out.reserve(merged.size());
  for (auto& [key, p] : merged) out.push_back(std::move(p));
  return out;
}

namespace {

// Folded surface form of each content-word token that is not stoplisted,
// mapped to its first occurrence.
std::map<std::string, const TaggedToken*> content_words(const std::string& sentence,
                                                         const std::vector<TaggedToken>& tokens,
                                                         const std::set<std::string>& stoplist) {
  std::map<std::string, const TaggedToken*> out;
  for (const auto& t : tokens) {
    if (!is_content_pos(t.pos)) continue;
    std::string form = text::fold_case(std::string_view(sentence).substr(t.span.start, t.span.size()));
    if (stoplist.count(form) || stoplist.count(t.lemma)) continue;
    out.emplace(std::move(form), &t);
  }
  return out;
}

ContextedTarget make_target(const std::string& sentence, const TaggedToken& token, Language lang) {
  ContextedTarget t;
  t.sentence = sentence;
  t.span = token.span;
  t.lemma = token.lemma;
  t.pos = token.pos;
  t.language = lang;
  return t;
}

std::pair<std::string, std::string> unordered(const std::string& a, const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

OpusparcusBuild build_opusparcus_pairs(const std::vector<ParaphraseRecord>& records,
                                       const std::set<std::string>& stoplist,
                                       const PosTagger& tagger,
                                       const OpusparcusOptions& options) {
  OpusparcusBuild build;
  Rng rng(options.seed);

  // Every distinct sentence of the resource, in sorted order, with its
  // content-word index.
  std::map<std::string, std::vector<TaggedToken>> tagged;
  for (const auto& r : records) {
    for (const std::string* s : {&r.s1, &r.s2}) {
      if (!tagged.count(*s)) tagged.emplace(*s, tagger.tag(*s));
    }
  }
  std::vector<const std::string*> sentences;
  std::map<std::string, std::vector<std::size_t>> word_index;  // form -> sentence ids
  std::map<std::string, std::map<std::string, const TaggedToken*>> words_of;
  for (const auto& [sentence, tokens] : tagged) {
    const std::size_t id = sentences.size();
    sentences.push_back(&sentence);
    auto words = content_words(sentence, tokens, stoplist);
    for (const auto& [form, tok] : words) word_index[form].push_back(id);
    words_of.emplace(sentence, std::move(words));
  }

  std::set<std::pair<std::string, std::string>> paraphrases;
  for (const auto& r : records) {
    if (r.quality > options.quality_min && r.s1 != r.s2) paraphrases.insert(unordered(r.s1, r.s2));
  }

  auto sample_negative = [&](const std::string& form) -> std::pair<std::size_t, std::size_t> {
    const auto& ids = word_index.at(form);
    const std::size_t n = ids.size();
    auto eligible = [&](std::size_t x, std::size_t y) {
      return !paraphrases.count(unordered(*sentences[ids[x]], *sentences[ids[y]]));
    };
    if (n >= 2 && n <= 512) {
      std::vector<std::pair<std::size_t, std::size_t>> all;
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
          if (eligible(x, y)) all.emplace_back(ids[x], ids[y]);
        }
      }
      if (!all.empty()) return all[rng.uniform_index(all.size())];
    } else if (n > 512) {
      // Rejection sampling is still uniform over eligible unordered pairs.
      for (int attempt = 0; attempt < 10000; ++attempt) {
        std::size_t x = rng.uniform_index(n);
        std::size_t y = rng.uniform_index(n - 1);
        if (y >= x) ++y;
        if (x > y) std::swap(x, y);
        if (eligible(x, y)) return {ids[x], ids[y]};
      }
    }
    throw InsufficientNegatives("no non-paraphrase sentence pair shares '" + form + "'");
  };

  struct Couple {
    LabeledPair positive;
    LabeledPair negative;
  };
  std::vector<Couple> couples;
  for (const auto& r : records) {
    if (!(r.quality > options.quality_min) || r.s1 == r.s2) continue;
    ++build.eligible_records;
    const auto& w1 = words_of.at(r.s1);
    const auto& w2 = words_of.at(r.s2);
    // First shared content word in sentence-1 order.
    const TaggedToken* first = nullptr;
    std::string form;
    for (const auto& [f, tok] : w1) {
      if (!w2.count(f)) continue;
      if (!first || tok->span.start < first->span.start) {
        first = tok;
        form = f;
      }
    }
    if (!first) {
      ++build.skipped_no_shared_word;
      continue;
    }
    std::pair<std::size_t, std::size_t> neg;
    try {
      neg = sample_negative(form);
    } catch (const InsufficientNegatives&) {
      ++build.dropped_no_negative;
      continue;
    }
    Couple c;
    c.positive.a = make_target(r.s1, *first, options.language);
    c.positive.b = make_target(r.s2, *w2.at(form), options.language);
    c.positive.label = Label::kT;
    c.positive.source = Source::kOpusparcus;
    const std::string& n1 = *sentences[neg.first];
    const std::string& n2 = *sentences[neg.second];
    c.negative.a = make_target(n1, *words_of.at(n1).at(form), options.language);
    c.negative.b = make_target(n2, *words_of.at(n2).at(form), options.language);
    c.negative.label = Label::kF;
    c.negative.source = Source::kOpusparcus;
    couples.push_back(std::move(c));
  }

  const std::size_t wanted = options.target_count / 2;
  std::vector<std::size_t> chosen;
  if (couples.size() > wanted) {
    chosen = rng.sample_indices(couples.size(), wanted);
  } else {
    for (std::size_t i = 0; i < couples.size(); ++i) chosen.push_back(i);
  }
  std::size_t k = 0;
  for (std::size_t i : chosen) {
    Couple& c = couples[i];
    c.positive.id = "opus-" + std::to_string(k) + "-T";
    c.negative.id = "opus-" + std::to_string(k) + "-F";
    build.pairs.push_back(std::move(c.positive));
    build.pairs.push_back(std::move(c.negative));
    ++k;
  }
  return build;
}

}  // namespace ctxsim::datagen
