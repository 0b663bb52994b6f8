#include "ctxsim/ukwac_subs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ctxsim/errors.hpp"
#include "ctxsim/io.hpp"
#include "ctxsim/text.hpp"

namespace ctxsim::ukwac {

void ParaphraseTable::add(const std::string& w1, const std::string& w2, double score,
                          std::optional<Pos> pos) {
  const std::string a = text::fold_case(w1);
  const std::string b = text::fold_case(w2);
  if (a == b || a.empty() || b.empty()) return;
  auto upsert = [&](const std::string& from, const std::string& to) {
    auto& list = adjacency_[from];
    for (auto& n : list) {
      if (n.word == to && n.pos == pos) {
        n.score = std::max(n.score, score);
        return false;
      }
    }
    list.push_back({to, score, pos});
    return true;
  };
  if (upsert(a, b)) ++pairs_;
  upsert(b, a);
}

ParaphraseTable ParaphraseTable::from_tsv(const std::filesystem::path& path) {
  ParaphraseTable table;
  const auto lines = io::read_lines(path);
  for (std::size_t line_no = 1; line_no <= lines.size(); ++line_no) {
    const std::string& line = lines[line_no - 1];
    if (line.empty() || line[0] == '#') continue;
    const auto cols = text::split(line, '\t');
    const std::string ctx = path.string() + ":" + std::to_string(line_no);
    if (cols.size() != 3 && cols.size() != 4) {
      throw MalformedRow(ctx + ": expected word1, word2, score[, POS]");
    }
    char* end = nullptr;
    const double score = std::strtod(cols[2].c_str(), &end);
    if (cols[2].empty() || *end != '\0') throw MalformedRow(ctx + ": bad score '" + cols[2] + "'");
    const std::string w1 = text::trim(cols[0]);
    const std::string w2 = text::trim(cols[1]);
    if (w1.find(' ') != std::string::npos || w2.find(' ') != std::string::npos) continue;
    std::optional<Pos> pos;
    if (cols.size() == 4 && !cols[3].empty()) {
      try {
        pos = parse_pos(cols[3]);
      } catch (const ConfigError&) {
        throw MalformedRow(ctx + ": unknown POS '" + cols[3] + "'");
      }
    }
    table.add(w1, w2, score, pos);
  }
  return table;
}

std::optional<double> ParaphraseTable::score(const std::string& w1, const std::string& w2) const {
  auto it = adjacency_.find(text::fold_case(w1));
  if (it == adjacency_.end()) return std::nullopt;
  const std::string b = text::fold_case(w2);
  std::optional<double> best;
  for (const auto& n : it->second) {
    if (n.word == b && (!best || n.score > *best)) best = n.score;
  }
  return best;
}

bool ParaphraseTable::contains(const std::string& w1, const std::string& w2) const {
  return score(w1, w2).has_value();
}

const std::vector<ParaphraseTable::Neighbor>& ParaphraseTable::neighbors(
    const std::string& word) const {
  static const std::vector<Neighbor> kEmpty;
  auto it = adjacency_.find(text::fold_case(word));
  return it == adjacency_.end() ? kEmpty : it->second;
}

std::vector<std::string> candidate_substitutes(const std::string& word, Pos pos,
                                               const ParaphraseTable& table, double min_score) {
  std::vector<std::string> out;
  for (const auto& n : table.neighbors(word)) {
    if (!(n.score > min_score)) continue;
    if (n.pos && *n.pos != pos) continue;
    if (std::find(out.begin(), out.end(), n.word) == out.end()) out.push_back(n.word);
  }
  return out;
}

double c2v_score(const Eigen::Ref<const Vector>& substitute, const Eigen::Ref<const Vector>& target,
                 const Eigen::Ref<const Vector>& context) {
  const double st = cosine_similarity(substitute, target);
  const double sc = cosine_similarity(substitute, context);
  return ((st + 1.0) / 2.0) * ((sc + 1.0) / 2.0);
}

ToyContextEmbedder::ToyContextEmbedder(int dim, std::uint64_t seed, std::set<std::string> known)
    : dim_(dim), seed_(seed), known_(std::move(known)) {
  if (dim_ <= 0) throw InvalidConfig("embedder dimension must be positive");
}

Vector ToyContextEmbedder::hashed(const std::string& word) const {
  Rng rng(text::fnv1a(word) ^ (seed_ * 0x9E3779B97F4A7C15ULL));
  Vector v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = rng.normal();
  return v;
}

std::optional<Vector> ToyContextEmbedder::static_vec(const std::string& word) const {
  const std::string key = text::fold_case(word);
  if (!known_.empty() && !known_.count(key)) return std::nullopt;
  return hashed(key);
}

Vector ToyContextEmbedder::context_vec(const std::string& sentence, Span target) const {
  Vector sum = 0.25 * hashed("<context>");
  for (const Span& w : text::split_words(sentence)) {
    if (w.overlaps(target.start, target.end)) continue;
    sum += hashed(text::fold_case(std::string_view(sentence).substr(w.start, w.size())));
  }
  return sum;
}

std::optional<Vector> EncoderContextEmbedder::static_vec(const std::string& word) const {
  if (word.empty()) return std::nullopt;
  const EncodedPair input = build_single_input(word, backend_.tokenizer(), max_len_);
  if (input.length() < 3) return std::nullopt;
  TokenAlignment alignment;
  for (std::size_t i = 1; i + 1 < input.length(); ++i) alignment.wordpiece_indices.push_back(i);
  return pool_target(backend_.encode(input), alignment, 0);
}

Vector EncoderContextEmbedder::context_vec(const std::string& sentence, Span target) const {
  std::string masked = sentence.substr(0, target.start);
  masked += " ";
  masked += kMaskToken;
  masked += " ";
  masked += sentence.substr(target.end);
  const Span mask_span{target.start + 1, target.start + 1 + kMaskToken.size()};
  const EncodedPair input = build_single_input(masked, backend_.tokenizer(), max_len_);
  const TokenAlignment alignment = locate_target(input, mask_span, SentenceRole::kFirst);
  return pool_target(backend_.encode(input), alignment, backend_.n_layers());
}

SubstituteRanking rank_substitutes(const ContextedTarget& instance,
                                   const std::vector<std::string>& candidates,
                                   const ContextEmbedder& embedder, std::size_t* dropped) {
  SubstituteRanking ranking;
  ranking.instance = instance;
  const std::string own = text::fold_case(instance.lemma);
  const auto target = embedder.static_vec(own);
  if (!target) {
    if (dropped) *dropped += candidates.size();
    return ranking;
  }
  const Vector context = embedder.context_vec(instance.sentence, instance.span);
  std::set<std::string> seen;
  for (const auto& raw : candidates) {
    const std::string c = text::fold_case(raw);
    if (c == own || !seen.insert(c).second) continue;
    const auto s = embedder.static_vec(c);
    if (!s) {
      if (dropped) ++*dropped;
      continue;
    }
    ranking.ranked.emplace_back(c, c2v_score(*s, *target, context));
  }
  std::sort(ranking.ranked.begin(), ranking.ranked.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  return ranking;
}

std::string select_same_meaning(const SubstituteRanking& ranking) {
  if (ranking.ranked.empty()) throw EmptyRanking("no substitutes for '" + ranking.instance.lemma + "'");
  return ranking.ranked.front().first;
}

std::optional<std::string> select_different_meaning(const SubstituteRanking& ranking,
                                                    const ParaphraseTable& table) {
  const auto& r = ranking.ranked;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (!table.contains(r[i].first, r[i + 1].first)) return r[i + 1].first;
  }
  return std::nullopt;
}

void PosVocabulary::add(Pos pos, std::string word) {
  auto& list = words_[pos];
  auto it = std::lower_bound(list.begin(), list.end(), word);
  if (it == list.end() || *it != word) list.insert(it, std::move(word));
}

const std::vector<std::string>& PosVocabulary::words(Pos pos) const {
  static const std::vector<std::string> kEmpty;
  auto it = words_.find(pos);
  return it == words_.end() ? kEmpty : it->second;
}

PosVocabulary PosVocabulary::from_corpus(const std::vector<std::string>& sentences,
                                         const PosTagger& tagger, std::size_t min_frequency) {
  std::map<std::pair<Pos, std::string>, std::size_t> counts;
  for (const auto& s : sentences) {
    for (const auto& t : tagger.tag(s)) {
      if (is_content_pos(t.pos)) ++counts[{t.pos, t.lemma}];
    }
  }
  PosVocabulary vocab;
  for (const auto& [key, n] : counts) {
    if (n >= min_frequency) vocab.add(key.first, key.second);
  }
  return vocab;
}

std::string select_random_word(Pos pos, const PosVocabulary& vocabulary,
                               const std::set<std::string>& exclude, Rng& rng) {
  std::vector<const std::string*> eligible;
  for (const auto& w : vocabulary.words(pos)) {
    if (!exclude.count(w)) eligible.push_back(&w);
  }
  if (eligible.empty()) {
    throw EmptyVocabulary(std::string("no eligible ") + std::string(to_string(pos)) +
                          " word outside the exclusion set");
  }
  return *eligible[rng.uniform_index(eligible.size())];
}

std::array<std::size_t, 3> largest_remainder(std::size_t n,
                                             const std::array<double, 3>& proportions) {
  double total = 0.0;
  for (double p : proportions) {
    if (p < 0.0) throw InvalidConfig("class proportions must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidConfig("class proportions must sum to 1");
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double quota = static_cast<double>(n) * proportions[k];
    counts[k] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    remainder[k] = quota - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return remainder[x] > remainder[y] + 1e-12; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[order[i % 3]];
  return counts;
}

namespace {

struct Candidate {
  std::size_t sentence_index;
  TaggedToken token;
  SubstituteRanking ranking;
  std::optional<std::string> different;
  bool c_eligible = false;
  std::set<std::string> exclude;
};

// Picks up to `want` indices from `pool` (seeded, ascending) and removes them.
std::vector<std::size_t> take(std::vector<std::size_t>& pool, std::size_t want, Rng& rng,
                              const std::vector<bool>* eligible = nullptr) {
  std::vector<std::size_t> candidates;
  for (std::size_t i : pool) {
    if (!eligible || (*eligible)[i]) candidates.push_back(i);
  }
  std::vector<std::size_t> picked;
  for (std::size_t k : rng.sample_indices(candidates.size(), want)) picked.push_back(candidates[k]);
  std::vector<std::size_t> rest;
  std::set_difference(pool.begin(), pool.end(), picked.begin(), picked.end(),
                      std::back_inserter(rest));
  pool = std::move(rest);
  return picked;
}

}  // namespace

GenerationResult generate_dataset(const std::vector<std::string>& corpus,
                                  const ParaphraseTable& table, const ContextEmbedder& embedder,
                                  const PosTagger& tagger, const PosVocabulary& vocabulary,
                                  const GenerationOptions& options) {
  GenerationResult result;
  Rng rng(options.seed);
  std::vector<Candidate> candidates;
  for (std::size_t si = 0; si < corpus.size(); ++si) {
    const std::string& sentence = corpus[si];
    for (const auto& tok : tagger.tag(sentence)) {
      if (!is_content_pos(tok.pos)) continue;
      const std::string surface =
          text::fold_case(std::string_view(sentence).substr(tok.span.start, tok.span.size()));
      std::vector<std::string> subs;
      for (auto& c : candidate_substitutes(tok.lemma, tok.pos, table, options.min_score)) {
        if (c != surface && c.find_first_of(" \t") == std::string::npos) {
          subs.push_back(std::move(c));
        }
      }
      if (subs.empty()) continue;
      ContextedTarget instance{sentence, tok.span, tok.lemma, tok.pos, options.language};
      Candidate cand{si, tok, rank_substitutes(instance, subs, embedder, &result.dropped_candidates),
                     std::nullopt, false, {}};
      if (cand.ranking.ranked.empty()) continue;
      cand.different = select_different_meaning(cand.ranking, table);
      cand.exclude.insert(tok.lemma);
      cand.exclude.insert(surface);
      for (const auto& [w, score] : cand.ranking.ranked) cand.exclude.insert(w);
      for (const auto& w : vocabulary.words(tok.pos)) {
        if (!cand.exclude.count(w)) {
          cand.c_eligible = true;
          break;
        }
      }
      candidates.push_back(std::move(cand));
    }
  }
  result.available = candidates.size();
  std::vector<bool> b_ok(candidates.size()), c_ok(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    b_ok[i] = candidates[i].different.has_value();
    c_ok[i] = candidates[i].c_eligible;
    result.b_eligible += b_ok[i] ? 1 : 0;
  }

  const std::size_t n_out = std::min(options.n, candidates.size());
  if (n_out < options.n) {
    result.warnings.push_back("only " + std::to_string(n_out) + " instances available, " +
                              std::to_string(options.n) + " requested");
  }
  auto counts = largest_remainder(n_out, options.proportions);

  std::vector<std::size_t> pool(candidates.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;

  std::vector<std::size_t> picked_b = take(pool, counts[1], rng, &b_ok);
  if (picked_b.size() < counts[1]) {
    // Class-b exhaustion: hand the shortfall to a and c in their own ratio.
    const std::size_t shortfall = counts[1] - picked_b.size();
    const double ac = options.proportions[0] + options.proportions[2];
    const auto split = ac > 0 ? largest_remainder(shortfall, {options.proportions[0] / ac, 0.0,
                                                              options.proportions[2] / ac})
                              : std::array<std::size_t, 3>{shortfall, 0, 0};
    counts[0] += split[0];
    counts[2] += split[2];
    counts[1] = picked_b.size();
    result.warnings.push_back("class b short by " + std::to_string(shortfall) +
                              "; reassigned to a/c");
  }
  std::vector<std::size_t> picked_c = take(pool, counts[2], rng, &c_ok);
  if (picked_c.size() < counts[2]) {
    const std::size_t shortfall = counts[2] - picked_c.size();
    counts[0] += shortfall;
    counts[2] = picked_c.size();
    result.warnings.push_back("class c short by " + std::to_string(shortfall) +
                              "; reassigned to a");
  }
  std::vector<std::size_t> picked_a = take(pool, counts[0], rng);
  counts[0] = picked_a.size();
  result.counts = counts;

  std::vector<std::pair<std::size_t, Label>> assignment;
  for (std::size_t i : picked_a) assignment.emplace_back(i, Label::kA);
  for (std::size_t i : picked_b) assignment.emplace_back(i, Label::kB);
  for (std::size_t i : picked_c) assignment.emplace_back(i, Label::kC);
  std::sort(assignment.begin(), assignment.end());

  for (const auto& [i, cls] : assignment) {
    const Candidate& cand = candidates[i];
    std::string substitute;
    switch (cls) {
      case Label::kA: substitute = select_same_meaning(cand.ranking); break;
      case Label::kB: substitute = *cand.different; break;
      default: substitute = select_random_word(cand.token.pos, vocabulary, cand.exclude, rng); break;
    }
    const std::string& sentence = corpus[cand.sentence_index];
    UkwacInstance inst;
    inst.original_sentence = sentence;
    inst.original_span = cand.token.span;
    inst.substituted_sentence = sentence.substr(0, cand.token.span.start) + substitute +
                                sentence.substr(cand.token.span.end);
    inst.substituted_span = {cand.token.span.start, cand.token.span.start + substitute.size()};
    inst.target_lemma = cand.token.lemma;
    inst.substitute = substitute;
    inst.pos = cand.token.pos;
    inst.cls = cls;
    inst.language = options.language;
    inst.sentence_index = cand.sentence_index;
    result.instances.push_back(std::move(inst));
  }
  return result;
}

LabeledPair to_labeled_pair(const UkwacInstance& instance, std::string id) {
  LabeledPair p;
  p.id = std::move(id);
  p.a = {instance.original_sentence, instance.original_span, instance.target_lemma, instance.pos,
         instance.language};
  p.b = {instance.substituted_sentence, instance.substituted_span, instance.substitute,
         instance.pos, instance.language};
  p.label = instance.cls;
  p.source = Source::kUkwacSubs;
  return p;
}

std::pair<std::vector<UkwacInstance>, std::vector<UkwacInstance>> holdout_stratified(
    const std::vector<UkwacInstance>& instances, std::size_t count, std::uint64_t seed) {
  count = std::min(count, instances.size());
  std::array<std::vector<std::size_t>, 3> by_class;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    by_class[static_cast<std::size_t>(label_index(instances[i].cls))].push_back(i);
  }
  std::array<double, 3> share{};
  for (std::size_t k = 0; k < 3; ++k) {
    share[k] = instances.empty() ? 0.0
                                 : static_cast<double>(by_class[k].size()) /
                                       static_cast<double>(instances.size());
  }
  if (instances.empty()) return {};
  const auto per_class = largest_remainder(count, share);
  Rng rng(seed);
  std::vector<bool> held(instances.size(), false);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t j : rng.sample_indices(by_class[k].size(), per_class[k])) {
      held[by_class[k][j]] = true;
    }
  }
  std::pair<std::vector<UkwacInstance>, std::vector<UkwacInstance>> out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    (held[i] ? out.second : out.first).push_back(instances[i]);
  }
  return out;
}

}  // namespace ctxsim::ukwac
