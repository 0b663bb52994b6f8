#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ctxsim/encoder.hpp"
#include "ctxsim/pos_tagger.hpp"
#include "ctxsim/rng.hpp"
#include "ctxsim/types.hpp"

namespace ctxsim::ukwac {

// Symmetric word-pair table with PPDB-style quality scores.
class ParaphraseTable {
 public:
  struct Neighbor {
    std::string word;
    double score = 0.0;
    std::optional<Pos> pos;
  };

  // Self-pairs are ignored; a repeated pair keeps its highest score.
  void add(const std::string& w1, const std::string& w2, double score,
           std::optional<Pos> pos = std::nullopt);

  // TSV rows `word1 word2 score [POS]`. Multi-word phrases are skipped: the
  // substitution task replaces exactly one token.
  static ParaphraseTable from_tsv(const std::filesystem::path& path);

  bool contains(const std::string& w1, const std::string& w2) const;
  std::optional<double> score(const std::string& w1, const std::string& w2) const;
  const std::vector<Neighbor>& neighbors(const std::string& word) const;
  std::size_t size() const { return pairs_; }

 private:
  std::unordered_map<std::string, std::vector<Neighbor>> adjacency_;
  std::size_t pairs_ = 0;
};

// Neighbours of `word` scoring strictly above min_score; when the table
// carries POS tags only same-POS neighbours are returned.
std::vector<std::string> candidate_substitutes(const std::string& word, Pos pos,
                                               const ParaphraseTable& table,
                                               double min_score = 2.0);

// ((cos(s,t)+1)/2) * ((cos(s,C)+1)/2), in [0, 1].
double c2v_score(const Eigen::Ref<const Vector>& substitute, const Eigen::Ref<const Vector>& target,
                 const Eigen::Ref<const Vector>& context);

// Static word vectors plus a context vector for a target slot.
class ContextEmbedder {
 public:
  virtual ~ContextEmbedder() = default;
  // nullopt when the word has no static representation.
  virtual std::optional<Vector> static_vec(const std::string& word) const = 0;
  virtual Vector context_vec(const std::string& sentence, Span target) const = 0;
};

// Deterministic embedder for tests: each word gets a hash-seeded Gaussian
// vector; the context vector is the mean static vector of the other words
// in the sentence plus a fixed offset. An optional known-word list makes
// every other word lack a static vector.
class ToyContextEmbedder final : public ContextEmbedder {
 public:
  explicit ToyContextEmbedder(int dim = 16, std::uint64_t seed = 7,
                              std::set<std::string> known_words = {});

  std::optional<Vector> static_vec(const std::string& word) const override;
  Vector context_vec(const std::string& sentence, Span target) const override;

 private:
  Vector hashed(const std::string& word) const;

  int dim_;
  std::uint64_t seed_;
  std::set<std::string> known_;
};

// Adapter over any EncoderBackend: the static vector is the embedding-layer
// mean of the word's wordpieces, the context vector is the last-layer
// representation of a [MASK] placed in the target slot.
class EncoderContextEmbedder final : public ContextEmbedder {
 public:
  explicit EncoderContextEmbedder(const EncoderBackend& backend,
                                  std::size_t max_len = kDefaultMaxLen)
      : backend_(backend), max_len_(max_len) {}

  std::optional<Vector> static_vec(const std::string& word) const override;
  Vector context_vec(const std::string& sentence, Span target) const override;

 private:
  const EncoderBackend& backend_;
  std::size_t max_len_;
};

struct SubstituteRanking {
  ContextedTarget instance;
  std::vector<std::pair<std::string, double>> ranked;  // score desc, ties by word asc
};

// Candidates equal to the target lemma or duplicated are removed; those
// lacking a static vector are dropped and counted in `dropped`.
SubstituteRanking rank_substitutes(const ContextedTarget& instance,
                                   const std::vector<std::string>& candidates,
                                   const ContextEmbedder& embedder,
                                   std::size_t* dropped = nullptr);

std::string select_same_meaning(const SubstituteRanking& ranking);

// Walks adjacent ranked pairs (s_i, s_i+1) and returns s_i+1 at the first
// pair that is not in the table; nullopt when there is none.
std::optional<std::string> select_different_meaning(const SubstituteRanking& ranking,
                                                    const ParaphraseTable& table);

// Same-POS vocabulary drawn from the corpus for class (c).
class PosVocabulary {
 public:
  void add(Pos pos, std::string word);
  const std::vector<std::string>& words(Pos pos) const;

  // Lemmas of content words seen at least min_frequency times.
  static PosVocabulary from_corpus(const std::vector<std::string>& sentences,
                                   const PosTagger& tagger, std::size_t min_frequency = 5);

 private:
  std::map<Pos, std::vector<std::string>> words_;  // sorted, unique
};

// Uniform draw among vocabulary words of `pos` not in `exclude`.
std::string select_random_word(Pos pos, const PosVocabulary& vocabulary,
                               const std::set<std::string>& exclude, Rng& rng);

// Exact per-class counts for n items: floor(n * p_k), then the leftover
// units go to the largest fractional remainders (ties to the lower class).
std::array<std::size_t, 3> largest_remainder(std::size_t n, const std::array<double, 3>& proportions);

struct UkwacInstance {
  std::string original_sentence;
  std::string substituted_sentence;
  Span original_span;
  Span substituted_span;
  std::string target_lemma;
  std::string substitute;
  Pos pos = Pos::kOther;
  Label cls = Label::kA;
  Language language = Language::kEn;
  std::size_t sentence_index = 0;
};

struct GenerationOptions {
  std::size_t n = 100000;
  std::array<double, 3> proportions = {0.40, 0.30, 0.30};
  double min_score = 2.0;
  std::uint64_t seed = 0;
  Language language = Language::kEn;
};

struct GenerationResult {
  std::vector<UkwacInstance> instances;  // in corpus order
  std::size_t available = 0;             // rankable content-word instances
  std::size_t b_eligible = 0;
  std::size_t dropped_candidates = 0;    // candidates without static vectors
  std::array<std::size_t, 3> counts{};   // a, b, c
  std::vector<std::string> warnings;
};

GenerationResult generate_dataset(const std::vector<std::string>& corpus,
                                  const ParaphraseTable& table, const ContextEmbedder& embedder,
                                  const PosTagger& tagger, const PosVocabulary& vocabulary,
                                  const GenerationOptions& options);

LabeledPair to_labeled_pair(const UkwacInstance& instance, std::string id);

// Splits off `count` instances stratified by class (per-class share by
// largest remainder), seeded. Returns {train, heldout}; order is preserved.
std::pair<std::vector<UkwacInstance>, std::vector<UkwacInstance>> holdout_stratified(
    const std::vector<UkwacInstance>& instances, std::size_t count, std::uint64_t seed);

}  // namespace ctxsim::ukwac
