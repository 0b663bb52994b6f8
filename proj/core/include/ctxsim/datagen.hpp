#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctxsim/pos_tagger.hpp"
#include "ctxsim/types.hpp"

namespace ctxsim::datagen {

// ---- Usim ------------------------------------------------------------------

struct UsimAnnotation {
  ContextedTarget a;
  ContextedTarget b;
  double score = 0.0;  // mean usage similarity, 1..5
};

// score < low -> F, score > high -> T, anything in [low, high] is left out.
std::vector<LabeledPair> binarize_usim(const std::vector<UsimAnnotation>& annotations,
                                       double low = 2.0, double high = 4.0);

// ---- CoInCo ----------------------------------------------------------------

struct SubstituteSet {
  ContextedTarget instance;
  std::set<std::string> substitutes;  // case-folded, never the instance's own lemma
};

SubstituteSet make_substitute_set(ContextedTarget instance,
                                  const std::vector<std::string>& raw_substitutes);

enum class OverlapDenominator { kMin, kMax, kUnion };

struct Overlap {
  std::size_t shared = 0;
  double fraction = 0.0;
};

Overlap coinco_overlap(const SubstituteSet& s1, const SubstituteSet& s2,
                       OverlapDenominator denominator = OverlapDenominator::kMin);

enum class PairDecision { kT, kF, kExcluded };

// T: fraction >= t_threshold with at least two shared substitutes.
// F: at most f_max_shared shared and fraction < t_threshold.
// Everything else, including pairs that satisfy both raw rules, is excluded.
PairDecision label_coinco_pair(const SubstituteSet& s1, const SubstituteSet& s2,
                               double t_threshold = 0.5, std::size_t f_max_shared = 1,
                               OverlapDenominator denominator = OverlapDenominator::kMin);

struct CoincoSampling {
  std::size_t cap_per_lemma = 500;
  std::uint64_t seed = 0;
  double t_threshold = 0.5;
  std::size_t f_max_shared = 1;
  OverlapDenominator denominator = OverlapDenominator::kMin;
};

// Labels every instance pair within each lemma, keeps a seeded uniform sample
// of at most cap_per_lemma labeled pairs per lemma, then downsamples the
// majority class so |T| == |F|. Instances without substitutes are skipped.
std::vector<LabeledPair> sample_coinco_pairs(
    const std::map<std::string, std::vector<SubstituteSet>>& by_lemma,
    const CoincoSampling& options);

// Union keyed on the unordered pair of (sentence, span). Legacy entries win
// on conflict; output is sorted by key.
std::vector<LabeledPair> merge_dedupe(const std::vector<LabeledPair>& new_pairs,
                                      const std::vector<LabeledPair>& legacy_pairs);

// ---- WiC -------------------------------------------------------------------

// WiC distribution format: data file rows `word POS i-j sentence1 sentence2`
// (tab-separated, token indices over whitespace tokens) and a gold file with
// one T/F per line.
std::vector<LabeledPair> load_wic(const std::filesystem::path& data_path,
                                  const std::filesystem::path& gold_path);

// ---- Opusparcus ------------------------------------------------------------

struct ParaphraseRecord {
  std::string s1;
  std::string s2;
  double quality = 0.0;
};

struct OpusparcusOptions {
  double quality_min = 15.0;  // strict: quality > quality_min
  std::size_t target_count = 100000;
  std::uint64_t seed = 0;
  Language language = Language::kEn;
};

struct OpusparcusBuild {
  std::vector<LabeledPair> pairs;  // T/F alternating, exactly balanced
  std::size_t eligible_records = 0;
  std::size_t skipped_no_shared_word = 0;
  std::size_t dropped_no_negative = 0;
};

// `stoplist` holds the most frequent words (already cut to the top K).
OpusparcusBuild build_opusparcus_pairs(const std::vector<ParaphraseRecord>& records,
                                       const std::set<std::string>& stoplist,
                                       const PosTagger& tagger,
                                       const OpusparcusOptions& options);

// ---- resource readers ------------------------------------------------------

// Usim TSV: lemma, POS, sentence1, sentence2, score; targets wrapped in
// <strong>...</strong>.
std::vector<UsimAnnotation> read_usim(const std::filesystem::path& path,
                                      Language lang = Language::kEn);

// CoInCo TSV: id, lemma, POS, sentence (target in <strong>), substitutes
// separated by ';'. Grouped by lemma.
std::map<std::string, std::vector<SubstituteSet>> read_coinco(const std::filesystem::path& path,
                                                              Language lang = Language::kEn);

// Opusparcus TSV: [id<TAB>] sentence1, sentence2, quality.
std::vector<ParaphraseRecord> read_paraphrase_records(const std::filesystem::path& path);

// Ranked frequency list, one word per line; keeps the first k entries.
std::set<std::string> read_stoplist(const std::filesystem::path& path, std::size_t k = 200);

}  // namespace ctxsim::datagen
