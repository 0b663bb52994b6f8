#include <map>
#include <ostream>

#include "commands.hpp"
#include "ctxsim/datagen.hpp"
#include "ctxsim/errors.hpp"
#include "ctxsim/io.hpp"
#include "ctxsim/toy_encoder.hpp"
#include "ctxsim/ukwac_subs.hpp"

namespace ctxsim::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const char* kUsimFormat = "TSV: lemma, POS, sentence1, sentence2, score (targets in <strong> tags)";
const char* kCoincoFormat = "TSV: id, lemma, POS, sentence (target in <strong> tags), substitutes;";
const char* kWicDataFormat = "WiC TSV: word, POS, i-j token indices, sentence1, sentence2";
const char* kWicGoldFormat = "one T/F label per line";
const char* kOpusFormat = "TSV: [id,] sentence1, sentence2, quality";
const char* kStoplistFormat = "one word per line in frequency-rank order";
const char* kLexiconFormat = "TSV lexicon: form, POS[, lemma]";
const char* kJsonlFormat = "dataset JSONL, one labeled pair per line";
const char* kCorpusFormat = "one sentence per line, UTF-8";
const char* kPpdbFormat = "TSV: word1, word2, score[, POS]";

ordered_json label_counts(const std::vector<LabeledPair>& pairs) {
  std::map<std::string, std::size_t> counts;
  for (const auto& p : pairs) ++counts[std::string(to_string(p.label))];
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : counts) j[k] = v;
  return j;
}

datagen::OverlapDenominator parse_denominator(const std::string& s) {
  if (s == "min") return datagen::OverlapDenominator::kMin;
  if (s == "max") return datagen::OverlapDenominator::kMax;
  if (s == "union") return datagen::OverlapDenominator::kUnion;
  throw InvalidConfig("--denominator must be min, max or union (got '" + s + "')");
}

std::vector<LabeledPair> maybe_merge(const Resolved& c, RunDir& run,
                                     std::vector<LabeledPair> pairs) {
  const auto legacy_path = c.optional_input("legacy", kJsonlFormat);
  if (!legacy_path) return pairs;
  run.record_input("legacy", *legacy_path);
  const auto legacy = io::read_dataset(*legacy_path);
  const std::size_t before = pairs.size() + legacy.size();
  auto merged = datagen::merge_dedupe(pairs, legacy);
  run.log("merge", {{"new", pairs.size()}, {"legacy", legacy.size()},
                    {"duplicates_removed", before - merged.size()}});
  return merged;
}

std::vector<LabeledPair> build_usim(const Resolved& c, RunDir& run) {
  const auto path = c.input("usim", kUsimFormat);
  run.record_input("usim", path);
  const auto anns = datagen::read_usim(path, parse_language(c.str("language")));
  auto pairs = datagen::binarize_usim(anns, c.real("usim_low"), c.real("usim_high"));
  run.log("binarize_usim", {{"annotations", anns.size()}, {"kept", pairs.size()},
                            {"excluded", anns.size() - pairs.size()}});
  return maybe_merge(c, run, std::move(pairs));
}

std::vector<LabeledPair> build_coinco(const Resolved& c, RunDir& run) {
  const auto path = c.input("coinco", kCoincoFormat);
  run.record_input("coinco", path);
  const auto by_lemma = datagen::read_coinco(path, parse_language(c.str("language")));
  datagen::CoincoSampling opts;
  opts.cap_per_lemma = c.uinteger("cap");
  opts.seed = c.uinteger("seed");
  opts.t_threshold = c.real("t_threshold");
  opts.f_max_shared = c.uinteger("f_max_shared");
  opts.denominator = parse_denominator(c.str("denominator"));
  std::size_t instances = 0;
  for (const auto& [lemma, sets] : by_lemma) instances += sets.size();
  auto pairs = datagen::sample_coinco_pairs(by_lemma, opts);
  run.log("sample_coinco_pairs", {{"lemmas", by_lemma.size()}, {"instances", instances},
                                  {"pairs", pairs.size()}});
  return maybe_merge(c, run, std::move(pairs));
}

std::vector<LabeledPair> build_wic(const Resolved& c, RunDir& run) {
  const auto data = c.input("wic_data", kWicDataFormat);
  const auto gold = c.input("wic_gold", kWicGoldFormat);
  run.record_input("wic_data", data);
  run.record_input("wic_gold", gold);
  auto pairs = datagen::load_wic(data, gold);
  run.log("load_wic", {{"pairs", pairs.size()}});
  return pairs;
}

std::vector<LabeledPair> build_opusparcus(const Resolved& c, RunDir& run) {
  const auto records_path = c.input("opusparcus", kOpusFormat);
  const auto stop_path = c.input("stoplist", kStoplistFormat);
  const auto lexicon_path = c.input("lexicon", kLexiconFormat);
  run.record_input("opusparcus", records_path);
  run.record_input("stoplist", stop_path);
  run.record_input("lexicon", lexicon_path);
  const auto records = datagen::read_paraphrase_records(records_path);
  const auto stoplist = datagen::read_stoplist(stop_path, c.uinteger("stoplist_k"));
  const auto tagger = LexiconTagger::from_file(lexicon_path.string());
  datagen::OpusparcusOptions opts;
  opts.quality_min = c.real("quality_min");
  opts.target_count = c.uinteger("target_count");
  opts.seed = c.uinteger("seed");
  opts.language = parse_language(c.str("language"));
  auto build = datagen::build_opusparcus_pairs(records, stoplist, tagger, opts);
  run.log("build_opusparcus_pairs",
          {{"records", records.size()}, {"eligible_records", build.eligible_records},
           {"skipped_no_shared_word", build.skipped_no_shared_word},
           {"dropped_no_negative", build.dropped_no_negative}, {"pairs", build.pairs.size()}});
  if (build.pairs.size() < opts.target_count) {
    run.warn("opusparcus: " + std::to_string(build.pairs.size()) + " pairs built, " +
             std::to_string(opts.target_count) + " requested");
  }
  return std::move(build.pairs);
}

std::vector<LabeledPair> build_ukwac(const Resolved& c, RunDir& run) {
  const auto corpus_path = c.input("corpus", kCorpusFormat);
  const auto ppdb_path = c.input("ppdb", kPpdbFormat);
  const auto lexicon_path = c.input("lexicon", kLexiconFormat);
  run.record_input("corpus", corpus_path);
  run.record_input("ppdb", ppdb_path);
  run.record_input("lexicon", lexicon_path);

  std::vector<std::string> corpus;
  for (auto& line : io::read_lines(corpus_path)) {
    if (!line.empty()) corpus.push_back(std::move(line));
  }
  const auto table = ukwac::ParaphraseTable::from_tsv(ppdb_path);
  const auto tagger = LexiconTagger::from_file(lexicon_path.string());
  const auto vocab = ukwac::PosVocabulary::from_corpus(corpus, tagger, c.uinteger("min_frequency"));

  const auto props = c.reals("proportions");
  if (props.size() != 3) throw InvalidConfig("--proportions needs three values (a,b,c)");
  ukwac::GenerationOptions opts;
  opts.n = c.uinteger("n");
  opts.proportions = {props[0], props[1], props[2]};
  opts.min_score = c.real("min_score");
  opts.seed = c.uinteger("seed");
  opts.language = parse_language(c.str("language"));

  const std::string kind = c.str("embedder");
  std::unique_ptr<ukwac::ContextEmbedder> embedder;
  std::unique_ptr<ToyEncoder> encoder;
  if (kind == "toy") {
    embedder = std::make_unique<ukwac::ToyContextEmbedder>(
        static_cast<int>(c.integer("embedder_dim")), c.uinteger("embedder_seed"));
  } else if (kind == "encoder") {
    ToyEncoderConfig ec;
    ec.hidden_dim = static_cast<int>(c.integer("embedder_dim"));
    ec.seed = c.uinteger("embedder_seed");
    encoder = std::make_unique<ToyEncoder>(ec);
    embedder = std::make_unique<ukwac::EncoderContextEmbedder>(*encoder);
  } else {
    throw InvalidConfig("--embedder must be toy or encoder (got '" + kind + "')");
  }

  auto result = ukwac::generate_dataset(corpus, table, *embedder, tagger, vocab, opts);
  for (const auto& w : result.warnings) run.warn("ukwac-subs: " + w);
  run.log("generate_dataset",
          {{"sentences", corpus.size()}, {"available", result.available},
           {"b_eligible", result.b_eligible}, {"dropped_candidates", result.dropped_candidates},
           {"a", result.counts[0]}, {"b", result.counts[1]}, {"c", result.counts[2]}});

  auto instances = std::move(result.instances);
  const std::size_t heldout_count = c.uinteger("heldout_count");
  if (heldout_count > 0) {
    auto [train, heldout] = ukwac::holdout_stratified(instances, heldout_count, opts.seed);
    std::vector<LabeledPair> held;
    for (std::size_t i = 0; i < heldout.size(); ++i) {
      held.push_back(ukwac::to_labeled_pair(heldout[i], "ukwac-heldout-" + std::to_string(i)));
    }
    run.write("heldout.jsonl", io::dataset_to_jsonl(held));
    run.set("heldout_counts", label_counts(held));
    instances = std::move(train);
  }
  std::vector<LabeledPair> pairs;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    pairs.push_back(ukwac::to_labeled_pair(instances[i], "ukwac-" + std::to_string(i)));
  }
  return pairs;
}

void execute(const Resolved& c, RunDir* run, std::ostream& out) {
  const std::string source = c.str("source");
  std::vector<LabeledPair> pairs;
  if (source == "usim") {
    pairs = build_usim(c, *run);
  } else if (source == "coinco") {
    pairs = build_coinco(c, *run);
  } else if (source == "wic") {
    pairs = build_wic(c, *run);
  } else if (source == "opusparcus") {
    pairs = build_opusparcus(c, *run);
  } else if (source == "ukwac-subs") {
    pairs = build_ukwac(c, *run);
  } else {
    throw InvalidConfig("--source must be one of usim, coinco, wic, ukwac-subs, opusparcus (got '" +
                        source + "')");
  }
  run->write("dataset.jsonl", io::dataset_to_jsonl(pairs));
  run->set("source", source);
  run->set("seed", c.uinteger("seed"));
  run->set("pairs", pairs.size());
  run->set("label_counts", label_counts(pairs));
  out << source << ": " << pairs.size() << " pairs " << label_counts(pairs).dump() << '\n';
}

}  // namespace

Command build_data_command() {
  Command cmd;
  cmd.name = "build-data";
  cmd.description = "Build a fine-tuning dataset (JSONL) from resource files";
  cmd.params = {
      {"source", Kind::kString, nullptr, "usim | coinco | wic | ukwac-subs | opusparcus"},
      {"out", Kind::kPath, nullptr, "fresh output directory"},
      {"seed", Kind::kUInt, 0, "sampling seed"},
      {"language", Kind::kString, "en", "en | fi"},
      {"usim", Kind::kPath, nullptr, kUsimFormat},
      {"usim-low", Kind::kReal, 2.0, "scores below this are F"},
      {"usim-high", Kind::kReal, 4.0, "scores above this are T"},
      {"coinco", Kind::kPath, nullptr, kCoincoFormat},
      {"cap", Kind::kUInt, 500, "CoInCo pairs sampled per lemma"},
      {"t-threshold", Kind::kReal, 0.5, "CoInCo overlap fraction needed for T"},
      {"f-max-shared", Kind::kUInt, 1, "CoInCo shared substitutes allowed for F"},
      {"denominator", Kind::kString, "min", "CoInCo overlap denominator: min | max | union"},
      {"legacy", Kind::kPath, nullptr, "existing JSONL merged in (its labels win on duplicates)"},
      {"wic-data", Kind::kPath, nullptr, kWicDataFormat},
      {"wic-gold", Kind::kPath, nullptr, kWicGoldFormat},
      {"opusparcus", Kind::kPath, nullptr, kOpusFormat},
      {"stoplist", Kind::kPath, nullptr, kStoplistFormat},
      {"stoplist-k", Kind::kUInt, 200, "how many top-ranked words to stop"},
      {"lexicon", Kind::kPath, nullptr, kLexiconFormat},
      {"quality-min", Kind::kReal, 15.0, "paraphrases need quality strictly above this"},
      {"target-count", Kind::kUInt, 100000, "Opusparcus pairs to emit (half T, half F)"},
      {"corpus", Kind::kPath, nullptr, kCorpusFormat},
      {"ppdb", Kind::kPath, nullptr, kPpdbFormat},
      {"n", Kind::kUInt, 100000, "ukWaC-subs instances to generate"},
      {"proportions", Kind::kRealList, json::array({0.4, 0.3, 0.3}), "class a,b,c proportions"},
      {"min-score", Kind::kReal, 2.0, "paraphrase-table score a substitute must exceed"},
      {"min-frequency", Kind::kUInt, 5, "corpus frequency for class-c vocabulary"},
      {"embedder", Kind::kString, "toy", "substitute ranker: toy | encoder"},
      {"embedder-dim", Kind::kInt, 16, "embedder vector size"},
      {"embedder-seed", Kind::kUInt, 7, "embedder weight seed"},
      {"heldout-count", Kind::kUInt, 0, "ukWaC-subs instances held out (stratified)"},
  };
  cmd.execute = execute;
  return cmd;
}

}  // namespace ctxsim::cli
