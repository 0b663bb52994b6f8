#include <gtest/gtest.h>

#include <bit>
#include <fstream>
#include <map>

#include "ctxsim/datagen.hpp"
#include "ctxsim/errors.hpp"
#include "ctxsim/io.hpp"
#include "ctxsim/rng.hpp"
#include "ctxsim/text.hpp"
#include "test_support.hpp"

namespace ctxsim::datagen {
namespace {

using ctxsim::testing::fixture;
using ctxsim::testing::TempDir;

ContextedTarget instance(const std::string& lemma, const std::string& sentence = "") {
  ContextedTarget t;
  t.sentence = sentence.empty() ? "the " + lemma + " here" : sentence;
  t.span = {4, 4 + lemma.size()};
  t.lemma = lemma;
  t.pos = Pos::kNoun;
  return t;
}

SubstituteSet subs(const std::vector<std::string>& words, const std::string& lemma = "war",
                   const std::string& sentence = "") {
  return make_substitute_set(instance(lemma, sentence), words);
}

TEST(Usim, TableAnchorsAndExclusion) {
  const auto anns = read_usim(fixture("usim.tsv"));
  std::map<std::string, Label> by_lemma_score;
  const auto pairs = binarize_usim(anns);
  for (const auto& p : pairs) {
    if (p.a.lemma == "check") EXPECT_EQ(p.label, Label::kT);
    if (p.a.lemma == "dry") EXPECT_EQ(p.label, Label::kF);
    EXPECT_EQ(p.source, Source::kUsim);
    ASSERT_TRUE(p.graded_score);
    EXPECT_TRUE(*p.graded_score < 2.0 || *p.graded_score > 4.0);
  }
  UsimAnnotation mid{instance("bank"), instance("bank"), 3.0};
  EXPECT_TRUE(binarize_usim({mid}).empty());
  UsimAnnotation hi{instance("check"), instance("check"), 4.3};
  UsimAnnotation lo{instance("dry"), instance("dry"), 1.3};
  const auto two = binarize_usim({hi, lo});
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].label, Label::kT);
  EXPECT_EQ(*two[0].graded_score, 4.3);
  EXPECT_EQ(two[1].label, Label::kF);
  // Thresholds are strict.
  EXPECT_TRUE(binarize_usim({{instance("x"), instance("x"), 2.0}}).empty());
  EXPECT_TRUE(binarize_usim({{instance("x"), instance("x"), 4.0}}).empty());
}

TEST(Usim, PartitionsEveryInput) {
  Rng rng(12);
  std::vector<UsimAnnotation> anns;
  for (int i = 0; i < 500; ++i) {
    // Include exact threshold values now and then.
    const double score = i % 10 == 0 ? (i % 20 == 0 ? 2.0 : 4.0) : 1.0 + 4.0 * rng.uniform();
    anns.push_back({instance("w"), instance("w"), score});
  }
  std::size_t t = 0, f = 0, excluded = 0;
  for (const auto& a : anns) {
    if (a.score > 4.0) {
      ++t;
    } else if (a.score < 2.0) {
      ++f;
    } else {
      ++excluded;
    }
  }
  const auto pairs = binarize_usim(anns);
  std::size_t got_t = 0, got_f = 0;
  for (const auto& p : pairs) (p.label == Label::kT ? got_t : got_f)++;
  EXPECT_EQ(got_t, t);
  EXPECT_EQ(got_f, f);
  EXPECT_EQ(got_t + got_f + excluded, anns.size());
}

TEST(Coinco, SubstituteSetsFoldDedupeAndDropOwnLemma) {
  const auto s = subs({"Fight", "fight", " battle ", "war", ""});
  EXPECT_EQ(s.substitutes, (std::set<std::string>{"battle", "fight"}));
}

TEST(Coinco, WarExampleOverlap) {
  const auto s1 = subs({"fight", "battle", "conflict", "combat", "struggle", "clash"});
  const auto s2 = subs({"fight", "battle", "conflict", "combat", "hostility", "warfare", "strife"});
  const auto o = coinco_overlap(s1, s2);
  EXPECT_EQ(o.shared, 4u);
  EXPECT_DOUBLE_EQ(o.fraction, 4.0 / 6.0);
  EXPECT_EQ(label_coinco_pair(s1, s2), PairDecision::kT);
  EXPECT_DOUBLE_EQ(coinco_overlap(s1, s2, OverlapDenominator::kMax).fraction, 4.0 / 7.0);
  EXPECT_DOUBLE_EQ(coinco_overlap(s1, s2, OverlapDenominator::kUnion).fraction, 4.0 / 9.0);
}

TEST(Coinco, SimpleCases) {
  const auto right1 = subs({"correct", "proper", "accurate"}, "right");
  const auto right2 = subs({"entitlement", "privilege"}, "right");
  EXPECT_EQ(coinco_overlap(right1, right2).shared, 0u);
  EXPECT_EQ(coinco_overlap(right1, right2).fraction, 0.0);
  EXPECT_EQ(label_coinco_pair(right1, right2), PairDecision::kF);
  const auto five = subs({"a", "b", "c", "d", "e"});
  EXPECT_EQ(coinco_overlap(five, five).shared, 5u);
  EXPECT_EQ(coinco_overlap(five, five).fraction, 1.0);
  EXPECT_EQ(label_coinco_pair(subs({"a", "b"}), subs({"a", "c"})), PairDecision::kExcluded);
  EXPECT_THROW(coinco_overlap(subs({}), five), EmptySubstituteSet);
  EXPECT_THROW(label_coinco_pair(five, subs({"war"})), EmptySubstituteSet);
}

// Independent bitmask implementation of the T/F rules.
PairDecision oracle(unsigned a, unsigned b) {
  const int shared = std::popcount(a & b);
  const int denom = std::min(std::popcount(a), std::popcount(b));
  const bool t_rule = 2 * shared >= denom && shared >= 2;
  const bool f_rule = shared <= 1 && 2 * shared < denom;
  if (t_rule && !f_rule) return PairDecision::kT;
  if (f_rule && !t_rule) return PairDecision::kF;
  return PairDecision::kExcluded;
}

TEST(Coinco, LabelMatchesExhaustiveBruteForce) {
  const std::vector<std::string> alphabet = {"s0", "s1", "s2", "s3", "s4", "s5"};
  std::vector<unsigned> masks;
  for (unsigned m = 1; m < 64; ++m) {
    if (std::popcount(m) <= 5) masks.push_back(m);
  }
  auto to_set = [&](unsigned m) {
    std::vector<std::string> w;
    for (int i = 0; i < 6; ++i) {
      if (m & (1u << i)) w.push_back(alphabet[i]);
    }
    return subs(w);
  };
  std::size_t agree = 0, total = 0;
  for (unsigned a : masks) {
    for (unsigned b : masks) {
      ++total;
      if (label_coinco_pair(to_set(a), to_set(b)) == oracle(a, b)) ++agree;
    }
  }
  EXPECT_EQ(total, 62u * 62u);
  EXPECT_EQ(agree, total);
}

std::vector<SubstituteSet> identical_group(const std::string& lemma, std::size_t n,
                                           const std::vector<std::string>& words) {
  std::vector<SubstituteSet> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(subs(words, lemma, "the " + lemma + " sentence " + std::to_string(i)));
  }
  return out;
}

std::vector<SubstituteSet> singleton_group(const std::string& lemma, std::size_t n) {
  std::vector<SubstituteSet> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(subs({"u" + std::to_string(i)}, lemma, "the " + lemma + " other " +
                                                             std::to_string(i)));
  }
  return out;
}

std::map<std::string, std::size_t> per_lemma(const std::vector<LabeledPair>& pairs) {
  std::map<std::string, std::size_t> m;
  for (const auto& p : pairs) ++m[p.a.lemma];
  return m;
}

std::pair<std::size_t, std::size_t> class_counts(const std::vector<LabeledPair>& pairs) {
  std::size_t t = 0, f = 0;
  for (const auto& p : pairs) (p.label == Label::kT ? t : f)++;
  return {t, f};
}

TEST(Coinco, CapPerLemma) {
  // 50 identical sets: C(50, 2) = 1225 T pairs; 50 disjoint singletons: 1225 F.
  std::map<std::string, std::vector<SubstituteSet>> by_lemma;
  by_lemma["alpha"] = identical_group("alpha", 50, {"x", "y", "z"});
  by_lemma["beta"] = singleton_group("beta", 50);
  CoincoSampling opts;
  opts.seed = 1;
  const auto pairs = sample_coinco_pairs(by_lemma, opts);
  const auto counts = per_lemma(pairs);
  EXPECT_EQ(counts.at("alpha"), 500u);
  EXPECT_EQ(counts.at("beta"), 500u);
}

TEST(Coinco, SmallLemmaKeepsEverything) {
  // Groups of 3 and 6: 3 + 15 = 18 T pairs and 3 * 6 = 18 F pairs.
  std::map<std::string, std::vector<SubstituteSet>> by_lemma;
  auto g = identical_group("gamma", 3, {"p", "q"});
  for (auto& s : identical_group("gamma", 6, {"r", "s"})) {
    s.instance.sentence += " b";
    g.push_back(std::move(s));
  }
  by_lemma["gamma"] = g;
  const auto pairs = sample_coinco_pairs(by_lemma, {});
  EXPECT_EQ(pairs.size(), 36u);
  EXPECT_EQ(class_counts(pairs), (std::pair<std::size_t, std::size_t>{18, 18}));
}

TEST(Coinco, BalancesByDownsamplingMajority) {
  // 25 identical sets give 300 T; capping 1225 singleton pairs at 700 gives 700 F.
  std::map<std::string, std::vector<SubstituteSet>> by_lemma;
  by_lemma["alpha"] = identical_group("alpha", 25, {"x", "y"});
  by_lemma["beta"] = singleton_group("beta", 50);
  CoincoSampling opts;
  opts.cap_per_lemma = 700;
  opts.seed = 4;
  const auto pairs = sample_coinco_pairs(by_lemma, opts);
  EXPECT_EQ(class_counts(pairs), (std::pair<std::size_t, std::size_t>{300, 300}));
  for (const auto& p : pairs) EXPECT_NO_THROW(p.validate());
}

TEST(Coinco, SeededOutputIsByteIdentical) {
  const auto by_lemma = read_coinco(fixture("coinco.tsv"));
  CoincoSampling opts;
  opts.seed = 9;
  opts.cap_per_lemma = 20;
  const auto a = io::dataset_to_jsonl(sample_coinco_pairs(by_lemma, opts));
  const auto b = io::dataset_to_jsonl(sample_coinco_pairs(by_lemma, opts));
  EXPECT_EQ(a, b);
  opts.seed = 10;
  EXPECT_NE(a, io::dataset_to_jsonl(sample_coinco_pairs(by_lemma, opts)));
  const auto pairs = sample_coinco_pairs(by_lemma, opts);
  const auto [t, f] = class_counts(pairs);
  EXPECT_EQ(t, f);
  for (const auto& [lemma, n] : per_lemma(pairs)) EXPECT_LE(n, 20u) << lemma;
}

LabeledPair simple_pair(const std::string& s1, const std::string& s2, Label label,
                        const std::string& id) {
  LabeledPair p;
  p.id = id;
  p.a = instance("word", s1);
  p.b = instance("word", s2);
  p.label = label;
  p.source = Source::kCoinco;
  return p;
}

TEST(Merge, ExamplesAndPrecedence) {
  const std::vector<LabeledPair> fresh = {simple_pair("the word a", "the word b", Label::kT, "n0"),
                                          simple_pair("the word c", "the word d", Label::kF, "n1"),
                                          simple_pair("the word e", "the word f", Label::kT, "n2")};
  const std::vector<LabeledPair> legacy = {simple_pair("the word g", "the word h", Label::kT, "l0"),
                                           simple_pair("the word i", "the word j", Label::kF, "l1")};
  EXPECT_EQ(merge_dedupe(fresh, legacy).size(), 5u);

  const auto same = simple_pair("the word a", "the word b", Label::kT, "x");
  EXPECT_EQ(merge_dedupe({same}, {same}).size(), 1u);

  // Reversed order is the same unordered key; legacy label T wins over new F.
  const auto new_f = simple_pair("the word b", "the word a", Label::kF, "new");
  const auto old_t = simple_pair("the word a", "the word b", Label::kT, "old");
  const auto merged = merge_dedupe({new_f}, {old_t});
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged[0].label, Label::kT);
}

TEST(Merge, Idempotent) {
  Rng rng(3);
  auto random_pairs = [&](int n, const std::string& tag) {
    std::vector<LabeledPair> v;
    for (int i = 0; i < n; ++i) {
      const auto a = std::to_string(rng.uniform_index(6));
      const auto b = std::to_string(rng.uniform_index(6));
      v.push_back(simple_pair("the word " + a, "the word " + b,
                              rng.uniform() < 0.5 ? Label::kT : Label::kF, tag + std::to_string(i)));
    }
    return v;
  };
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = random_pairs(8, "x");
    const auto y = random_pairs(8, "y");
    const auto once = merge_dedupe(x, y);
    EXPECT_EQ(merge_dedupe(x, once), once);
  }
}

TEST(Wic, LoadsFixture) {
  const auto pairs = load_wic(fixture("wic/train.data.txt"), fixture("wic/train.gold.txt"));
  ASSERT_EQ(pairs.size(), 6u);
  EXPECT_EQ(pairs[0].a.lemma, "sale");
  EXPECT_EQ(pairs[0].label, Label::kT);
  EXPECT_EQ(pairs[0].a.surface(), "Sale");
  EXPECT_EQ(pairs[0].b.surface(), "sale");
  EXPECT_EQ(pairs[1].a.lemma, "answer");
  EXPECT_EQ(pairs[1].label, Label::kF);
  EXPECT_EQ(pairs[2].b.surface(), "bank");
  for (const auto& p : pairs) {
    EXPECT_EQ(p.source, Source::kWic);
    EXPECT_NO_THROW(p.validate());
  }
}

TEST(Wic, MalformedRowsReportLineNumbers) {
  TempDir dir("wic");
  io::write_file_atomic(dir / "d.txt", "run\tV\t1-1\tThey run .\tWe run .\nbad\tV\t0-0\tonly four\n");
  io::write_file_atomic(dir / "g.txt", "T\nF\n");
  try {
    load_wic(dir / "d.txt", dir / "g.txt");
    FAIL() << "expected MalformedRow";
  } catch (const MalformedRow& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
  io::write_file_atomic(dir / "d2.txt", "run\tV\t1-9\tThey run .\tWe run .\n");
  io::write_file_atomic(dir / "g2.txt", "T\n");
  EXPECT_THROW(load_wic(dir / "d2.txt", dir / "g2.txt"), MalformedRow);
  io::write_file_atomic(dir / "g3.txt", "T\nT\n");
  EXPECT_THROW(load_wic(dir / "d2.txt", dir / "g3.txt"), MalformedRow);
}

class Opusparcus : public ::testing::Test {
 protected:
  void SetUp() override {
    tagger_ = LexiconTagger::from_file(fixture("lexicon.tsv").string());
    stoplist_ = read_stoplist(fixture("stoplist.txt"));
    records_ = read_paraphrase_records(fixture("opusparcus.tsv"));
  }
  LexiconTagger tagger_;
  std::set<std::string> stoplist_;
  std::vector<ParaphraseRecord> records_;
};

TEST_F(Opusparcus, BalancedAndWellFormed) {
  OpusparcusOptions opts;
  opts.target_count = 100;
  opts.seed = 2;
  const auto build = build_opusparcus_pairs(records_, stoplist_, tagger_, opts);
  ASSERT_EQ(build.pairs.size(), 100u);
  std::size_t t = 0, f = 0;
  bool love_t = false, love_f = false;
  for (const auto& p : build.pairs) {
    (p.label == Label::kT ? t : f)++;
    EXPECT_FALSE(stoplist_.count(p.a.lemma)) << p.a.lemma;
    EXPECT_NE(p.a.lemma, "make");
    EXPECT_EQ(text::fold_case(p.a.surface()), text::fold_case(p.b.surface()));
    EXPECT_NO_THROW(p.validate());
    if (p.a.lemma == "love") (p.label == Label::kT ? love_t : love_f) = true;
  }
  EXPECT_EQ(t, 50u);
  EXPECT_EQ(f, 50u);
  EXPECT_TRUE(love_t);
  EXPECT_TRUE(love_f);
  EXPECT_EQ(build.skipped_no_shared_word, 1u);  // the "make" pair
}

TEST_F(Opusparcus, NegativesAreNotParaphrases) {
  OpusparcusOptions opts;
  opts.target_count = 1000;
  const auto build = build_opusparcus_pairs(records_, stoplist_, tagger_, opts);
  std::set<std::pair<std::string, std::string>> para;
  for (const auto& r : records_) {
    if (r.quality > 15.0) {
      para.insert({r.s1, r.s2});
      para.insert({r.s2, r.s1});
    }
  }
  for (const auto& p : build.pairs) {
    if (p.label == Label::kF) EXPECT_FALSE(para.count({p.a.sentence, p.b.sentence}));
  }
  const auto again = build_opusparcus_pairs(records_, stoplist_, tagger_, opts);
  EXPECT_EQ(io::dataset_to_jsonl(build.pairs), io::dataset_to_jsonl(again.pairs));
}

TEST_F(Opusparcus, QualityCutoffIsStrictAndLoneParaphrasesAreDropped) {
  std::vector<ParaphraseRecord> records = {
      {"the car is here .", "i saw the car today .", 15.0},
      {"the bank is here .", "i saw the bank today .", 15.01},
  };
  OpusparcusOptions opts;
  opts.target_count = 10;
  const auto build = build_opusparcus_pairs(records, stoplist_, tagger_, opts);
  EXPECT_EQ(build.eligible_records, 1u);
  // The only two "bank" sentences are paraphrases, so no negative exists.
  EXPECT_EQ(build.dropped_no_negative, 1u);
  EXPECT_TRUE(build.pairs.empty());
}

TEST(Readers, CoincoAndStoplist) {
  const auto by_lemma = read_coinco(fixture("coinco.tsv"));
  EXPECT_EQ(by_lemma.size(), 4u);
  for (const auto& [lemma, sets] : by_lemma) {
    EXPECT_EQ(sets.size(), 10u);
    for (const auto& s : sets) EXPECT_EQ(text::fold_case(s.instance.surface()), lemma);
  }
  EXPECT_EQ(read_stoplist(fixture("stoplist.txt"), 3), (std::set<std::string>{"the", "a", "an"}));
  EXPECT_EQ(read_stoplist(fixture("stoplist.txt")).size(), 36u);
}

}  // namespace
}  // namespace ctxsim::datagen
