// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctxsim/datagen.hpp"
#include "ctxsim/errors.hpp"
#include "ctxsim/io.hpp"
#include "ctxsim/metrics.hpp"
#include "ctxsim/similarity.hpp"
#include "ctxsim/text.hpp"
#include "ctxsim/toy_encoder.hpp"
#include "ctxsim/training.hpp"
#include "ctxsim/ukwac_subs.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"
#include "test_support.hpp"

namespace {

using namespace ctxsim;
using ctxsim::testing::fixture;
using ctxsim::testing::golden;
using ctxsim::testing::TempDir;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure reasons for the report line.
class Tally {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  bool ok() const { return failures_ == 0; }
  Outcome outcome(const std::string& summary) const {
    if (ok()) return {true, summary};
    return {false, summary + " | " + std::to_string(failures_) + " failure(s): " + notes_};
  }

 private:
  std::size_t failures_ = 0;
  std::string notes_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

Vector random_vector(int n, Rng& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

// ---- 1 ---------------------------------------------------------------------

Outcome metric_oracles() {
  const auto start = Clock::now();
  Rng rng(101);
  Tally t;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(50), y(50);
    for (std::size_t i = 0; i < 50; ++i) {
      x[i] = rng.normal();
      y[i] = 0.5 * x[i] + rng.normal();
      if (trial % 5 == 0) {
        x[i] = std::round(2 * x[i]);
        y[i] = std::round(2 * y[i]);
      }
    }
    const double up = metrics::uncentered_pearson(x, y);
    const double p = metrics::pearson(x, y);
    const double s = metrics::spearman(x, y);
    const double h = metrics::harmonic_mean(p, s);
    const double deltas[] = {
        std::abs(up - static_cast<double>(testing::oracle_uncentered(x, y))),
        std::abs(p - static_cast<double>(testing::oracle_pearson(x, y))),
        std::abs(s - static_cast<double>(testing::oracle_spearman(x, y))),
        std::abs(h - static_cast<double>(testing::oracle_harmonic(p, s)))};
    for (double d : deltas) {
      worst = std::max(worst, d);
      t.expect(d < 1e-10, "trial " + std::to_string(trial) + " |delta| " + fmt(d));
    }
  }
  const double secs = seconds_since(start);
  t.expect(secs < 5.0, "runtime " + fmt(secs) + " s");
  return t.outcome("max |delta| " + fmt(worst) + " over 100 series, " + fmt(secs) + " s");
}

// ---- 2 ---------------------------------------------------------------------

long double eq1_brute(const Vector& s, const Vector& t, const Vector& c) {
  auto cos = [](const Vector& a, const Vector& b) {
    long double dot = 0, na = 0, nb = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      dot += static_cast<long double>(a[i]) * b[i];
      na += static_cast<long double>(a[i]) * a[i];
      nb += static_cast<long double>(b[i]) * b[i];
    }
    return dot / std::sqrt(na * nb);
  };
  return ((cos(s, t) + 1) / 2) * ((cos(s, c) + 1) / 2);
}

Outcome c2v_equation() {
  Tally t;
  const Vector e0 = Vector::Unit(3, 0), e1 = Vector::Unit(3, 1), e2 = Vector::Unit(3, 2);
  t.expect(ukwac::c2v_score(e0, e0, e0) == 1.0, "anchor 1.0");
  t.expect(ukwac::c2v_score(e2, e0, e1) == 0.25, "anchor 0.25");
  t.expect(ukwac::c2v_score(-e0, e0, e1) == 0.0, "anchor 0.0");
  Rng rng(202);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int dim = 2 + static_cast<int>(rng.uniform_index(30));
    const Vector s = random_vector(dim, rng), tv = random_vector(dim, rng), c = random_vector(dim, rng);
    const double d = std::abs(ukwac::c2v_score(s, tv, c) - static_cast<double>(eq1_brute(s, tv, c)));
    worst = std::max(worst, d);
    t.expect(d < 1e-12, "triple " + std::to_string(i) + " |delta| " + fmt(d));
  }
  return t.outcome("anchors exact; max |delta| " + fmt(worst) + " over 1000 triples");
}

// ---- 3 ---------------------------------------------------------------------

Outcome delta_identities() {
  static const std::vector<std::string> kWords = {
      "bank", "river", "money", "plant", "light", "stone", "music", "paper", "glass", "house",
      "öljy", "talo", "cloud", "field", "ship", "storm", "tiger", "chair", "bread", "metal"};
  Rng rng(303);
  Tally t;
  std::size_t checks = 0;
  for (int fixture_no = 0; fixture_no < 100; ++fixture_no) {
    ToyEncoderConfig cfg;
    cfg.hidden_dim = 8 + static_cast<int>(rng.uniform_index(9));
    cfg.n_layers = 1 + static_cast<int>(rng.uniform_index(3));
    cfg.seed = rng.next();
    const ToyEncoder enc(cfg);
    auto context = [&](const std::string& a, const std::string& b) {
      const std::size_t len = 4 + rng.uniform_index(10);
      const std::size_t ia = rng.uniform_index(len);
      std::size_t ib = rng.uniform_index(len - 1);
      if (ib >= ia) ++ib;
      std::string s;
      for (std::size_t i = 0; i < len; ++i) {
        if (i) s += ' ';
        if (i == ia) {
          s += "<strong>" + a + "</strong>";
        } else if (i == ib) {
          s += "<strong>" + b + "</strong>";
        } else {
          s += kWords[rng.uniform_index(kWords.size())];
        }
      }
      return s;
    };
    const std::string a = kWords[rng.uniform_index(kWords.size())];
    std::string b = kWords[rng.uniform_index(kWords.size())];
    if (b == a) b = a == "bank" ? "river" : "bank";
    const auto item = similarity::make_item(std::to_string(fixture_no), a, b, context(a, b), context(a, b));
    similarity::GwscItem swapped = item;
    std::swap(swapped.context1, swapped.context2);
    std::swap(swapped.a1, swapped.a2);
    std::swap(swapped.b1, swapped.b2);
    similarity::GwscItem same = item;
    same.context2 = same.context1;
    same.a2 = same.a1;
    same.b2 = same.b1;
    for (int layer = 0; layer <= cfg.n_layers; ++layer) {
      const double d = similarity::delta_sim(enc, item, layer);
      const double r = similarity::delta_sim(enc, swapped, layer);
      const double z = similarity::delta_sim(enc, same, layer);
      t.expect(d == -r, "fixture " + std::to_string(fixture_no) + " antisymmetry");
      t.expect(z == 0.0, "fixture " + std::to_string(fixture_no) + " identity");
      ++checks;
    }
  }
  return t.outcome(std::to_string(checks) + " (fixture, layer) checks over 100 fixtures");
}

// ---- 4 ---------------------------------------------------------------------

template <typename F>
Eigen::VectorXd central_difference(Eigen::VectorXd x, F&& f) {
  const double h = 1e-5;
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

double rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& n) {
  const double denom = a.norm() + n.norm();
  return denom < 1e-12 ? 0.0 : (a - n).norm() / denom;
}

Outcome gradient_checks() {
  using namespace training;
  const int hidden = 8;
  Rng rng(404);
  Tally t;
  double worst = 0.0;
  auto record = [&](double e, const std::string& what) {
    worst = std::max(worst, e);
    t.expect(e < 1e-4, what + " rel " + fmt(e));
  };
  for (int i = 0; i < 50; ++i) {
    const int classes = i % 2 ? 3 : 2;
    const int gold = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(classes)));
    LinearPairHead head = LinearPairHead::zeros(classes, hidden);
    for (Eigen::Index k = 0; k < head.weight.size(); ++k) head.weight.data()[k] = rng.normal();
    for (Eigen::Index k = 0; k < head.bias.size(); ++k) head.bias[k] = rng.normal();
    const Vector a = random_vector(hidden, rng), b = random_vector(hidden, rng);
    const auto g = classif_loss_grad(a, b, head, gold);
    record(rel_error(g.d_rep_a, central_difference(a, [&](const Eigen::VectorXd& x) {
             return classif_loss(classif_forward(x, b, head), gold);
           })),
           "classif d_a #" + std::to_string(i));
    record(rel_error(g.d_rep_b, central_difference(b, [&](const Eigen::VectorXd& x) {
             return classif_loss(classif_forward(a, x, head), gold);
           })),
           "classif d_b #" + std::to_string(i));
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(head.weight.data(), head.weight.size());
    const Eigen::VectorXd dw = Eigen::Map<const Eigen::VectorXd>(g.d_weight.data(), g.d_weight.size());
    record(rel_error(dw, central_difference(w, [&](const Eigen::VectorXd& x) {
             LinearPairHead h2 = head;
             Eigen::Map<Eigen::VectorXd>(h2.weight.data(), h2.weight.size()) = x;
             return classif_loss(classif_forward(a, b, h2), gold);
           })),
           "classif d_W #" + std::to_string(i));
    record(rel_error(g.d_bias, central_difference(head.bias, [&](const Eigen::VectorXd& x) {
             LinearPairHead h2 = head;
             h2.bias = x;
             return classif_loss(classif_forward(a, b, h2), gold);
           })),
           "classif d_bias #" + std::to_string(i));

    const Label label = i % 2 ? Label::kT : Label::kF;
    // A negative margin keeps the F hinge active so the gradient is informative.
    const double margin = label == Label::kF ? -1.5 : 0.0;
    const auto c = cosdist_loss_grad(a, b, label, margin);
    record(rel_error(c.d_rep_a, central_difference(a, [&](const Eigen::VectorXd& x) {
             return cosdist_loss(x, b, label, margin);
           })),
           "cosdist d_a #" + std::to_string(i));
    record(rel_error(c.d_rep_b, central_difference(b, [&](const Eigen::VectorXd& x) {
             return cosdist_loss(a, x, label, margin);
           })),
           "cosdist d_b #" + std::to_string(i));
  }
  return t.outcome("max relative error " + fmt(worst) + " over 50 inputs, both heads");
}

// ---- 5 ---------------------------------------------------------------------

datagen::PairDecision bitmask_rule(unsigned a, unsigned b) {
  const int shared = std::popcount(a & b);
  const int denom = std::min(std::popcount(a), std::popcount(b));
  const bool t_rule = 2 * shared >= denom && shared >= 2;
  const bool f_rule = shared <= 1 && 2 * shared < denom;
  if (t_rule && !f_rule) return datagen::PairDecision::kT;
  if (f_rule && !t_rule) return datagen::PairDecision::kF;
  return datagen::PairDecision::kExcluded;
}

Outcome labeling_rules() {
  Tally t;
  ContextedTarget inst{"the war began", {4, 7}, "war", Pos::kNoun};
  std::vector<std::pair<unsigned, datagen::SubstituteSet>> sets;
  for (unsigned m = 1; m < 64; ++m) {
    if (std::popcount(m) > 5) continue;
    std::vector<std::string> words;
    for (int i = 0; i < 6; ++i) {
      if (m & (1u << i)) words.push_back("sym" + std::to_string(i));
    }
    sets.emplace_back(m, datagen::make_substitute_set(inst, words));
  }
  std::size_t agree = 0;
  for (const auto& [ma, sa] : sets) {
    for (const auto& [mb, sb] : sets) {
      if (datagen::label_coinco_pair(sa, sb) == bitmask_rule(ma, mb)) ++agree;
    }
  }
  const std::size_t total = sets.size() * sets.size();
  t.expect(agree == total, std::to_string(agree) + "/" + std::to_string(total) + " CoInCo agreement");

  ContextedTarget u{"a word here", {2, 6}, "word", Pos::kNoun};
  const auto anchors = datagen::binarize_usim({{u, u, 4.3}, {u, u, 1.3}});
  t.expect(anchors.size() == 2 && anchors[0].label == Label::kT && anchors[1].label == Label::kF,
           "Usim anchors 4.3->T, 1.3->F");
  Rng rng(505);
  std::vector<datagen::UsimAnnotation> anns;
  for (int i = 0; i < 2000; ++i) {
    double s = 1.0 + 4.0 * rng.uniform();
    if (i % 50 == 0) s = i % 100 == 0 ? 2.0 : 4.0;
    anns.push_back({u, u, s});
  }
  std::size_t want_t = 0, want_f = 0;
  for (const auto& a : anns) {
    want_t += a.score > 4.0;
    want_f += a.score < 2.0;
  }
  std::size_t got_t = 0, got_f = 0;
  for (const auto& p : datagen::binarize_usim(anns)) (p.label == Label::kT ? got_t : got_f)++;
  t.expect(got_t == want_t && got_f == want_f, "Usim partition");
  return t.outcome(std::to_string(agree) + "/" + std::to_string(total) +
                   " CoInCo pairs agree; Usim anchors and partition hold");
}

// ---- 6 ---------------------------------------------------------------------

struct SyntheticWorld {
  std::vector<std::string> corpus;
  LexiconTagger tagger;
  ukwac::ParaphraseTable table;
  ukwac::PosVocabulary vocabulary;
};

std::string pseudo_word(std::size_t k) {
  static const char* kSyl[] = {"ba", "ko", "ri", "tu", "me", "sa", "lo", "ni", "de", "pu"};
  std::string w;
  for (int i = 0; i < 3; ++i) {
    w += kSyl[k % 10];
    k /= 10;
  }
  return w;
}

SyntheticWorld build_world(std::size_t sentences) {
  SyntheticWorld w;
  std::vector<std::string> nouns, verbs;
  for (std::size_t k = 0; k < 120; ++k) nouns.push_back(pseudo_word(k));
  for (std::size_t k = 500; k < 560; ++k) verbs.push_back(pseudo_word(k));
  for (const auto& n : nouns) w.tagger.add(n, Pos::kNoun);
  for (const auto& v : verbs) w.tagger.add(v, Pos::kVerb);
  Rng rng(606);
  // Each word links to a few same-POS neighbours; some neighbours link to each other.
  auto link = [&](const std::vector<std::string>& pool, Pos pos) {
    for (std::size_t i = 0; i < pool.size(); ++i) {
      for (int k = 0; k < 4; ++k) {
        const auto& other = pool[rng.uniform_index(pool.size())];
        w.table.add(pool[i], other, 2.1 + 2.0 * rng.uniform(), pos);
      }
    }
  };
  link(nouns, Pos::kNoun);
  link(verbs, Pos::kVerb);
  for (std::size_t i = 0; i < sentences; ++i) {
    const auto& n1 = nouns[rng.uniform_index(nouns.size())];
    const auto& v = verbs[rng.uniform_index(verbs.size())];
    const auto& n2 = nouns[rng.uniform_index(nouns.size())];
    w.corpus.push_back("the " + n1 + " " + v + " a " + n2 + " .");
  }
  w.vocabulary = ukwac::PosVocabulary::from_corpus(w.corpus, w.tagger, 5);
  return w;
}

std::optional<std::string> walk_oracle(const std::vector<std::string>& ranked,
                                       const std::set<std::pair<std::string, std::string>>& edges) {
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    if (!edges.count({ranked[i - 1], ranked[i]}) && !edges.count({ranked[i], ranked[i - 1]})) {
      return ranked[i];
    }
  }
  return std::nullopt;
}

Outcome ukwac_generator() {
  Tally t;
  const auto world = build_world(10000);
  const ukwac::ToyContextEmbedder embedder(16, 7);
  ukwac::GenerationOptions opts;
  opts.n = 10000;
  opts.seed = 17;
  const auto run = [&] {
    return ukwac::generate_dataset(world.corpus, world.table, embedder, world.tagger,
                                   world.vocabulary, opts);
  };
  const auto result = run();
  const auto want = ukwac::largest_remainder(opts.n, opts.proportions);
  std::array<std::size_t, 3> got{};
  for (const auto& inst : result.instances) ++got[static_cast<std::size_t>(label_index(inst.cls))];
  t.expect(got == want, "class counts " + std::to_string(got[0]) + "/" + std::to_string(got[1]) + "/" +
                            std::to_string(got[2]));
  t.expect(result.warnings.empty(), "generator warned: " +
                                        (result.warnings.empty() ? "" : result.warnings.front()));

  std::size_t bad_spans = 0;
  for (const auto& inst : result.instances) {
    const auto a = text::split_whitespace(inst.original_sentence);
    const auto b = text::split_whitespace(inst.substituted_sentence);
    std::size_t differing = 0;
    bool aligned = a.size() == b.size();
    for (std::size_t i = 0; aligned && i < a.size(); ++i) {
      const auto x = std::string_view(inst.original_sentence).substr(a[i].start, a[i].size());
      const auto y = std::string_view(inst.substituted_sentence).substr(b[i].start, b[i].size());
      if (x != y) {
        ++differing;
        aligned = a[i] == inst.original_span && y == inst.substitute;
      }
    }
    if (!aligned || differing != 1) ++bad_spans;
  }
  t.expect(bad_spans == 0, std::to_string(bad_spans) + " pairs differ in more than one span");

  auto dump = [](const ukwac::GenerationResult& r) {
    std::vector<LabeledPair> pairs;
    for (std::size_t i = 0; i < r.instances.size(); ++i) {
      pairs.push_back(ukwac::to_labeled_pair(r.instances[i], "ukwac-" + std::to_string(i)));
    }
    return io::dataset_to_jsonl(pairs);
  };
  t.expect(dump(result) == dump(run()), "same seed gave different bytes");

  Rng rng(616);
  std::size_t walk_agree = 0;
  const std::vector<std::string> words = {"w0", "w1", "w2", "w3", "w4", "w5", "w6"};
  for (int i = 0; i < 1000; ++i) {
    ukwac::ParaphraseTable table;
    std::set<std::pair<std::string, std::string>> edges;
    const double density = rng.uniform();
    for (std::size_t x = 0; x < words.size(); ++x) {
      for (std::size_t y = x + 1; y < words.size(); ++y) {
        if (rng.uniform() < density) {
          table.add(words[x], words[y], 3.0);
          edges.insert({words[x], words[y]});
        }
      }
    }
    auto order = words;
    rng.shuffle(order);
    order.resize(1 + rng.uniform_index(words.size()));
    ukwac::SubstituteRanking ranking;
    for (std::size_t k = 0; k < order.size(); ++k) {
      ranking.ranked.emplace_back(order[k], 1.0 / static_cast<double>(k + 1));
    }
    if (ukwac::select_different_meaning(ranking, table) == walk_oracle(order, edges)) ++walk_agree;
  }
  t.expect(walk_agree == 1000, std::to_string(walk_agree) + "/1000 ranking walks agree");
  return t.outcome("counts " + std::to_string(got[0]) + "/" + std::to_string(got[1]) + "/" +
                   std::to_string(got[2]) + " from " + std::to_string(result.available) +
                   " candidates; " + std::to_string(walk_agree) + "/1000 walks; one-span and "
                   "determinism checked");
}

// ---- 7 ---------------------------------------------------------------------

Outcome directional_effect() {
  const auto start = Clock::now();
  Tally t;
  int improved = 0;
  std::string gaps;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto all = testing::synthetic_sense_pairs(200, 7000 + seed);
    const std::vector<LabeledPair> train(all.begin(), all.begin() + 150);
    const std::vector<LabeledPair> heldout(all.begin() + 150, all.end());
    ToyEncoderConfig cfg;
    cfg.seed = 100 + seed;
    const ToyEncoder base(cfg);
    training::FineTuneConfig ft;
    ft.head = training::Head::kCosdist;
    ft.learning_rate = 1e-2;
    ft.epochs = 3;
    ft.batch_size = 16;
    ft.seed = seed;
    const double before = training::cos_gap(base, heldout);
    const auto result = training::finetune(base, train, ft);
    const double after = training::cos_gap(*result.backend, heldout);
    if (after - before > 0.0) ++improved;
    gaps += (gaps.empty() ? "" : ",") + fmt(after - before, 2);
  }
  const double secs = seconds_since(start);
  t.expect(improved >= 9, std::to_string(improved) + "/10 seeds improved");
  t.expect(secs < 120.0, "runtime " + fmt(secs) + " s");
  return t.outcome(std::to_string(improved) + "/10 seeds widen the held-out gap (deltas " + gaps +
                   "), " + fmt(secs) + " s");
}

// ---- shared process runner -------------------------------------------------

struct ProcessResult {
  int code = -1;
  std::string out;
};

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  return q + "'";
}

ProcessResult run_cli(const fs::path& cwd, const std::vector<std::string>& args) {
  std::string cmd = "cd " + shell_quote(cwd.string()) + " && " + shell_quote(CTXSIM_CLI_BINARY);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += " 2>&1";
  ProcessResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string manifest_line(const std::string& out) {
  const std::string tag = "manifest sha256 ";
  const auto pos = out.find(tag);
  return pos == std::string::npos ? std::string() : out.substr(pos + tag.size(), 64);
}

// ---- 8 ---------------------------------------------------------------------

Outcome format_exactness() {
  Tally t;
  TempDir dir("accept-format");
  const auto fi = run_cli(dir.path(), {"predict", "--input", fixture("gwsc/fi_subtask1.tsv").string(),
                                       "--subtask", "1", "--language", "fi", "--out", "fi1"});
  const auto en = run_cli(dir.path(), {"predict", "--input", fixture("gwsc/en_subtask2.tsv").string(),
                                       "--subtask", "2", "--out", "en2"});
  t.expect(fi.code == 0, "fi predict exit " + std::to_string(fi.code));
  t.expect(en.code == 0, "en predict exit " + std::to_string(en.code));
  if (!t.ok()) return t.outcome("predict failed");
  const auto fi_text = io::read_file(dir / "fi1/predictions.tsv");
  const auto en_text = io::read_file(dir / "en2/predictions.tsv");
  t.expect(fi_text == io::read_file(golden("fi_subtask1.predictions.tsv")), "fi bytes differ from golden");
  t.expect(en_text == io::read_file(golden("en_subtask2.predictions.tsv")), "en bytes differ from golden");
  const auto fi_lines = io::read_lines(dir / "fi1/predictions.tsv");
  const auto en_lines = io::read_lines(dir / "en2/predictions.tsv");
  t.expect(!fi_lines.empty() && fi_lines[0] == "change", "fi header");
  t.expect(!en_lines.empty() && en_lines[0] == "sim_context1\tsim_context2", "en header");
  t.expect(fi_lines.size() == 25, "fi rows " + std::to_string(fi_lines.size() - 1));
  std::size_t contexts = 0;
  for (std::size_t i = 1; i < en_lines.size(); ++i) {
    contexts += text::split(en_lines[i], '\t').size();
  }
  t.expect(en_lines.size() == 341 && contexts == 680, "en contexts " + std::to_string(contexts));
  return t.outcome("24 Subtask 1 rows and 340 pairs / 680 contexts byte-exact against golden files");
}

// ---- 9 ---------------------------------------------------------------------

Outcome configuration_fidelity() {
  using namespace training;
  Tally t;
  std::size_t combos = 0;
  TempDir dir("accept-config");
  for (Head head : {Head::kClassif, Head::kCosdist}) {
    for (double lr : {5e-5, 1e-6, 1e-7}) {
      for (int epochs = 1; epochs <= 15; ++epochs) {
        for (double dropout : {0.1, 0.2}) {
          for (int classes : {2, 3}) {
            if (head == Head::kCosdist && classes == 3) continue;
            FineTuneConfig c;
            c.head = head;
            c.learning_rate = lr;
            c.epochs = epochs;
            c.dropout = dropout;
            c.max_len = 128;
            c.n_classes = classes;
            c.validate();
            const auto text = to_json(c).dump();
            t.expect(config_from_json(nlohmann::json::parse(text)) == c, "round trip " + text);
            ++combos;
          }
        }
      }
    }
  }
  // Through the checkpoint manifest written by an actual run.
  const ToyEncoder enc;
  FineTuneConfig ukwac3;
  ukwac3.n_classes = 3;
  ukwac3.learning_rate = 1e-6;
  ukwac3.dropout = 0.2;
  ukwac3.epochs = 11;
  save_checkpoint(dir / "ck", enc, LinearPairHead::zeros(3, enc.hidden_dim()), ukwac3, "h", 11);
  t.expect(load_checkpoint(dir / "ck").config == ukwac3, "checkpoint manifest echo");

  // Through the CLI's config echo: a --config document comes back unchanged.
  const nlohmann::json wic_cfg = {{"head", "COSDIST"},  {"learning_rate", 5e-5}, {"epochs", 4},
                                  {"dropout", 0.1},     {"max_len", 128}};
  io::write_file_atomic(dir / "wic.json", wic_cfg.dump());
  const auto data = run_cli(dir.path(), {"build-data", "--source", "wic", "--wic-data",
                                         fixture("wic/train.data.txt").string(), "--wic-gold",
                                         fixture("wic/train.gold.txt").string(), "--out", "wic"});
  t.expect(data.code == 0, "build-data wic exit " + std::to_string(data.code));
  const auto ft = run_cli(dir.path(), {"finetune", "--config", "wic.json", "--data",
                                       "wic/dataset.jsonl", "--out", "ft"});
  t.expect(ft.code == 0, "finetune exit " + std::to_string(ft.code) + ": " + ft.out);
  if (ft.code == 0) {
    const auto echo = nlohmann::json::parse(io::read_file(dir / "ft/config.json"));
    for (const auto& [k, v] : wic_cfg.items()) t.expect(echo.at(k) == v, "echo of " + k);
    const auto ck = load_checkpoint(dir / "ft/checkpoints/run/epoch_4");
    t.expect(ck.config.head == Head::kCosdist && ck.config.epochs == 4 && ck.config.dropout == 0.1 &&
                 ck.config.learning_rate == 5e-5 && ck.config.max_len == 128,
             "checkpoint config after CLI run");
  }

  // ukWaC-subs: 3-class CLASSIF accepted, COSDIST rejected as a configuration error.
  const auto uk = run_cli(dir.path(), {"build-data", "--source", "ukwac-subs", "--corpus",
                                       fixture("corpus.txt").string(), "--ppdb", fixture("ppdb.tsv").string(),
                                       "--lexicon", fixture("lexicon.tsv").string(), "--n", "12", "--out", "uk"});
  t.expect(uk.code == 0, "build-data ukwac exit " + std::to_string(uk.code));
  const auto c3 = run_cli(dir.path(), {"finetune", "--data", "uk/dataset.jsonl", "--n-classes", "3",
                                       "--learning-rate", "1e-6", "--dropout", "0.2", "--epochs", "11",
                                       "--out", "c3"});
  t.expect(c3.code == 0, "3-class CLASSIF exit " + std::to_string(c3.code));
  const auto cos = run_cli(dir.path(), {"finetune", "--data", "uk/dataset.jsonl", "--head", "COSDIST",
                                        "--out", "cos3"});
  t.expect(cos.code == 2, "COSDIST on 3-class exit " + std::to_string(cos.code));
  return t.outcome(std::to_string(combos) + " configurations round-trip; CLI echo, 3-class CLASSIF "
                   "and COSDIST rejection verified");
}

// ---- 10 --------------------------------------------------------------------

struct PipelineRun {
  std::vector<std::string> hashes;
  std::string failure;
  double seconds = 0.0;
};

PipelineRun run_pipeline(const fs::path& cwd) {
  const auto start = Clock::now();
  PipelineRun p;
  const auto f = [](const std::string& rel) { return fixture(rel).string(); };
  const std::vector<std::vector<std::string>> steps = {
      {"build-data", "--source", "usim", "--usim", f("usim.tsv"), "--legacy", f("legacy.jsonl"),
       "--out", "data/usim"},
      {"build-data", "--source", "coinco", "--coinco", f("coinco.tsv"), "--cap", "50", "--seed", "3",
       "--out", "data/coinco"},
      {"build-data", "--source", "wic", "--wic-data", f("wic/train.data.txt"), "--wic-gold",
       f("wic/train.gold.txt"), "--out", "data/wic"},
      {"build-data", "--source", "opusparcus", "--opusparcus", f("opusparcus.tsv"), "--stoplist",
       f("stoplist.txt"), "--lexicon", f("lexicon.tsv"), "--target-count", "100", "--seed", "5",
       "--out", "data/opus"},
      {"build-data", "--source", "ukwac-subs", "--corpus", f("corpus.txt"), "--ppdb", f("ppdb.tsv"),
       "--lexicon", f("lexicon.tsv"), "--n", "60", "--heldout-count", "10", "--seed", "9",
       "--out", "data/ukwac"},
      {"finetune", "--data", "data/opus/dataset.jsonl", "--head", "COSDIST", "--epochs", "2",
       "--learning-rate", "1e-3", "--batch-size", "8", "--seed", "1", "--out", "ft"},
      {"predict", "--checkpoint", "ft/checkpoints/run/epoch_2", "--input", f("gwsc/en_subtask1.tsv"),
       "--subtask", "1", "--layers", "0,1,2", "--out", "pred1"},
      {"predict", "--checkpoint", "ft/checkpoints/run/epoch_2", "--input", f("gwsc/en_subtask2.tsv"),
       "--subtask", "2", "--out", "pred2"},
      {"evaluate", "--pred", "pred1/predictions.tsv", "--gold", f("gwsc/en_subtask1.gold.tsv"),
       "--subtask", "1", "--out", "eval1"},
      {"evaluate", "--pred", "pred2/predictions.tsv", "--gold", f("gwsc/en_subtask2.gold.tsv"),
       "--subtask", "2", "--out", "eval2"},
  };
  for (const auto& args : steps) {
    const auto r = run_cli(cwd, args);
    if (r.code != 0) {
      p.failure = args[0] + " " + args[2] + " exited " + std::to_string(r.code) + ": " + r.out;
      break;
    }
    p.hashes.push_back(manifest_line(r.out));
  }
  p.seconds = seconds_since(start);
  return p;
}

Outcome end_to_end() {
  Tally t;
  TempDir first("accept-e2e-a");
  TempDir second("accept-e2e-b");
  const auto a = run_pipeline(first.path());
  t.expect(a.failure.empty(), a.failure);
  if (!a.failure.empty()) return t.outcome("pipeline failed");
  const auto b = run_pipeline(second.path());
  t.expect(b.failure.empty(), b.failure);
  t.expect(a.hashes == b.hashes, "manifest hashes differ between identical runs");
  for (const auto& h : a.hashes) t.expect(h.size() == 64, "missing manifest hash");
  t.expect(a.seconds + b.seconds < 300.0, "runtime " + fmt(a.seconds + b.seconds) + " s");
  const auto eval = nlohmann::json::parse(io::read_file(first / "eval1/eval.json"));
  return t.outcome(std::to_string(a.hashes.size()) + " steps exit 0 twice with identical manifest "
                   "hashes (final " + a.hashes.back().substr(0, 12) + "), " +
                   fmt(a.seconds + b.seconds) + " s; subtask 1 score " +
                   fmt(eval.at("value").get<double>()));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric oracle equivalence", metric_oracles},
      {"substitute score equation", c2v_equation},
      {"similarity change identities", delta_identities},
      {"head gradient checks", gradient_checks},
      {"labeling rule oracles", labeling_rules},
      {"ukWaC-subs generator", ukwac_generator},
      {"directional fine-tuning effect", directional_effect},
      {"prediction format exactness", format_exactness},
      {"configuration fidelity", configuration_fidelity},
      {"end-to-end pipeline", end_to_end},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
