#include "ctxsim/similarity.hpp"

#include <cstdio>

#include "ctxsim/errors.hpp"
#include "ctxsim/io.hpp"
#include "ctxsim/text.hpp"

namespace ctxsim::similarity {

namespace {

struct Assigned {
  Span a;
  Span b;
};

int match_rank(std::string_view surface, std::string_view word) {
  const std::string s = text::fold_case(surface);
  const std::string w = text::fold_case(word);
  if (s == w) return 2;
  const std::size_t n = std::min(s.size(), w.size());
  if (n >= 3 && s.compare(0, n, w, 0, n) == 0) return 1;
  return 0;
}

Assigned assign_spans(const text::MarkedText& marked, std::string_view word_a,
                      std::string_view word_b, const std::string& where) {
  if (marked.marked.size() != 2) {
    throw MalformedRow(where + ": expected 2 marked targets, found " +
                       std::to_string(marked.marked.size()));
  }
  const Span first = marked.marked[0];
  const Span second = marked.marked[1];
  auto surface = [&](Span s) { return std::string_view(marked.text).substr(s.start, s.size()); };
  const int straight = match_rank(surface(first), word_a) + match_rank(surface(second), word_b);
  const int swapped = match_rank(surface(first), word_b) + match_rank(surface(second), word_a);
  if (swapped > straight) return {second, first};
  return {first, second};
}

}  // namespace

GwscItem make_item(std::string id, std::string word_a, std::string word_b,
                   std::string_view marked_context1, std::string_view marked_context2,
                   Language language) {
  const auto c1 = text::strip_markers(marked_context1);
  const auto c2 = text::strip_markers(marked_context2);
  const Assigned s1 = assign_spans(c1, word_a, word_b, "item " + id + " context1");
  const Assigned s2 = assign_spans(c2, word_a, word_b, "item " + id + " context2");
  GwscItem item;
  item.id = std::move(id);
  item.word_a = std::move(word_a);
  item.word_b = std::move(word_b);
  item.context1 = c1.text;
  item.context2 = c2.text;
  item.a1 = s1.a;
  item.b1 = s1.b;
  item.a2 = s2.a;
  item.b2 = s2.b;
  item.language = language;
  return item;
}

std::vector<GwscItem> parse_gwsc(std::string_view content, Language language) {
  std::vector<GwscItem> items;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t stop = content.find('\n', start);
    if (stop == std::string_view::npos) stop = content.size();
    std::string line(content.substr(start, stop - start));
    start = stop + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    if (line_no == 1 && line.rfind("word1", 0) == 0) continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() < 4) {
      throw MalformedRow("line " + std::to_string(line_no) + ": expected 4 tab-separated columns "
                         "(word1, word2, context1, context2), got " + std::to_string(cols.size()));
    }
    try {
      items.push_back(make_item(std::to_string(items.size()), text::trim(cols[0]),
                                text::trim(cols[1]), cols[2], cols[3], language));
    } catch (const MalformedRow& e) {
      throw MalformedRow("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return items;
}

std::vector<GwscItem> read_gwsc(const std::filesystem::path& path, Language language) {
  if (!std::filesystem::exists(path)) {
    throw MissingResource("GWSC input '" + path.string() +
                          "' not found (TSV: word1, word2, context1, context2 with <strong> markers)");
  }
  return parse_gwsc(io::read_file(path), language);
}

namespace {

struct ContextEncoding {
  std::optional<EncoderOutput> output;
  TokenAlignment a;
  TokenAlignment b;
};

ContextEncoding encode_context(const EncoderBackend& backend, std::string_view context, Span a,
                               Span b, std::size_t max_len) {
  const EncodedPair input = build_single_input(context, backend.tokenizer(), max_len);
  ContextEncoding enc;
  enc.a = locate_target(input, a, SentenceRole::kFirst);
  enc.b = locate_target(input, b, SentenceRole::kFirst);
  enc.output = backend.encode(input);
  return enc;
}

double similarity_at(const ContextEncoding& enc, int layer) {
  return cosine_similarity(pool_target(*enc.output, enc.a, layer),
                           pool_target(*enc.output, enc.b, layer));
}

}  // namespace

double sim_in_context(const EncoderBackend& backend, std::string_view context, Span span_a,
                      Span span_b, int layer, std::size_t max_len) {
  if (layer < 0 || layer > backend.n_layers()) {
    throw LayerOutOfRange("layer " + std::to_string(layer) + " not in [0, " +
                          std::to_string(backend.n_layers()) + "]");
  }
  return similarity_at(encode_context(backend, context, span_a, span_b, max_len), layer);
}

double delta_sim(const EncoderBackend& backend, const GwscItem& item, int layer,
                 std::size_t max_len) {
  const double s1 = sim_in_context(backend, item.context1, item.a1, item.b1, layer, max_len);
  const double s2 = sim_in_context(backend, item.context2, item.a2, item.b2, layer, max_len);
  return s2 - s1;
}

const LayerPrediction& PredictionRecord::at(int layer) const {
  for (const auto& l : layers) {
    if (l.layer == layer) return l;
  }
  throw LayerOutOfRange("record " + id + " has no prediction for layer " + std::to_string(layer));
}

std::vector<PredictionRecord> predict_batch(const EncoderBackend& backend,
                                            const std::vector<GwscItem>& items,
                                            const std::vector<int>& layers, std::size_t max_len) {
  if (layers.empty()) throw InvalidConfig("at least one layer must be requested");
  for (int l : layers) {
    if (l < 0 || l > backend.n_layers()) {
      throw LayerOutOfRange("layer " + std::to_string(l) + " not in [0, " +
                            std::to_string(backend.n_layers()) + "]");
    }
  }
  std::vector<PredictionRecord> records;
  records.reserve(items.size());
  for (const auto& item : items) {
    PredictionRecord rec;
    rec.id = item.id;
    rec.chosen_layer = layers.back();
    std::optional<ContextEncoding> e1, e2;
    try {
      e1 = encode_context(backend, item.context1, item.a1, item.b1, max_len);
    } catch (const TargetTruncated& e) {
      rec.warnings.push_back("context1: " + std::string(e.what()));
    }
    try {
      e2 = encode_context(backend, item.context2, item.a2, item.b2, max_len);
    } catch (const TargetTruncated& e) {
      rec.warnings.push_back("context2: " + std::string(e.what()));
    }
    for (int l : layers) {
      LayerPrediction p;
      p.layer = l;
      if (e1) p.sim_context1 = similarity_at(*e1, l);
      if (e2) p.sim_context2 = similarity_at(*e2, l);
      if (p.sim_context1 && p.sim_context2) p.delta = *p.sim_context2 - *p.sim_context1;
      rec.layers.push_back(p);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void set_chosen_layer(std::vector<PredictionRecord>& records, int layer) {
  for (auto& r : records) {
    r.at(layer);
    r.chosen_layer = layer;
  }
}

std::string format_value(std::optional<double> value) {
  if (!value) return "NA";
  double v = *value;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string format_subtask1(const std::vector<PredictionRecord>& records) {
  std::string out = "change\n";
  for (const auto& r : records) {
    out += format_value(r.at(r.chosen_layer).delta);
    out += '\n';
  }
  return out;
}

std::string format_subtask2(const std::vector<PredictionRecord>& records) {
  std::string out = "sim_context1\tsim_context2\n";
  for (const auto& r : records) {
    const auto& p = r.at(r.chosen_layer);
    out += format_value(p.sim_context1);
    out += '\t';
    out += format_value(p.sim_context2);
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json to_json(const std::vector<PredictionRecord>& records) {
  auto opt = [](std::optional<double> v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json();
  };
  nlohmann::ordered_json j;
  j["layer_indexing"] = kLayerIndexing;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json x;
    x["id"] = r.id;
    x["chosen_layer"] = r.chosen_layer;
    auto layers = nlohmann::ordered_json::array();
    for (const auto& p : r.layers) {
      nlohmann::ordered_json l;
      l["layer"] = p.layer;
      l["sim_context1"] = opt(p.sim_context1);
      l["sim_context2"] = opt(p.sim_context2);
      l["delta"] = opt(p.delta);
      layers.push_back(std::move(l));
    }
    x["layers"] = std::move(layers);
    x["warnings"] = r.warnings;
    arr.push_back(std::move(x));
  }
  j["records"] = std::move(arr);
  return j;
}

int select_layer(const std::vector<std::pair<int, std::optional<double>>>& scores) {
  std::optional<std::pair<int, double>> best;
  for (const auto& [layer, score] : scores) {
    if (!score) continue;
    if (!best || *score > best->second || (*score == best->second && layer > best->first)) {
      best = {layer, *score};
    }
  }
  if (!best) throw InvalidConfig("no layer produced a score");
  return best->first;
}

}  // namespace ctxsim::similarity
