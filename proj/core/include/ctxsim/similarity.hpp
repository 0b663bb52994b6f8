#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctxsim/encoder.hpp"
#include "ctxsim/types.hpp"

namespace ctxsim::similarity {

// One word pair seen in two contexts. Spans index the marker-free contexts.
struct GwscItem {
  std::string id;
  std::string word_a;
  std::string word_b;
  std::string context1;
  std::string context2;
  Span a1, b1;  // word_a / word_b in context1
  Span a2, b2;  // word_a / word_b in context2
  Language language = Language::kEn;
};

// Builds an item from contexts carrying <strong>...</strong> markers. Each
// context needs exactly two marked spans; they are assigned to word_a and
// word_b by case-insensitive match on the surface form (exact, then prefix),
// falling back to order of appearance.
GwscItem make_item(std::string id, std::string word_a, std::string word_b,
                   std::string_view marked_context1, std::string_view marked_context2,
                   Language language = Language::kEn);

// TSV rows: word1, word2, context1, context2. A first line starting with
// "word1" is a header. MalformedRow reports 1-based line numbers.
std::vector<GwscItem> parse_gwsc(std::string_view content, Language language = Language::kEn);
std::vector<GwscItem> read_gwsc(const std::filesystem::path& path,
                                Language language = Language::kEn);

// Both words read from a single-segment encoding of `context`.
double sim_in_context(const EncoderBackend& backend, std::string_view context, Span span_a,
                      Span span_b, int layer, std::size_t max_len = kDefaultMaxLen);

// sim_in_context(context2) - sim_in_context(context1)
double delta_sim(const EncoderBackend& backend, const GwscItem& item, int layer,
                 std::size_t max_len = kDefaultMaxLen);

// Layer 0 is the embedding output, 1..n the encoder blocks.
inline constexpr const char* kLayerIndexing = "0 = embedding output, 1..n = encoder blocks";

struct LayerPrediction {
  int layer = 0;
  std::optional<double> sim_context1;  // null when a target was truncated away
  std::optional<double> sim_context2;
  std::optional<double> delta;
};

struct PredictionRecord {
  std::string id;
  std::vector<LayerPrediction> layers;
  int chosen_layer = -1;
  std::vector<std::string> warnings;

  const LayerPrediction& at(int layer) const;
};

std::vector<PredictionRecord> predict_batch(const EncoderBackend& backend,
                                            const std::vector<GwscItem>& items,
                                            const std::vector<int>& layers,
                                            std::size_t max_len = kDefaultMaxLen);

void set_chosen_layer(std::vector<PredictionRecord>& records, int layer);

// Fixed 6-decimal rendering; nulls print as NA.
std::string format_value(std::optional<double> value);

// "change" header, one row per record, at each record's chosen layer.
std::string format_subtask1(const std::vector<PredictionRecord>& records);
// "sim_context1\tsim_context2" header.
std::string format_subtask2(const std::vector<PredictionRecord>& records);

nlohmann::ordered_json to_json(const std::vector<PredictionRecord>& records);

// Highest score wins; ties go to the higher layer. Null scores never win.
int select_layer(const std::vector<std::pair<int, std::optional<double>>>& scores);

}  // namespace ctxsim::similarity
