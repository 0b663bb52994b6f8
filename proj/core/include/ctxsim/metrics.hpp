#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ctxsim::metrics {

// sum(x*y) / sqrt(sum(x^2) * sum(y^2)); no mean-centering.
double uncentered_pearson(std::span<const double> x, std::span<const double> y);
double pearson(std::span<const double> x, std::span<const double> y);
// Pearson over fractional (average) ranks.
double spearman(std::span<const double> x, std::span<const double> y);
std::vector<double> average_ranks(std::span<const double> x);
// 2ab / (a + b)
double harmonic_mean(double a, double b);

enum class Aggregation {
  kConcatenate,       // both similarity columns as one series
  kPerColumnAverage,  // score each column, then average
};

Aggregation parse_aggregation(std::string_view text);
std::string_view to_string(Aggregation aggregation);

// A parsed prediction or gold file. Missing values ("NA", "null", empty) are nullopt.
struct ScoreTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;
};

ScoreTable parse_scores(std::string_view content, int subtask);
ScoreTable read_scores(const std::filesystem::path& path, int subtask);

struct EvalResult {
  std::string metric;
  double value = 0.0;
  std::size_t n = 0;         // scored values
  std::size_t excluded = 0;  // values dropped because either side was null
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::vector<std::string> warnings;
};

nlohmann::ordered_json to_json(const EvalResult& result);

// Subtask 1: uncentered Pearson over `change`. Subtask 2: harmonic mean of
// Pearson and Spearman. Throws RowCountMismatch.
EvalResult evaluate(const ScoreTable& pred, const ScoreTable& gold, int subtask,
                    Aggregation aggregation = Aggregation::kConcatenate);
EvalResult evaluate_files(const std::filesystem::path& pred, const std::filesystem::path& gold,
                          int subtask, Aggregation aggregation = Aggregation::kConcatenate);

}  // namespace ctxsim::metrics
