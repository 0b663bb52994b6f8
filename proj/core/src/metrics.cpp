#include "ctxsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "ctxsim/errors.hpp"
#include "ctxsim/io.hpp"
#include "ctxsim/text.hpp"

namespace ctxsim::metrics {

namespace {

void check_lengths(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw LengthMismatch("series of length " + std::to_string(x.size()) + " and " +
                         std::to_string(y.size()));
  }
  if (x.size() < 2) throw LengthMismatch("correlation needs at least 2 values");
}

}  // namespace

double uncentered_pearson(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xy += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (xx == 0.0 || yy == 0.0) throw ZeroSeries("uncentered Pearson of an all-zero series");
  return std::clamp(xy / std::sqrt(xx * yy), -1.0, 1.0);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ZeroVariance("Pearson of a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double harmonic_mean(double a, double b) {
  if (a + b == 0.0) throw DegenerateDenominator("harmonic mean with a + b = 0");
  return 2.0 * a * b / (a + b);
}

Aggregation parse_aggregation(std::string_view text) {
  if (text == "concatenate") return Aggregation::kConcatenate;
  if (text == "per-column-average") return Aggregation::kPerColumnAverage;
  throw InvalidConfig("unknown aggregation '" + std::string(text) +
                      "' (expected concatenate or per-column-average)");
}

std::string_view to_string(Aggregation aggregation) {
  return aggregation == Aggregation::kConcatenate ? "concatenate" : "per-column-average";
}

namespace {

std::vector<std::string> expected_header(int subtask) {
  if (subtask == 1) return {"change"};
  if (subtask == 2) return {"sim_context1", "sim_context2"};
  throw InvalidConfig("subtask must be 1 or 2, got " + std::to_string(subtask));
}

std::optional<double> parse_value(const std::string& cell, std::size_t line_no) {
  const std::string v = text::trim(cell);
  if (v.empty() || v == "NA" || v == "null" || v == "nan" || v == "NaN") return std::nullopt;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || !std::isfinite(d)) {
    throw MalformedRow("line " + std::to_string(line_no) + ": '" + v + "' is not a number");
  }
  return d;
}

}  // namespace

ScoreTable parse_scores(std::string_view content, int subtask) {
  const auto header = expected_header(subtask);
  ScoreTable table;
  table.header = header;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool seen_header = false;
  while (start < content.size()) {
    std::size_t stop = content.find('\n', start);
    if (stop == std::string_view::npos) stop = content.size();
    std::string line(content.substr(start, stop - start));
    start = stop + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = text::split(line, '\t');
    if (!seen_header) {
      seen_header = true;
      for (auto& c : cols) c = text::trim(c);
      if (cols == header) continue;
      if (cols.size() == header.size() && !std::isdigit(static_cast<unsigned char>(cols[0][0])) &&
          cols[0][0] != '-' && cols[0][0] != '.' && cols[0] != "NA") {
        throw MalformedRow("line 1: unexpected header for subtask " + std::to_string(subtask));
      }
    }
    if (cols.size() != header.size()) {
      throw MalformedRow("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(header.size()) + " columns, got " +
                         std::to_string(cols.size()));
    }
    std::vector<std::optional<double>> row;
    for (const auto& c : cols) row.push_back(parse_value(c, line_no));
    table.rows.push_back(std::move(row));
  }
  return table;
}

ScoreTable read_scores(const std::filesystem::path& path, int subtask) {
  if (!std::filesystem::exists(path)) {
    throw MissingResource("score file '" + path.string() + "' not found (TSV with header " +
                          (subtask == 1 ? "'change'" : "'sim_context1<TAB>sim_context2'") + ")");
  }
  try {
    return parse_scores(io::read_file(path), subtask);
  } catch (const MalformedRow& e) {
    throw MalformedRow(path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json to_json(const EvalResult& r) {
  nlohmann::ordered_json j;
  j["metric"] = r.metric;
  j["value"] = r.value;
  j["n"] = r.n;
  j["excluded"] = r.excluded;
  j["pearson"] = r.pearson ? nlohmann::ordered_json(*r.pearson) : nlohmann::ordered_json();
  j["spearman"] = r.spearman ? nlohmann::ordered_json(*r.spearman) : nlohmann::ordered_json();
  j["warnings"] = r.warnings;
  return j;
}

namespace {

struct Series {
  std::vector<double> pred;
  std::vector<double> gold;
  std::size_t excluded = 0;
};

void collect(const ScoreTable& pred, const ScoreTable& gold, std::size_t column, Series& s) {
  for (std::size_t i = 0; i < pred.rows.size(); ++i) {
    const auto& p = pred.rows[i][column];
    const auto& g = gold.rows[i][column];
    if (!p || !g) {
      ++s.excluded;
      continue;
    }
    s.pred.push_back(*p);
    s.gold.push_back(*g);
  }
}

}  // namespace

EvalResult evaluate(const ScoreTable& pred, const ScoreTable& gold, int subtask,
                    Aggregation aggregation) {
  expected_header(subtask);
  if (pred.rows.size() != gold.rows.size()) {
    throw RowCountMismatch("predictions have " + std::to_string(pred.rows.size()) +
                           " rows, gold has " + std::to_string(gold.rows.size()));
  }
  const std::size_t width = subtask == 1 ? 1 : 2;
  for (const auto* t : {&pred, &gold}) {
    for (const auto& row : t->rows) {
      if (row.size() != width) throw LengthMismatch("score row width does not match the subtask");
    }
  }

  EvalResult r;
  if (subtask == 1) {
    Series s;
    collect(pred, gold, 0, s);
    r.metric = "uncentered_pearson";
    r.value = uncentered_pearson(s.pred, s.gold);
    r.n = s.pred.size();
    r.excluded = s.excluded;
  } else if (aggregation == Aggregation::kConcatenate) {
    Series s;
    collect(pred, gold, 0, s);
    collect(pred, gold, 1, s);
    r.metric = "harmonic_mean_pearson_spearman";
    r.pearson = pearson(s.pred, s.gold);
    r.spearman = spearman(s.pred, s.gold);
    r.value = harmonic_mean(*r.pearson, *r.spearman);
    r.n = s.pred.size();
    r.excluded = s.excluded;
  } else {
    r.metric = "harmonic_mean_pearson_spearman_column_average";
    double p_sum = 0.0, s_sum = 0.0, v_sum = 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
      Series s;
      collect(pred, gold, c, s);
      const double p = pearson(s.pred, s.gold);
      const double sp = spearman(s.pred, s.gold);
      p_sum += p;
      s_sum += sp;
      v_sum += harmonic_mean(p, sp);
      r.n += s.pred.size();
      r.excluded += s.excluded;
    }
    r.pearson = p_sum / 2.0;
    r.spearman = s_sum / 2.0;
    r.value = v_sum / 2.0;
  }
  if (r.excluded > 0) {
    r.warnings.push_back(std::to_string(r.excluded) + " null value(s) excluded; scored over " +
                         std::to_string(r.n));
  }
  return r;
}

EvalResult evaluate_files(const std::filesystem::path& pred, const std::filesystem::path& gold,
                          int subtask, Aggregation aggregation) {
  return evaluate(read_scores(pred, subtask), read_scores(gold, subtask), subtask, aggregation);
}

}  // namespace ctxsim::metrics
