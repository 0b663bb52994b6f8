#include "ctxsim/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctxsim/errors.hpp"

namespace ctxsim {

namespace {

void append_sentence(std::vector<EncodedToken>& out, std::string_view sentence,
                     const Tokenizer& tokenizer, int segment, SentenceRole role) {
  for (Wordpiece& piece : tokenizer.tokenize(sentence)) {
    out.push_back({piece.id, piece.span, segment, false, role});
  }
}

EncodedToken marker(int id, int segment, SentenceRole role) {
  return {id, Span{}, segment, true, role};
}

// First untruncated position overlapping the span, or npos.
std::size_t first_covering(std::span<const EncodedToken> tokens, Span span, SentenceRole role) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (!t.special && t.role == role && span.overlaps(t.span.start, t.span.end)) return i;
  }
  return std::string::npos;
}

}  // namespace

std::optional<EncodedPair> build_pair_input(std::string_view s1, std::string_view s2,
                                            const Tokenizer& tokenizer, std::size_t max_len,
                                            std::optional<Span> target1,
                                            std::optional<Span> target2) {
  if (max_len == 0) throw InvalidConfig("max_len must be positive");
  if (s1.empty() || s2.empty()) throw InvalidTarget("pair input needs two non-empty sentences");
  const SpecialIds& sp = tokenizer.special();
  std::vector<EncodedToken> tokens;
  tokens.push_back(marker(sp.cls, 0, SentenceRole::kFirst));
  append_sentence(tokens, s1, tokenizer, 0, SentenceRole::kFirst);
  tokens.push_back(marker(sp.sep, 0, SentenceRole::kFirst));
  append_sentence(tokens, s2, tokenizer, 1, SentenceRole::kSecond);
  tokens.push_back(marker(sp.sep, 1, SentenceRole::kSecond));

  const std::pair<std::optional<Span>, SentenceRole> targets[] = {
      {target1, SentenceRole::kFirst}, {target2, SentenceRole::kSecond}};
  for (const auto& [target, role] : targets) {
    if (!target) continue;
    const std::size_t first = first_covering(tokens, *target, role);
    if (first == std::string::npos) {
      throw AlignmentNotFound("span [" + std::to_string(target->start) + ", " +
                              std::to_string(target->end) + ") overlaps no wordpiece");
    }
    if (first >= max_len) return std::nullopt;
  }
  return EncodedPair(std::move(tokens), max_len, true);
}

EncodedPair build_single_input(std::string_view s, const Tokenizer& tokenizer,
                               std::size_t max_len) {
  if (max_len == 0) throw InvalidConfig("max_len must be positive");
  const SpecialIds& sp = tokenizer.special();
  std::vector<EncodedToken> tokens;
  tokens.push_back(marker(sp.cls, 0, SentenceRole::kFirst));
  append_sentence(tokens, s, tokenizer, 0, SentenceRole::kFirst);
  tokens.push_back(marker(sp.sep, 0, SentenceRole::kFirst));
  return EncodedPair(std::move(tokens), max_len, false);
}

TokenAlignment locate_target(const EncodedPair& input, Span span, SentenceRole role) {
  if (span.start >= span.end) {
    throw AlignmentNotFound("empty span [" + std::to_string(span.start) + ", " +
                            std::to_string(span.end) + ")");
  }
  if (role == SentenceRole::kSecond && !input.has_second()) {
    throw AlignmentNotFound("input has no second sentence");
  }
  TokenAlignment alignment;
  bool any = false;
  const auto all = input.all_tokens();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& t = all[i];
    if (t.special || t.role != role || !span.overlaps(t.span.start, t.span.end)) continue;
    any = true;
    if (i < input.max_len()) alignment.wordpiece_indices.push_back(i);
  }
  if (!any) {
    throw AlignmentNotFound("span [" + std::to_string(span.start) + ", " +
                            std::to_string(span.end) + ") overlaps no wordpiece");
  }
  if (alignment.wordpiece_indices.empty()) {
    throw TargetTruncated("target starts beyond max_len " + std::to_string(input.max_len()));
  }
  return alignment;
}

const Matrix& EncoderOutput::layer(int index) const {
  if (index < 0 || index >= static_cast<int>(layers.size())) {
    throw LayerOutOfRange("layer " + std::to_string(index) + " not in [0, " +
                          std::to_string(n_layers()) + "]");
  }
  return layers[static_cast<std::size_t>(index)];
}

Vector pool_target(const EncoderOutput& output, const TokenAlignment& alignment, int layer) {
  const Matrix& m = output.layer(layer);
  if (alignment.wordpiece_indices.empty()) throw AlignmentNotFound("empty alignment");
  Vector sum = Vector::Zero(m.cols());
  for (std::size_t idx : alignment.wordpiece_indices) {
    if (idx >= static_cast<std::size_t>(m.rows())) {
      throw AlignmentNotFound("alignment index " + std::to_string(idx) +
                              " beyond sequence length " + std::to_string(m.rows()));
    }
    sum += m.row(static_cast<Eigen::Index>(idx)).transpose();
  }
  if (alignment.wordpiece_indices.size() == 1) return sum;
  return sum / static_cast<double>(alignment.wordpiece_indices.size());
}

double cosine_similarity(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("cosine of vectors with sizes " + std::to_string(u.size()) +
                            " and " + std::to_string(v.size()));
  }
  // Plain loop: the summation order must not depend on operand alignment so
  // that cos(u, v) == cos(v, u) bit for bit.
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ZeroVector("cosine similarity of an all-zero vector");
  // sqrt of the product keeps cos(u, u) == 1 exactly.
  const double c = uv / std::sqrt(uu * vv);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace ctxsim
