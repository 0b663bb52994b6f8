#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ctxsim/types.hpp"

namespace ctxsim::text {

// ASCII-only case folding; multi-byte UTF-8 sequences pass through untouched
// so byte offsets stay valid after folding.
std::string fold_case(std::string_view s);

std::string trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

// Byte length of the UTF-8 sequence starting with lead byte c (1 for invalid).
std::size_t utf8_length(unsigned char c);

// Word-level segmentation: maximal runs of letters/digits (any non-ASCII
// byte counts as a letter, apostrophes and hyphens inside a word are kept)
// plus single-character punctuation tokens. Whitespace is dropped.
std::vector<Span> split_words(std::string_view s);

// Whitespace tokens, as used by resources that index tokens by position.
std::vector<Span> split_whitespace(std::string_view s);

// 64-bit FNV-1a; stable across platforms, used for hashed vocabularies.
std::uint64_t fnv1a(std::string_view s);

// Strips <strong>...</strong> markers and returns the marked spans in the
// cleaned text, in order of appearance.
struct MarkedText {
  std::string text;
  std::vector<Span> marked;
};
MarkedText strip_markers(std::string_view s, std::string_view open = "<strong>",
                         std::string_view close = "</strong>");

}  // namespace ctxsim::text
