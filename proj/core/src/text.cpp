#include "ctxsim/text.hpp"

#include <cctype>

namespace ctxsim::text {

std::string fold_case(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::size_t utf8_length(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c >> 5) == 0x6) return 2;
  if ((c >> 4) == 0xE) return 3;
  if ((c >> 3) == 0x1E) return 4;
  return 1;
}

namespace {

bool is_word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

}  // namespace

std::vector<Span> split_words(std::string_view s) {
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (!is_word_byte(c)) {
      out.push_back({i, i + 1});
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < s.size()) {
      const auto d = static_cast<unsigned char>(s[i]);
      if (is_word_byte(d)) {
        i += utf8_length(d);
      } else if ((d == '\'' || d == '-') && i + 1 < s.size() &&
                 is_word_byte(static_cast<unsigned char>(s[i + 1]))) {
        ++i;
      } else {
        break;
      }
    }
    if (i > s.size()) i = s.size();
    out.push_back({start, i});
  }
  return out;
}

std::vector<Span> split_whitespace(std::string_view s) {
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    out.push_back({start, i});
  }
  return out;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

MarkedText strip_markers(std::string_view s, std::string_view open, std::string_view close) {
  MarkedText out;
  out.text.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.substr(i, open.size()) == open) {
      const std::size_t body = i + open.size();
      const std::size_t stop = s.find(close, body);
      if (stop == std::string_view::npos) {
        out.text.append(s.substr(i));
        break;
      }
      const std::size_t start = out.text.size();
      out.text.append(s.substr(body, stop - body));
      Span span{start, out.text.size()};
      while (span.start < span.end &&
             std::isspace(static_cast<unsigned char>(out.text[span.start]))) {
        ++span.start;
      }
      while (span.end > span.start &&
             std::isspace(static_cast<unsigned char>(out.text[span.end - 1]))) {
        --span.end;
      }
      out.marked.push_back(span);
      i = stop + close.size();
      continue;
    }
    out.text.push_back(s[i]);
    ++i;
  }
  return out;
}

}  // namespace ctxsim::text
