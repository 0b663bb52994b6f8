#include "ctxsim/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <sstream>

#include "ctxsim/errors.hpp"

namespace ctxsim::io {

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingResource("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingResource("cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

namespace {

OrderedJson target_to_json(const ContextedTarget& t) {
  OrderedJson j;
  j["start"] = t.span.start;
  j["end"] = t.span.end;
  j["lemma"] = t.lemma;
  j["pos"] = std::string(to_string(t.pos));
  return j;
}

ContextedTarget target_from_json(const std::string& sentence, const nlohmann::json& j,
                                 Language lang) {
  ContextedTarget t;
  t.sentence = sentence;
  t.span = {j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()};
  t.lemma = j.at("lemma").get<std::string>();
  t.pos = parse_pos(j.at("pos").get<std::string>());
  t.language = lang;
  return t;
}

}  // namespace

OrderedJson pair_to_json(const LabeledPair& pair) {
  OrderedJson j;
  j["id"] = pair.id;
  j["source"] = std::string(to_string(pair.source));
  j["lang"] = std::string(to_string(pair.a.language));
  j["label"] = std::string(to_string(pair.label));
  j["graded_score"] = pair.graded_score ? OrderedJson(*pair.graded_score) : OrderedJson(nullptr);
  j["s1"] = pair.a.sentence;
  j["t1"] = target_to_json(pair.a);
  j["s2"] = pair.b.sentence;
  j["t2"] = target_to_json(pair.b);
  return j;
}

LabeledPair pair_from_json(const nlohmann::json& j) {
  LabeledPair p;
  p.id = j.at("id").get<std::string>();
  p.source = parse_source(j.at("source").get<std::string>());
  const Language lang = parse_language(j.at("lang").get<std::string>());
  p.label = parse_label(j.at("label").get<std::string>());
  if (!j.at("graded_score").is_null()) p.graded_score = j.at("graded_score").get<double>();
  p.a = target_from_json(j.at("s1").get<std::string>(), j.at("t1"), lang);
  p.b = target_from_json(j.at("s2").get<std::string>(), j.at("t2"), lang);
  return p;
}

std::string dataset_to_jsonl(const std::vector<LabeledPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += pair_to_json(p).dump();
    out += '\n';
  }
  return out;
}

void write_dataset(const std::filesystem::path& path, const std::vector<LabeledPair>& pairs) {
  write_file_atomic(path, dataset_to_jsonl(pairs));
}

std::vector<LabeledPair> read_dataset(const std::filesystem::path& path) {
  std::vector<LabeledPair> pairs;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      pairs.push_back(pair_from_json(nlohmann::json::parse(line)));
      pairs.back().validate();
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRow(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const InvalidTarget& e) {
      throw MalformedRow(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return pairs;
}

}  // namespace ctxsim::io
