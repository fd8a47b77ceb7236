#include "negaff/corpus_io.hpp"

#include "negaff/unicode.hpp"

namespace negaff {

using nlohmann::json;

bool operator==(const SentencePair& a, const SentencePair& b) {
  return a.id == b.id && a.source_lang == b.source_lang && a.target_lang == b.target_lang &&
         a.source_text == b.source_text && a.target_text == b.target_text && a.corpus == b.corpus;
}

void to_json(json& j, const SentencePair& p) {
  j = json{{"id", p.id},
           {"source_lang", p.source_lang},
           {"target_lang", p.target_lang},
           {"source_text", p.source_text},
           {"target_text", p.target_text},
           {"corpus", p.corpus}};
}

void from_json(const json& j, SentencePair& p) {
  j.at("id").get_to(p.id);
  j.at("source_lang").get_to(p.source_lang);
  j.at("target_lang").get_to(p.target_lang);
  j.at("source_text").get_to(p.source_text);
  j.at("target_text").get_to(p.target_text);
  j.at("corpus").get_to(p.corpus);
}

void to_json(json& j, const CorpusStats& s) {
  j = json{{"corpus", s.corpus},
           {"total_pairs", s.total_pairs},
           {"neg_both", s.neg_both},
           {"neg_either", s.neg_either},
           {"neg_neither", s.neg_neither},
           {"yielded_pairs", s.yielded_pairs}};
}

void from_json(const json& j, CorpusStats& s) {
  j.at("corpus").get_to(s.corpus);
  j.at("total_pairs").get_to(s.total_pairs);
  j.at("neg_both").get_to(s.neg_both);
  j.at("neg_either").get_to(s.neg_either);
  j.at("neg_neither").get_to(s.neg_neither);
  j.at("yielded_pairs").get_to(s.yielded_pairs);
}

std::string trim(std::string_view text) {
  size_t lo = 0;
  size_t hi = text.size();
  while (lo < hi && (static_cast<unsigned char>(text[lo]) <= ' ')) ++lo;
  while (hi > lo && (static_cast<unsigned char>(text[hi - 1]) <= ' ')) --hi;
  return std::string(text.substr(lo, hi - lo));
}

namespace {

uint64_t count_remaining_lines(std::ifstream& in) {
  uint64_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

MosesReader::MosesReader(const std::string& source_path, const std::string& target_path,
                         std::string source_lang, std::string target_lang, std::string corpus)
    : source_(source_path),
      target_(target_path),
      source_path_(source_path),
      target_path_(target_path),
      source_lang_(std::move(source_lang)),
      target_lang_(std::move(target_lang)),
      corpus_(std::move(corpus)) {
  if (!source_) fail("cannot open bitext source file: " + source_path);
  if (!target_) fail("cannot open bitext target file: " + target_path);
}

std::optional<SentencePair> MosesReader::next() {
  std::string src_line, tgt_line;
  for (;;) {
    const bool have_src = static_cast<bool>(std::getline(source_, src_line));
    const bool have_tgt = static_cast<bool>(std::getline(target_, tgt_line));
    if (have_src != have_tgt) {
      uint64_t src_total = line_ + (have_src ? 1 : 0);
      uint64_t tgt_total = line_ + (have_tgt ? 1 : 0);
      src_total += count_remaining_lines(source_);
      tgt_total += count_remaining_lines(target_);
      fail("line count mismatch: " + source_path_ + " has " + std::to_string(src_total) +
           " lines, " + target_path_ + " has " + std::to_string(tgt_total));
    }
    if (!have_src) return std::nullopt;
    ++line_;

    if (!uni::valid_utf8(src_line) || !uni::valid_utf8(tgt_line)) {
      ++diag_.invalid_utf8;
      continue;
    }
    SentencePair p;
    p.source_text = trim(src_line);
    p.target_text = trim(tgt_line);
    if (p.source_text.empty() || p.target_text.empty()) {
      ++diag_.blank_lines;
      continue;
    }
    p.id = corpus_ + ":" + std::to_string(line_);
    p.source_lang = source_lang_;
    p.target_lang = target_lang_;
    p.corpus = corpus_;
    return p;
  }
}

TsvReader::TsvReader(const std::string& path, std::string source_lang, std::string target_lang,
                     std::string corpus)
    : in_(path),
      source_lang_(std::move(source_lang)),
      target_lang_(std::move(target_lang)),
      corpus_(std::move(corpus)) {
  if (!in_) fail("cannot open tsv bitext file: " + path);
}

std::optional<SentencePair> TsvReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!uni::valid_utf8(line)) {
      ++diag_.invalid_utf8;
      continue;
    }
    const size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      ++diag_.malformed_lines;
      continue;
    }
    SentencePair p;
    p.source_text = trim(std::string_view(line).substr(0, tab));
    p.target_text = trim(std::string_view(line).substr(tab + 1));
    if (p.source_text.empty() || p.target_text.empty()) {
      ++diag_.blank_lines;
      continue;
    }
    p.id = corpus_ + ":" + std::to_string(line_);
    p.source_lang = source_lang_;
    p.target_lang = target_lang_;
    p.corpus = corpus_;
    return p;
  }
  return std::nullopt;
}

JsonlWriter::JsonlWriter(const std::string& path) : out_(path, std::ios::binary), path_(path) {
  if (!out_) fail("cannot open output file: " + path);
}

uint64_t JsonlWriter::write(const json& record) {
  out_ << record.dump() << '\n';
  if (!out_) fail("write failed: " + path_);
  return ++count_;
}

void JsonlWriter::flush() {
  out_.flush();
  if (!out_) fail("write failed: " + path_);
}

JsonlLineReader::JsonlLineReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
  if (!in_) fail("cannot open input file: " + path);
}

std::optional<json> JsonlLineReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (trim(line).empty()) continue;
    try {
      return json::parse(line);
    } catch (const json::parse_error& e) {
      fail(path_ + ":" + std::to_string(line_) + ": " + e.what());
    }
  }
  return std::nullopt;
}

}  // namespace negaff
