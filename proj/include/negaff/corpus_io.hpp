#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "negaff/error.hpp"

namespace negaff {

// One aligned bitext record. source_lang is "en" throughout this pipeline.
struct SentencePair {
  std::string id;
  std::string source_lang;
  std::string target_lang;
  std::string source_text;
  std::string target_text;
  std::string corpus;
};

bool operator==(const SentencePair& a, const SentencePair& b);

struct CorpusStats {
  std::string corpus;
  uint64_t total_pairs = 0;
  uint64_t neg_both = 0;
  uint64_t neg_either = 0;
  uint64_t neg_neither = 0;
  uint64_t yielded_pairs = 0;
};

void to_json(nlohmann::json& j, const SentencePair& p);
void from_json(const nlohmann::json& j, SentencePair& p);
void to_json(nlohmann::json& j, const CorpusStats& s);
void from_json(const nlohmann::json& j, CorpusStats& s);

// Skipped-and-counted input problems. Web-mined bitexts are noisy; a bad
// line must not kill a multi-million-line run.
struct IngestDiagnostics {
  uint64_t invalid_utf8 = 0;
  uint64_t malformed_lines = 0;
  uint64_t blank_lines = 0;
};

// Streaming reader over a Moses-style bitext: two line-aligned files.
// Throws on line-count mismatch (detected at end of the shorter file),
// naming both counts. ids are "<corpus>:<1-based line>".
class MosesReader {
 public:
  MosesReader(const std::string& source_path, const std::string& target_path,
              std::string source_lang, std::string target_lang, std::string corpus);

  std::optional<SentencePair> next();

  const IngestDiagnostics& diagnostics() const { return diag_; }
  uint64_t lines_read() const { return line_; }

 private:
  std::ifstream source_;
  std::ifstream target_;
  std::string source_path_;
  std::string target_path_;
  std::string source_lang_;
  std::string target_lang_;
  std::string corpus_;
  uint64_t line_ = 0;
  IngestDiagnostics diag_;
};

// Streaming reader over "source<TAB>target" lines. Lines without exactly
// two fields are skipped and counted.
class TsvReader {
 public:
  TsvReader(const std::string& path, std::string source_lang, std::string target_lang,
            std::string corpus);

  std::optional<SentencePair> next();

  const IngestDiagnostics& diagnostics() const { return diag_; }

 private:
  std::ifstream in_;
  std::string source_lang_;
  std::string target_lang_;
  std::string corpus_;
  uint64_t line_ = 0;
  IngestDiagnostics diag_;
};

std::string trim(std::string_view text);

// Line-by-line JSONL output; one writer per file. write() returns the
// running record count.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path);

  uint64_t write(const nlohmann::json& record);
  uint64_t count() const { return count_; }
  void flush();

 private:
  std::ofstream out_;
  std::string path_;
  uint64_t count_ = 0;
};

// Pull-based JSONL input. Parse errors are fatal and name the line number.
class JsonlLineReader {
 public:
  explicit JsonlLineReader(const std::string& path);

  std::optional<nlohmann::json> next();
  uint64_t line() const { return line_; }

 private:
  std::ifstream in_;
  std::string path_;
  uint64_t line_ = 0;
};

template <typename Record>
uint64_t write_jsonl(const std::vector<Record>& records, const std::string& path) {
  JsonlWriter writer(path);
  for (size_t i = 0; i < records.size(); ++i) {
    nlohmann::json j;
    try {
      j = records[i];
    } catch (const std::exception& e) {
      std::string id = "record #" + std::to_string(i);
      fail("serialization failed for " + id + ": " + e.what());
    }
    writer.write(j);
  }
  writer.flush();
  return writer.count();
}

template <typename Record>
std::vector<Record> read_jsonl(const std::string& path) {
  JsonlLineReader reader(path);
  std::vector<Record> records;
  while (auto j = reader.next()) {
    try {
      records.push_back(j->template get<Record>());
    } catch (const std::exception& e) {
      fail(path + ":" + std::to_string(reader.line()) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace negaff
