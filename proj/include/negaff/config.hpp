#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace negaff {

struct CorpusSpec {
  std::string format;  // "moses" | "tsv"
  std::string source_path;
  std::string target_path;  // moses only
  std::string source_lang = "en";
  std::string target_lang;
  std::string label;
};

struct DetectorConfig {
  std::string kind = "rules";  // "rules" | "crf"
  std::string model_path;      // crf only
};

struct BackendConfig {
  std::string kind = "mock";  // "mock" | "http"
  std::string fixture_path;   // mock only
  std::string host;           // http only
  int port = 80;
  std::string api_key_env = "NEGAFF_MT_API_KEY";
  double requests_per_second = 0.0;
  size_t batch_size = 16;
  int max_retries = 3;
  int backoff_initial_ms = 100;
};

struct PipelineConfig {
  int version = 1;
  std::vector<CorpusSpec> corpora;
  DetectorConfig detector;
  std::map<std::string, std::string> lexicons;  // lang -> path
  size_t max_target_tokens = 40;
  BackendConfig backend;
  std::string cache_dir;
  std::string output_dir = ".";
  uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const PipelineConfig& c);
void from_json(const nlohmann::json& j, PipelineConfig& c);

struct Diagnostic {
  std::string field;
  std::string message;
};

// All problems at once, each anchored to a config field path; empty means
// valid. Referenced files must exist at validation time.
std::vector<Diagnostic> validate_config(const PipelineConfig& config);

// Unreadable/unparsable file yields a single fatal diagnostic.
std::vector<Diagnostic> validate_config_file(const std::string& path, PipelineConfig* parsed = nullptr);

PipelineConfig load_config(const std::string& path);

// Everything needed to replay a run bit-identically (given a warm cache):
// the config hash, input content hashes, output record counts.
struct RunManifest {
  std::string subcommand;
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, sha256
  std::vector<std::pair<std::string, uint64_t>> outputs;     // path, records
  std::map<std::string, uint64_t> counts;
  double wall_ms = 0.0;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace negaff
