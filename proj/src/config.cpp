#include "negaff/config.hpp"

#include <filesystem>
#include <fstream>

#include "negaff/error.hpp"

namespace negaff {

namespace fs = std::filesystem;
using nlohmann::json;

void to_json(json& j, const PipelineConfig& c) {
  json corpora = json::array();
  for (const auto& s : c.corpora) {
    corpora.push_back(json{{"format", s.format},
                           {"source_path", s.source_path},
                           {"target_path", s.target_path},
                           {"source_lang", s.source_lang},
                           {"target_lang", s.target_lang},
                           {"label", s.label}});
  }
  j = json{{"version", c.version},
           {"corpora", corpora},
           {"detector", {{"kind", c.detector.kind}, {"model_path", c.detector.model_path}}},
           {"lexicons", c.lexicons},
           {"max_target_tokens", c.max_target_tokens},
           {"backend",
            {{"kind", c.backend.kind},
             {"fixture_path", c.backend.fixture_path},
             {"host", c.backend.host},
             {"port", c.backend.port},
             {"api_key_env", c.backend.api_key_env},
             {"requests_per_second", c.backend.requests_per_second},
             {"batch_size", c.backend.batch_size},
             {"max_retries", c.backend.max_retries},
             {"backoff_initial_ms", c.backend.backoff_initial_ms}}},
           {"cache_dir", c.cache_dir},
           {"output_dir", c.output_dir},
           {"seed", c.seed}};
}

void from_json(const json& j, PipelineConfig& c) {
  c = PipelineConfig{};
  c.version = j.value("version", 1);
  const json corpora = j.value("corpora", json::array());
  for (const auto& e : corpora) {
    CorpusSpec s;
    s.format = e.value("format", "");
    s.source_path = e.value("source_path", "");
    s.target_path = e.value("target_path", "");
    s.source_lang = e.value("source_lang", "en");
    s.target_lang = e.value("target_lang", "");
    s.label = e.value("label", "");
    c.corpora.push_back(std::move(s));
  }
  if (j.contains("detector")) {
    c.detector.kind = j["detector"].value("kind", "rules");
    c.detector.model_path = j["detector"].value("model_path", "");
  }
  if (j.contains("lexicons")) j.at("lexicons").get_to(c.lexicons);
  c.max_target_tokens = j.value("max_target_tokens", size_t{40});
  if (j.contains("backend")) {
    const auto& b = j["backend"];
    c.backend.kind = b.value("kind", "mock");
    c.backend.fixture_path = b.value("fixture_path", "");
    c.backend.host = b.value("host", "");
    c.backend.port = b.value("port", 80);
    c.backend.api_key_env = b.value("api_key_env", "NEGAFF_MT_API_KEY");
    c.backend.requests_per_second = b.value("requests_per_second", 0.0);
    c.backend.batch_size = b.value("batch_size", size_t{16});
    c.backend.max_retries = b.value("max_retries", 3);
    c.backend.backoff_initial_ms = b.value("backoff_initial_ms", 100);
  }
  c.cache_dir = j.value("cache_dir", "");
  c.output_dir = j.value("output_dir", ".");
  c.seed = j.value("seed", uint64_t{0});
}

std::vector<Diagnostic> validate_config(const PipelineConfig& c) {
  std::vector<Diagnostic> diags;
  auto check_file = [&](const std::string& field, const std::string& path) {
    if (path.empty()) {
      diags.push_back({field, "path is empty"});
    } else if (!fs::exists(path)) {
      diags.push_back({field, "file does not exist: " + path});
    }
  };

  if (c.version != 1) diags.push_back({"version", "unsupported config version"});
  if (c.max_target_tokens < 1) {
    diags.push_back({"max_target_tokens", "must be >= 1"});
  }
  for (size_t i = 0; i < c.corpora.size(); ++i) {
    const auto& s = c.corpora[i];
    const std::string base = "corpora[" + std::to_string(i) + "]";
    if (s.format != "moses" && s.format != "tsv") {
      diags.push_back({base + ".format", "must be 'moses' or 'tsv'"});
      continue;
    }
    check_file(base + ".source_path", s.source_path);
    if (s.format == "moses") check_file(base + ".target_path", s.target_path);
    if (s.label.empty()) diags.push_back({base + ".label", "corpus label is empty"});
    if (s.target_lang.empty()) diags.push_back({base + ".target_lang", "target language is empty"});
    if (!c.lexicons.empty() && !c.lexicons.count(s.target_lang)) {
      diags.push_back({base + ".target_lang", "no lexicon configured for '" + s.target_lang + "'"});
    }
  }
  if (c.detector.kind != "rules" && c.detector.kind != "crf") {
    diags.push_back({"detector.kind", "must be 'rules' or 'crf'"});
  }
  if (c.detector.kind == "crf") check_file("detector.model_path", c.detector.model_path);
  for (const auto& [lang, path] : c.lexicons) {
    check_file("lexicons." + lang, path);
  }
  if (c.backend.kind != "mock" && c.backend.kind != "http") {
    diags.push_back({"backend.kind", "must be 'mock' or 'http'"});
  }
  if (c.backend.kind == "mock") check_file("backend.fixture_path", c.backend.fixture_path);
  if (c.backend.kind == "http" && c.backend.host.empty()) {
    diags.push_back({"backend.host", "host is empty"});
  }
  if (c.backend.batch_size < 1) diags.push_back({"backend.batch_size", "must be >= 1"});
  if (c.backend.requests_per_second < 0) {
    diags.push_back({"backend.requests_per_second", "must be >= 0"});
  }
  if (c.backend.max_retries < 0) diags.push_back({"backend.max_retries", "must be >= 0"});
  return diags;
}

std::vector<Diagnostic> validate_config_file(const std::string& path, PipelineConfig* parsed) {
  std::ifstream in(path);
  if (!in) return {{"(file)", "cannot read config file: " + path}};
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    return {{"(file)", std::string("config parse error: ") + e.what()}};
  }
  PipelineConfig config;
  try {
    config = j.get<PipelineConfig>();
  } catch (const std::exception& e) {
    return {{"(file)", std::string("config shape error: ") + e.what()}};
  }
  if (parsed) *parsed = config;
  return validate_config(config);
}

PipelineConfig load_config(const std::string& path) {
  PipelineConfig config;
  const auto diags = validate_config_file(path, &config);
  if (!diags.empty()) {
    std::string message = "invalid config " + path + ":";
    for (const auto& d : diags) message += "\n  " + d.field + ": " + d.message;
    fail(message);
  }
  return config;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  json inputs = json::array();
  for (const auto& [p, hash] : manifest.inputs) inputs.push_back(json{{"path", p}, {"sha256", hash}});
  json outputs = json::array();
  for (const auto& [p, records] : manifest.outputs) {
    outputs.push_back(json{{"path", p}, {"records", records}});
  }
  const json j{{"subcommand", manifest.subcommand},
               {"config_hash", manifest.config_hash},
               {"inputs", inputs},
               {"outputs", outputs},
               {"counts", manifest.counts},
               {"wall_ms", manifest.wall_ms}};
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write run manifest: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace negaff
