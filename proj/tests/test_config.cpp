#include <doctest.h>

#include "negaff/config.hpp"
#include "test_support.hpp"

using namespace negaff;
using namespace negaff::test;

namespace {

std::string valid_config_json(const TempDir& dir) {
  // All referenced files must exist for the config to validate.
  write_file(dir.file("a.en"), "hello\n");
  write_file(dir.file("a.no"), "hei\n");
  write_file(dir.file("fixture.jsonl"), "");
  const nlohmann::json j{
      {"version", 1},
      {"corpora",
       {{{"format", "moses"},
         {"source_path", dir.file("a.en")},
         {"target_path", dir.file("a.no")},
         {"source_lang", "en"},
         {"target_lang", "no"},
         {"label", "c"}}}},
      {"detector", {{"kind", "rules"}}},
      {"lexicons",
       {{"en", data_file("lexicons/en.json")}, {"no", data_file("lexicons/no.json")}}},
      {"max_target_tokens", 40},
      {"backend", {{"kind", "mock"}, {"fixture_path", dir.file("fixture.jsonl")}}},
      {"cache_dir", dir.file("cache")},
      {"output_dir", dir.file("out")},
      {"seed", 1}};
  return j.dump(2);
}

}  // namespace

TEST_CASE("well-formed config validates cleanly") {
  TempDir dir("cfg_ok");
  write_file(dir.file("config.json"), valid_config_json(dir));
  CHECK(validate_config_file(dir.file("config.json")).empty());
}

TEST_CASE("max_target_tokens=0 yields one diagnostic on that field") {
  TempDir dir("cfg_len");
  nlohmann::json j = nlohmann::json::parse(valid_config_json(dir));
  j["max_target_tokens"] = 0;
  write_file(dir.file("config.json"), j.dump());
  const auto diags = validate_config_file(dir.file("config.json"));
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].field == "max_target_tokens");
}

TEST_CASE("missing lexicon file names the path") {
  TempDir dir("cfg_lex");
  nlohmann::json j = nlohmann::json::parse(valid_config_json(dir));
  j["lexicons"]["no"] = dir.file("missing.json");
  write_file(dir.file("config.json"), j.dump());
  const auto diags = validate_config_file(dir.file("config.json"));
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].field == "lexicons.no");
  CHECK(diags[0].message.find("missing.json") != std::string::npos);
}

TEST_CASE("unreadable config gives a single fatal diagnostic") {
  const auto diags = validate_config_file("/nonexistent/config.json");
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].field == "(file)");
}

TEST_CASE("all problems are enumerated at once") {
  TempDir dir("cfg_multi");
  nlohmann::json j = nlohmann::json::parse(valid_config_json(dir));
  j["max_target_tokens"] = 0;
  j["detector"]["kind"] = "nonsense";
  j["backend"]["kind"] = "mock";
  j["backend"]["fixture_path"] = dir.file("gone.jsonl");
  write_file(dir.file("config.json"), j.dump());
  const auto diags = validate_config_file(dir.file("config.json"));
  CHECK(diags.size() == 3);
}

TEST_CASE("manifest writes all replay fields") {
  TempDir dir("manifest");
  RunManifest m;
  m.subcommand = "build-pairs";
  m.config_hash = "deadbeef";
  m.inputs.emplace_back("a.en", "hash1");
  m.outputs.emplace_back("afin_pairs.jsonl", 42);
  m.counts["emitted"] = 42;
  m.wall_ms = 12.5;
  write_manifest(m, dir.file("run_manifest.json"));
  const auto j = nlohmann::json::parse(read_file(dir.file("run_manifest.json")));
  CHECK(j.at("subcommand") == "build-pairs");
  CHECK(j.at("config_hash") == "deadbeef");
  CHECK(j.at("inputs")[0].at("sha256") == "hash1");
  CHECK(j.at("outputs")[0].at("records") == 42);
  CHECK(j.at("counts").at("emitted") == 42);
}
