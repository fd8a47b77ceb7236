#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "negaff/task_router.hpp"
#include "test_support.hpp"

using namespace negaff;
using namespace negaff::test;

namespace {

RuleDetector en_detector() { return RuleDetector({{"en", en_lexicon()}}); }

std::vector<std::pair<std::string, std::string>> review_sentences() {
  return {{"s1", "It is not a bad film."},
          {"s2", "A masterpiece."},
          {"s3", "A thriller without a lot of thrills."}};
}

}  // namespace

TEST_CASE("negated inputs get '<text> [SEP] <interpretation>'") {
  const RuleDetector detector = en_detector();
  LookupGenerator generator(fixture("router_lookup.jsonl"));
  RouteStats stats;
  const auto routed = route(review_sentences(), detector, generator, {}, &stats);
  REQUIRE(routed.size() == 3);

  CHECK(routed[0].has_negation);
  CHECK(*routed[0].interpretation == "It is a good movie.");
  CHECK(routed[0].combined == "It is not a bad film. [SEP] It is a good movie.");

  CHECK(!routed[1].has_negation);
  CHECK(!routed[1].interpretation.has_value());
  CHECK(routed[1].combined == "A masterpiece.");

  CHECK(routed[2].combined ==
        "A thriller without a lot of thrills. [SEP] A thriller with little thrills.");
  CHECK(stats.total == 3);
  CHECK(stats.negated == 2);
  CHECK(stats.fallbacks == 0);
}

TEST_CASE("separator appears exactly once and only for negated inputs") {
  const RuleDetector detector = en_detector();
  LookupGenerator generator(fixture("router_lookup.jsonl"));
  const auto routed = route(review_sentences(), detector, generator, {}, nullptr);
  for (const auto& e : routed) {
    size_t count = 0;
    for (size_t pos = 0; (pos = e.combined.find(" [SEP] ", pos)) != std::string::npos; ++pos) {
      ++count;
    }
    if (e.has_negation && e.interpretation) {
      CHECK(count == 1);
      CHECK(e.combined == e.text + " [SEP] " + *e.interpretation);
    } else {
      CHECK(count == 0);
      CHECK(e.combined == e.text);
    }
  }
}

TEST_CASE("separator is configurable") {
  const RuleDetector detector = en_detector();
  LookupGenerator generator(fixture("router_lookup.jsonl"));
  RouterOptions options;
  options.separator = "</s>";
  const auto routed = route({{"s1", "It is not a bad film."}}, detector, generator, options, nullptr);
  CHECK(routed[0].combined == "It is not a bad film. </s> It is a good movie.");
}

TEST_CASE("generator outage never drops records") {
  const RuleDetector detector = en_detector();
  LookupGenerator generator(fixture("router_lookup_partial.jsonl"));
  const std::vector<std::pair<std::string, std::string>> sentences = {
      {"s1", "It is not a bad film."},
      {"s2", "A masterpiece."},
      {"s4", "She may not be real, but the laughs are."},   // missing from partial fixture
      {"s5", "He feels like a spectator and not a participant"}};
  RouteStats stats;
  const auto routed = route(sentences, detector, generator, {}, &stats);
  REQUIRE(routed.size() == sentences.size());
  CHECK(stats.fallbacks == 2);
  CHECK(routed[2].has_negation);
  CHECK(!routed[2].interpretation.has_value());
  CHECK(routed[2].combined == sentences[2].second);  // pass-through
  CHECK(routed[3].combined == sentences[3].second);
}

TEST_CASE("interpretation containing negation is flagged, not altered") {
  const RuleDetector detector = en_detector();
  LookupGenerator generator(fixture("router_lookup.jsonl"));
  RouteStats stats;
  const auto routed =
      route({{"s6", "The movie has no idea of it is serious."}}, detector, generator, {}, &stats);
  CHECK(*routed[0].interpretation == "The movie has a lack of idea that it is serious.");
  CHECK(stats.negated_interpretations == 1);  // "lack" is a lexicalized cue
}

TEST_CASE("cue-deletion baseline strips cue tokens and affixes") {
  const RuleDetector detector = en_detector();
  CueDeletionGenerator generator(detector);
  CHECK(*generator.interpret("It is not a bad film.") == "It is a bad film .");
  CHECK(*generator.interpret("largely untouched walls") == "largely touched walls");
  CHECK(*generator.interpret("plain text") == "plain text");
  CHECK(generator.name().find("meaning-unsafe") != std::string::npos);
}

TEST_CASE("http generator posts text and reads the interpretation") {
  httplib::Server server;
  server.Post("/interpret", [](const httplib::Request& request, httplib::Response& response) {
    const auto body = nlohmann::json::parse(request.body);
    response.set_content(
        nlohmann::json{{"interpretation", "affirmed: " + body["text"].get<std::string>()}}.dump(),
        "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpGenerator generator("127.0.0.1", port);
  CHECK(*generator.interpret("It is not a bad film.") == "affirmed: It is not a bad film.");
  server.stop();
  server_thread.join();

  HttpGenerator dead("127.0.0.1", 1);
  CHECK(!dead.interpret("anything").has_value());
}

TEST_CASE("export: tsv columns and jsonl round trip") {
  TempDir dir("routed");
  const RuleDetector detector = en_detector();
  LookupGenerator generator(fixture("router_lookup.jsonl"));
  const auto routed = route(review_sentences(), detector, generator, {}, nullptr);

  const std::string tsv_path = dir.file("routed.tsv");
  CHECK(export_routed(routed, ExportFormat::tsv, tsv_path) == 3);
  const std::string content = read_file(tsv_path);
  CHECK(content.rfind("id\ttext\thas_negation\tinterpretation\tcombined\n", 0) == 0);
  CHECK(content.find("s2\tA masterpiece.\tfalse\t\tA masterpiece.") != std::string::npos);

  const std::string jsonl_path = dir.file("routed.jsonl");
  CHECK(export_routed(routed, ExportFormat::jsonl, jsonl_path) == 3);
  const auto loaded = read_jsonl<RoutedExample>(jsonl_path);
  REQUIRE(loaded.size() == routed.size());
  for (size_t i = 0; i < routed.size(); ++i) CHECK(loaded[i] == routed[i]);
}

TEST_CASE("empty input gives a header-only tsv") {
  TempDir dir("routed_empty");
  const std::string path = dir.file("routed.tsv");
  CHECK(export_routed({}, ExportFormat::tsv, path) == 0);
  CHECK(read_file(path) == "id\ttext\thas_negation\tinterpretation\tcombined\n");
}

TEST_CASE("importance split partitions with last-wins duplicates") {
  uint64_t dups = 0;
  const auto annotations = load_importance(fixture("importance.tsv"), &dups);
  CHECK(dups == 1);
  CHECK(annotations.at("s1") == Importance::unimportant);  // later line wins

  std::vector<RoutedExample> examples(6);
  for (size_t i = 0; i < examples.size(); ++i) {
    examples[i].id = "s" + std::to_string(i + 1);
    examples[i].text = "t";
    examples[i].combined = "t";
  }
  const auto split = split_by_importance(examples, annotations);
  CHECK(split.important.size() == 1);    // s4
  CHECK(split.unimportant.size() == 2);  // s1 (dup overridden), s3
  CHECK(split.unannotated.size() == 3);  // s2, s5, s6
  CHECK(split.important[0].importance == Importance::important);
  CHECK(split.important.size() + split.unimportant.size() + split.unannotated.size() ==
        examples.size());
}

TEST_CASE("empty annotations leave everything unannotated") {
  std::vector<RoutedExample> examples(3);
  for (size_t i = 0; i < examples.size(); ++i) examples[i].id = "x" + std::to_string(i);
  const auto split = split_by_importance(examples, {});
  CHECK(split.unannotated.size() == 3);
  CHECK(split.important.empty());
}
