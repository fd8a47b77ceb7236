#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <thread>

#include "negaff/mt_client.hpp"
#include "test_support.hpp"

using namespace negaff;
using namespace negaff::test;

namespace {

TranslationRequest req(const std::string& text, const std::string& from = "no") {
  return TranslationRequest{text, from, "en"};
}

}  // namespace

TEST_CASE("mock backend serves the bundled bitext fixture") {
  FakeClock clock;
  MockBackend backend(fixture("mock_translations.jsonl"), clock);
  MtOptions options;
  const auto outcome =
      translate_batch({req("Og det finnes kun en Sannhet.")}, backend, nullptr, options, clock);
  REQUIRE(outcome.results.size() == 1);
  REQUIRE(outcome.results[0].record.has_value());
  CHECK(outcome.results[0].record->translation == "And there is only one truth.");
  CHECK(outcome.results[0].record->backend == "mock");
}

TEST_CASE("second identical request is served from cache with zero backend calls") {
  TempDir dir("cache");
  FakeClock clock;
  MockBackend backend(fixture("mock_translations.jsonl"), clock);
  TranslationCache cache(dir.file("cache"));
  MtOptions options;

  const auto first =
      translate_batch({req("Og det finnes kun en Sannhet.")}, backend, &cache, options, clock);
  CHECK(first.cache_hits == 0);
  CHECK(backend.calls() == 1);

  const auto second =
      translate_batch({req("Og det finnes kun en Sannhet.")}, backend, &cache, options, clock);
  CHECK(second.cache_hits == 1);
  CHECK(backend.calls() == 1);  // unchanged
  REQUIRE(second.results[0].record.has_value());
  CHECK(second.results[0].record->translation == first.results[0].record->translation);
  CHECK(second.results[0].record->fetched_at == first.results[0].record->fetched_at);
}

TEST_CASE("cache persists across instances (warm restart)") {
  TempDir dir("cache_restart");
  FakeClock clock;
  MockBackend backend(fixture("mock_translations.jsonl"), clock);
  MtOptions options;
  {
    TranslationCache cache(dir.file("cache"));
    translate_batch({req("Og det finnes kun en Sannhet.")}, backend, &cache, options, clock);
  }
  TranslationCache reopened(dir.file("cache"));
  CHECK(reopened.size() == 1);
  const auto hit = reopened.lookup(req("Og det finnes kun en Sannhet."), "mock");
  REQUIRE(hit.has_value());
  CHECK(hit->translation == "And there is only one truth.");
}

TEST_CASE("permanent failure of one item preserves order of the others") {
  TempDir dir("failures");
  write_file(dir.file("fixture.jsonl"),
             "{\"key\": \"no|en|one\", \"translation\": \"one-en\"}\n"
             "{\"key\": \"no|en|two\", \"error\": \"permanent\"}\n"
             "{\"key\": \"no|en|three\", \"translation\": \"three-en\"}\n");
  FakeClock clock;
  MockBackend backend(dir.file("fixture.jsonl"), clock);
  MtOptions options;
  const auto outcome =
      translate_batch({req("one"), req("two"), req("three")}, backend, nullptr, options, clock);
  REQUIRE(outcome.results.size() == 3);
  CHECK(outcome.results[0].record->translation == "one-en");
  CHECK(!outcome.results[1].record.has_value());
  CHECK(outcome.results[1].failure == FailureKind::permanent);
  CHECK(outcome.results[2].record->translation == "three-en");
}

TEST_CASE("transient failures retry with backoff, then succeed") {
  TempDir dir("transient");
  write_file(dir.file("fixture.jsonl"),
             "{\"key\": \"no|en|flaky\", \"translation\": \"flaky-en\", \"fail_times\": 2}\n");
  FakeClock clock;
  MockBackend backend(dir.file("fixture.jsonl"), clock);
  MtOptions options;
  options.max_retries = 3;
  options.backoff_initial_ms = 100;
  const auto outcome = translate_batch({req("flaky")}, backend, nullptr, options, clock);
  REQUIRE(outcome.results[0].record.has_value());
  CHECK(outcome.results[0].record->translation == "flaky-en");
  CHECK(backend.calls() == 3);
  // Exponential backoff: sleeps of 100 then 200 on the fake clock.
  CHECK(backend.call_times_ms()[0] == 0);
  CHECK(backend.call_times_ms()[1] == 100);
  CHECK(backend.call_times_ms()[2] == 300);
}

TEST_CASE("transient failures beyond the retry cap are recorded as transient") {
  TempDir dir("transient_cap");
  write_file(dir.file("fixture.jsonl"), "{\"key\": \"no|en|down\", \"error\": \"transient\"}\n");
  FakeClock clock;
  MockBackend backend(dir.file("fixture.jsonl"), clock);
  MtOptions options;
  options.max_retries = 2;
  const auto outcome = translate_batch({req("down")}, backend, nullptr, options, clock);
  CHECK(!outcome.results[0].record.has_value());
  CHECK(outcome.results[0].failure == FailureKind::transient);
  CHECK(backend.calls() == 3);  // initial + 2 retries
}

TEST_CASE("rate limiter spaces backend calls at the configured rate") {
  TempDir dir("rps");
  std::string fixture_content;
  for (int i = 0; i < 6; ++i) {
    fixture_content +=
        "{\"key\": \"no|en|s" + std::to_string(i) + "\", \"translation\": \"t" + std::to_string(i) + "\"}\n";
  }
  write_file(dir.file("fixture.jsonl"), fixture_content);
  FakeClock clock;
  MockBackend backend(dir.file("fixture.jsonl"), clock);
  MtOptions options;
  options.requests_per_second = 4;  // 250 ms between calls
  options.batch_size = 1;
  std::vector<TranslationRequest> requests;
  for (int i = 0; i < 6; ++i) requests.push_back(req("s" + std::to_string(i)));
  const auto outcome = translate_batch(requests, backend, nullptr, options, clock);
  CHECK(outcome.backend_batches == 6);
  const auto& times = backend.call_times_ms();
  REQUIRE(times.size() == 6);
  for (size_t i = 1; i < times.size(); ++i) {
    CHECK(times[i] - times[i - 1] >= 250);
  }
}

TEST_CASE("batching respects the configured batch size") {
  TempDir dir("batching");
  std::string fixture_content;
  for (int i = 0; i < 10; ++i) {
    fixture_content +=
        "{\"key\": \"no|en|b" + std::to_string(i) + "\", \"translation\": \"t" + std::to_string(i) + "\"}\n";
  }
  write_file(dir.file("fixture.jsonl"), fixture_content);
  FakeClock clock;
  MockBackend backend(dir.file("fixture.jsonl"), clock);
  MtOptions options;
  options.batch_size = 4;
  std::vector<TranslationRequest> requests;
  for (int i = 0; i < 10; ++i) requests.push_back(req("b" + std::to_string(i)));
  const auto outcome = translate_batch(requests, backend, nullptr, options, clock);
  CHECK(outcome.backend_batches == 3);  // 4 + 4 + 2
  for (int i = 0; i < 10; ++i) {
    CHECK(outcome.results[static_cast<size_t>(i)].record->translation == "t" + std::to_string(i));
  }
}

TEST_CASE("invalid requests fail fast without touching the backend") {
  FakeClock clock;
  MockBackend backend(fixture("mock_translations.jsonl"), clock);
  MtOptions options;
  const auto outcome = translate_batch({TranslationRequest{"", "no", "en"},
                                        TranslationRequest{"hello", "en", "en"}},
                                       backend, nullptr, options, clock);
  CHECK(backend.calls() == 0);
  CHECK(outcome.results[0].failure == FailureKind::permanent);
  CHECK(outcome.results[1].failure == FailureKind::permanent);
}

TEST_CASE("http adapter round trip against a local server") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/translate", [&](const httplib::Request& request, httplib::Response& response) {
    ++hits;
    const auto body = nlohmann::json::parse(request.body);
    nlohmann::json translations = nlohmann::json::array();
    for (const auto& t : body["texts"]) {
      translations.push_back("english:" + t.get<std::string>());
    }
    response.set_content(nlohmann::json{{"translations", translations}}.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpBackend backend("127.0.0.1", port, "test-key");
  const auto items = backend.translate({req("hei"), req("takk")});
  REQUIRE(items.size() == 2);
  CHECK(items[0].ok);
  CHECK(items[0].translation == "english:hei");
  CHECK(items[1].translation == "english:takk");
  CHECK(hits == 1);

  server.stop();
  server_thread.join();
}

TEST_CASE("http adapter maps 4xx to permanent and 5xx to transient") {
  httplib::Server server;
  server.Post("/translate", [&](const httplib::Request& request, httplib::Response& response) {
    const auto body = nlohmann::json::parse(request.body);
    if (body["texts"][0] == "bad") {
      response.status = 400;
    } else {
      response.status = 503;
    }
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpBackend backend("127.0.0.1", port, "");
  const auto bad = backend.translate({req("bad")});
  CHECK(!bad[0].ok);
  CHECK(!bad[0].transient);
  const auto down = backend.translate({req("down")});
  CHECK(!down[0].ok);
  CHECK(down[0].transient);

  server.stop();
  server_thread.join();
}

TEST_CASE("translation record json round trip") {
  TranslationRecord rec;
  rec.request = req("Og det finnes kun en Sannhet.");
  rec.translation = "And there is only one truth.";
  rec.backend = "mock";
  rec.fetched_at = 12345;
  const nlohmann::json j = rec;
  const auto back = j.get<TranslationRecord>();
  CHECK(back.request == rec.request);
  CHECK(back.translation == rec.translation);
  CHECK(back.fetched_at == 12345);
}
