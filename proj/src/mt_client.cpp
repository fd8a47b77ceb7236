#include "negaff/mt_client.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "negaff/corpus_io.hpp"
#include "negaff/error.hpp"
#include "negaff/hash.hpp"

namespace negaff {

namespace fs = std::filesystem;
using nlohmann::json;

bool operator==(const TranslationRequest& a, const TranslationRequest& b) {
  return a.text == b.text && a.source_lang == b.source_lang && a.target_lang == b.target_lang;
}

void to_json(json& j, const TranslationRequest& r) {
  j = json{{"text", r.text}, {"source_lang", r.source_lang}, {"target_lang", r.target_lang}};
}

void from_json(const json& j, TranslationRequest& r) {
  j.at("text").get_to(r.text);
  j.at("source_lang").get_to(r.source_lang);
  j.at("target_lang").get_to(r.target_lang);
}

void to_json(json& j, const TranslationRecord& r) {
  j = json{{"request", r.request},
           {"translation", r.translation},
           {"backend", r.backend},
           {"fetched_at", r.fetched_at}};
}

void from_json(const json& j, TranslationRecord& r) {
  j.at("request").get_to(r.request);
  j.at("translation").get_to(r.translation);
  j.at("backend").get_to(r.backend);
  j.at("fetched_at").get_to(r.fetched_at);
}

int64_t SystemClock::now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void SystemClock::sleep_ms(int64_t ms) {
  std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

RateLimiter::RateLimiter(double requests_per_second, Clock& clock)
    : interval_ms_(requests_per_second > 0.0 ? 1000.0 / requests_per_second : 0.0), clock_(clock) {}

void RateLimiter::acquire() {
  if (interval_ms_ <= 0.0) return;
  int64_t now = clock_.now_ms();
  if (now < next_allowed_) {
    clock_.sleep_ms(next_allowed_ - now);
    now = next_allowed_;
  }
  next_allowed_ = now + static_cast<int64_t>(interval_ms_);
}

std::string fixture_key(const TranslationRequest& r) {
  return r.source_lang + "|" + r.target_lang + "|" + r.text;
}

MockBackend::MockBackend(const std::string& fixture_path, Clock& clock) : clock_(clock) {
  JsonlLineReader reader(fixture_path);
  while (auto j = reader.next()) {
    Entry e;
    const std::string key = j->at("key").get<std::string>();
    e.translation = j->value("translation", "");
    e.permanent_error = (j->value("error", "") == "permanent");
    e.fail_times = j->value("fail_times", 0);
    if (j->value("error", "") == "transient" && e.fail_times == 0) {
      e.fail_times = 1 << 20;  // fails every attempt
    }
    entries_[key] = std::move(e);
  }
}

std::vector<BackendItem> MockBackend::translate(const std::vector<TranslationRequest>& batch) {
  call_times_ms_.push_back(clock_.now_ms());
  std::vector<BackendItem> out(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const std::string key = fixture_key(batch[i]);
    auto it = entries_.find(key);
    BackendItem& item = out[i];
    if (it == entries_.end()) {
      item.ok = false;
      item.transient = false;
      item.error = "no fixture entry for key: " + key;
      continue;
    }
    const Entry& e = it->second;
    if (e.permanent_error) {
      item.ok = false;
      item.transient = false;
      item.error = "scripted permanent failure";
      continue;
    }
    if (attempts_[key]++ < e.fail_times) {
      item.ok = false;
      item.transient = true;
      item.error = "scripted transient failure";
      continue;
    }
    item.ok = true;
    item.translation = e.translation;
  }
  return out;
}

HttpBackend::HttpBackend(std::string host, int port, std::string api_key)
    : host_(std::move(host)), port_(port), api_key_(std::move(api_key)) {}

std::vector<BackendItem> HttpBackend::translate(const std::vector<TranslationRequest>& batch) {
  std::vector<BackendItem> out(batch.size());
  if (batch.empty()) return out;

  json body;
  body["source_lang"] = batch.front().source_lang;
  body["target_lang"] = batch.front().target_lang;
  json texts = json::array();
  for (const auto& r : batch) texts.push_back(r.text);
  body["texts"] = texts;

  httplib::Client client(host_, port_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post("/translate", headers, body.dump(), "application/json");

  auto fill_all = [&](bool transient, const std::string& error) {
    for (auto& item : out) {
      item.ok = false;
      item.transient = transient;
      item.error = error;
    }
  };
  if (!res) {
    fill_all(true, "transport error contacting " + host_);
    return out;
  }
  if (res->status >= 500) {
    fill_all(true, "backend returned " + std::to_string(res->status));
    return out;
  }
  if (res->status >= 400) {
    fill_all(false, "backend returned " + std::to_string(res->status));
    return out;
  }
  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("translations") ||
      reply["translations"].size() != batch.size()) {
    fill_all(false, "malformed backend reply");
    return out;
  }
  for (size_t i = 0; i < batch.size(); ++i) {
    out[i].ok = true;
    out[i].translation = reply["translations"][i].get<std::string>();
  }
  return out;
}

TranslationCache::TranslationCache(const std::string& directory) : dir_(directory) {
  fs::create_directories(dir_);
  const fs::path manifest = fs::path(dir_) / "manifest.jsonl";
  if (!fs::exists(manifest)) return;
  JsonlLineReader reader(manifest.string());
  while (auto j = reader.next()) {
    index_[j->at("hash").get<std::string>()] = j->at("key").get<std::string>();
  }
}

std::string TranslationCache::key_of(const TranslationRequest& r, const std::string& backend) {
  return backend + "\n" + r.source_lang + "\n" + r.target_lang + "\n" + r.text;
}

std::optional<TranslationRecord> TranslationCache::lookup(const TranslationRequest& r,
                                                          const std::string& backend) const {
  const std::string hash = sha256_hex(key_of(r, backend));
  if (!index_.count(hash)) return std::nullopt;
  const fs::path entry = fs::path(dir_) / hash.substr(0, 2) / (hash + ".json");
  std::ifstream in(entry);
  if (!in) return std::nullopt;  // manifest ahead of entries after a crash
  json j;
  try {
    in >> j;
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
  return j.at("record").get<TranslationRecord>();
}

void TranslationCache::put(const TranslationRecord& record) {
  const std::string key = key_of(record.request, record.backend);
  const std::string hash = sha256_hex(key);
  if (index_.count(hash)) return;
  const fs::path subdir = fs::path(dir_) / hash.substr(0, 2);
  fs::create_directories(subdir);
  {
    std::ofstream out(subdir / (hash + ".json"), std::ios::binary);
    if (!out) fail("cannot write cache entry under " + dir_);
    out << json{{"key", key}, {"record", record}}.dump() << '\n';
  }
  std::ofstream manifest(fs::path(dir_) / "manifest.jsonl", std::ios::binary | std::ios::app);
  if (!manifest) fail("cannot append cache manifest under " + dir_);
  manifest << json{{"hash", hash}, {"key", key}}.dump() << '\n';
  index_[hash] = key;
}

BatchOutcome translate_batch(const std::vector<TranslationRequest>& requests, Backend& backend,
                             TranslationCache* cache, const MtOptions& options, Clock& clock) {
  BatchOutcome outcome;
  outcome.results.resize(requests.size());

  std::vector<size_t> misses;
  for (size_t i = 0; i < requests.size(); ++i) {
    TranslationResult& r = outcome.results[i];
    r.request = requests[i];
    if (requests[i].text.empty() || requests[i].source_lang == requests[i].target_lang) {
      r.failure = FailureKind::permanent;
      r.error = "invalid request (empty text or identical languages)";
      continue;
    }
    if (cache) {
      if (auto hit = cache->lookup(requests[i], backend.name())) {
        r.record = std::move(*hit);
        ++outcome.cache_hits;
        continue;
      }
    }
    misses.push_back(i);
  }

  RateLimiter limiter(options.requests_per_second, clock);
  const size_t batch_size = std::max<size_t>(1, options.batch_size);

  for (size_t start = 0; start < misses.size(); start += batch_size) {
    const size_t stop = std::min(misses.size(), start + batch_size);
    std::vector<size_t> pending(misses.begin() + static_cast<ptrdiff_t>(start),
                                misses.begin() + static_cast<ptrdiff_t>(stop));
    int64_t backoff = options.backoff_initial_ms;

    for (int attempt = 0; attempt <= options.max_retries && !pending.empty(); ++attempt) {
      if (attempt > 0) {
        clock.sleep_ms(backoff);
        backoff *= 2;
      }
      std::vector<TranslationRequest> chunk;
      chunk.reserve(pending.size());
      for (size_t idx : pending) chunk.push_back(requests[idx]);

      limiter.acquire();
      const auto items = backend.translate(chunk);
      ++outcome.backend_batches;
      if (items.size() != chunk.size()) fail("backend returned a mismatched batch size");

      std::vector<size_t> retry;
      for (size_t k = 0; k < pending.size(); ++k) {
        TranslationResult& r = outcome.results[pending[k]];
        const BackendItem& item = items[k];
        if (item.ok) {
          TranslationRecord rec;
          rec.request = r.request;
          rec.translation = item.translation;
          rec.backend = backend.name();
          rec.fetched_at = clock.now_ms();
          if (rec.translation.empty()) {
            r.failure = FailureKind::permanent;
            r.error = "backend returned an empty translation";
            continue;
          }
          if (cache) cache->put(rec);
          r.record = std::move(rec);
          r.failure = FailureKind::none;
        } else if (item.transient) {
          r.failure = FailureKind::transient;
          r.error = item.error;
          retry.push_back(pending[k]);
        } else {
          r.failure = FailureKind::permanent;
          r.error = item.error;
        }
      }
      pending = std::move(retry);
    }
  }
  return outcome;
}

}  // namespace negaff
