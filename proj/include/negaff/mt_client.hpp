#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace negaff {

struct TranslationRequest {
  std::string text;
  std::string source_lang;
  std::string target_lang;  // "en" throughout this pipeline
};

bool operator==(const TranslationRequest& a, const TranslationRequest& b);

struct TranslationRecord {
  TranslationRequest request;
  std::string translation;
  std::string backend;
  int64_t fetched_at = 0;  // epoch milliseconds from the run's clock
};

void to_json(nlohmann::json& j, const TranslationRequest& r);
void from_json(const nlohmann::json& j, TranslationRequest& r);
void to_json(nlohmann::json& j, const TranslationRecord& r);
void from_json(const nlohmann::json& j, TranslationRecord& r);

enum class FailureKind { none, permanent, transient };

struct TranslationResult {
  TranslationRequest request;
  std::optional<TranslationRecord> record;  // set iff failure == none
  FailureKind failure = FailureKind::none;
  std::string error;
};

// Injectable time source; tests drive a fake clock so rate-limit spacing
// and cached timestamps are fully deterministic.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual int64_t now_ms() = 0;
  virtual void sleep_ms(int64_t ms) = 0;
};

class SystemClock final : public Clock {
 public:
  int64_t now_ms() override;
  void sleep_ms(int64_t ms) override;
};

class FakeClock final : public Clock {
 public:
  explicit FakeClock(int64_t start_ms = 0) : now_(start_ms) {}
  int64_t now_ms() override { return now_; }
  void sleep_ms(int64_t ms) override { now_ += ms; }
  void advance(int64_t ms) { now_ += ms; }

 private:
  int64_t now_;
};

// Spaces acquisitions at least 1000/rps ms apart; rps <= 0 disables.
class RateLimiter {
 public:
  RateLimiter(double requests_per_second, Clock& clock);
  void acquire();

 private:
  double interval_ms_;
  Clock& clock_;
  int64_t next_allowed_ = 0;
};

// Per-item outcome of one backend call.
struct BackendItem {
  bool ok = false;
  std::string translation;
  bool transient = false;  // meaningful when !ok
  std::string error;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual std::vector<BackendItem> translate(const std::vector<TranslationRequest>& batch) = 0;
};

// Readable fixture key shared by the mock backend and its fixture files.
std::string fixture_key(const TranslationRequest& r);

// Offline backend over a JSONL fixture of {"key","translation"} entries.
// {"key","error":"permanent"} always fails; adding "fail_times": N with a
// translation makes the entry fail transiently N times, then succeed.
// Missing keys are permanent failures. Records call timestamps from the
// clock so tests can assert rate-limit spacing.
class MockBackend final : public Backend {
 public:
  MockBackend(const std::string& fixture_path, Clock& clock);

  std::string name() const override { return "mock"; }
  std::vector<BackendItem> translate(const std::vector<TranslationRequest>& batch) override;

  uint64_t calls() const { return static_cast<uint64_t>(call_times_ms_.size()); }
  const std::vector<int64_t>& call_times_ms() const { return call_times_ms_; }

 private:
  struct Entry {
    std::string translation;
    bool permanent_error = false;
    int fail_times = 0;
  };
  std::map<std::string, Entry> entries_;
  std::map<std::string, int> attempts_;
  std::vector<int64_t> call_times_ms_;
  Clock& clock_;
};

// Generic HTTP adapter: POST <endpoint>/translate with
// {"source_lang","target_lang","texts":[...]} expecting
// {"translations":[...]}. 4xx is permanent, 5xx and transport errors are
// transient. Provider-specific wire formats belong in adapters like this
// one, not in the pipeline.
class HttpBackend final : public Backend {
 public:
  HttpBackend(std::string host, int port, std::string api_key);

  std::string name() const override { return "http"; }
  std::vector<BackendItem> translate(const std::vector<TranslationRequest>& batch) override;

 private:
  std::string host_;
  int port_;
  std::string api_key_;
};

// Append-only on-disk cache: entries under <first 2 hash chars>/<hash>.json
// plus manifest.jsonl, so multi-million-sentence runs resume after a crash.
class TranslationCache {
 public:
  explicit TranslationCache(const std::string& directory);

  static std::string key_of(const TranslationRequest& r, const std::string& backend);

  std::optional<TranslationRecord> lookup(const TranslationRequest& r, const std::string& backend) const;
  void put(const TranslationRecord& record);

  size_t size() const { return index_.size(); }

 private:
  std::string dir_;
  std::map<std::string, std::string> index_;  // hash -> key
};

struct MtOptions {
  double requests_per_second = 0.0;  // 0 = unlimited
  size_t batch_size = 16;
  int max_retries = 3;
  int backoff_initial_ms = 100;  // doubles per retry
};

struct BatchOutcome {
  std::vector<TranslationResult> results;  // input order
  uint64_t cache_hits = 0;
  uint64_t backend_batches = 0;
};

// Cache-first batched translation with rate limiting and retry-with-backoff
// on transient failures. Output order always equals input order.
BatchOutcome translate_batch(const std::vector<TranslationRequest>& requests, Backend& backend,
                             TranslationCache* cache, const MtOptions& options, Clock& clock);

}  // namespace negaff
