#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "negaff/corpus_io.hpp"
#include "negaff/cue_detect.hpp"
#include "negaff/mt_client.hpp"

namespace negaff {

enum class Direction { original_negated, backtranslation_negated };
std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

enum class NegationType { single_token, affixal, lexicalized, multitoken, multiple };
std::string to_string(NegationType t);
NegationType negation_type_from_string(const std::string& s);

// A negated English sentence with its affirmative interpretation. One side
// is the original bitext English sentence, the other its backtranslation.
struct AfinPair {
  std::string id;
  std::string negated;
  std::string affirmative;
  Direction direction = Direction::original_negated;
  std::vector<CueSpan> cues;  // cues found in `negated`
  NegationType negation_type = NegationType::single_token;
  std::string source_pair;
  std::string corpus;
};

bool operator==(const AfinPair& a, const AfinPair& b);
void to_json(nlohmann::json& j, const AfinPair& p);
void from_json(const nlohmann::json& j, AfinPair& p);

NegationType classify_negation_type(const std::vector<CueSpan>& cues);

// Every dropped record lands in exactly one bucket, so per corpus
// ingested == emitted + sum(discards).
enum class DiscardReason {
  both_negated,
  neither_negated,
  target_too_long,
  backtranslation_parity,
  translation_failed
};
std::string to_string(DiscardReason r);

struct StageCounts {
  uint64_t ingested = 0;
  uint64_t emitted = 0;
  std::map<std::string, uint64_t> discards;

  uint64_t discarded_total() const;
};

struct PipelineOptions {
  size_t max_target_tokens = 40;  // strict "longer than" rule
};

struct BuildResult {
  std::map<std::string, StageCounts> counts;      // per corpus
  std::map<std::string, CorpusStats> cue_stats;   // both/either/neither tallies
  uint64_t emitted = 0;
};

using PairSource = std::function<std::optional<SentencePair>()>;
using PairSink = std::function<void(const AfinPair&)>;

// Streaming driver: either-negated filter, target length filter,
// backtranslation, then the parity (XOR) check. Pairs whose source and
// backtranslation are both negated or both affirmative are discarded.
// Memory is bounded by the translation batch size.
BuildResult build_pairs(const PairSource& source, const Detector& detector, Backend& backend,
                        TranslationCache* cache, const MtOptions& mt, Clock& clock,
                        const PipelineOptions& options, const PairSink& sink);

// Single-stage helpers (the driver is their composition); exposed for tests
// and for the `detect`-style subcommands.

// Keeps pairs with exactly one negated side; tallies both/either/neither.
std::vector<SentencePair> filter_either_negated(const std::vector<SentencePair>& pairs,
                                                const Detector& detector,
                                                std::map<std::string, CorpusStats>& stats);

std::vector<SentencePair> filter_length(const std::vector<SentencePair>& pairs, size_t max_tokens,
                                        uint64_t* dropped = nullptr);

// XOR assembly from already-fetched translations (aligned by index with
// `pairs`); nullopt marks a failed translation.
std::vector<AfinPair> assemble_pairs(const std::vector<SentencePair>& pairs,
                                     const std::vector<std::optional<std::string>>& translations,
                                     const Detector& detector,
                                     std::map<std::string, StageCounts>& counts);

// Corpus analytics: per-corpus counts, negation-type and direction
// distributions, plus an "all" aggregate row.
struct ReportRow {
  std::string corpus;
  uint64_t pairs = 0;
  uint64_t ingested = 0;  // 0 when unknown
  double yield_pct = 0.0;
  std::map<std::string, uint64_t> by_type;
  std::map<std::string, uint64_t> by_direction;
};

struct Report {
  std::vector<ReportRow> rows;  // per corpus, sorted by label; last row is "all"
};

// Streaming aggregation; corpus_report is its one-shot form.
class ReportBuilder {
 public:
  void add(const AfinPair& pair);
  Report build(const std::map<std::string, uint64_t>& ingested_by_corpus = {}) const;

 private:
  std::map<std::string, ReportRow> rows_;
};

Report corpus_report(const std::vector<AfinPair>& pairs,
                     const std::map<std::string, uint64_t>& ingested_by_corpus = {});

nlohmann::json report_json(const Report& report);
std::string report_table(const Report& report);

}  // namespace negaff
