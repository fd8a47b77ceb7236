#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "negaff/cue_detect.hpp"
#include "negaff/nli_derive.hpp"

namespace negaff {

// Pluggable affirmative-interpretation source; nullopt signals failure and
// the router falls back to passing the raw text through.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string name() const = 0;
  virtual std::optional<std::string> interpret(const std::string& text) = 0;
};

// Table-driven generator over a JSONL fixture of {"text","interpretation"}.
class LookupGenerator final : public Generator {
 public:
  explicit LookupGenerator(const std::string& fixture_path);

  std::string name() const override { return "lookup"; }
  std::optional<std::string> interpret(const std::string& text) override;

 private:
  std::map<std::string, std::string> table_;
};

// POST {"text": ...} -> {"interpretation": ...} against an external service.
class HttpGenerator final : public Generator {
 public:
  HttpGenerator(std::string host, int port);

  std::string name() const override { return "http"; }
  std::optional<std::string> interpret(const std::string& text) override;

 private:
  std::string host_;
  int port_;
};

// Deletes cue tokens (or strips the negation affix). Meaning-unsafe: the
// result is generally NOT semantically equivalent; useful only as a
// debugging baseline.
class CueDeletionGenerator final : public Generator {
 public:
  CueDeletionGenerator(const Detector& detector, std::string lang = "en");

  std::string name() const override { return "cue-deletion (meaning-unsafe)"; }
  std::optional<std::string> interpret(const std::string& text) override;

 private:
  const Detector& detector_;
  std::string lang_;
};

enum class Importance { important, unimportant };
std::string to_string(Importance i);

struct RoutedExample {
  std::string id;
  std::string text;
  bool has_negation = false;
  std::optional<std::string> interpretation;  // present iff negated and generated
  std::string combined;
  std::optional<Importance> importance;
};

bool operator==(const RoutedExample& a, const RoutedExample& b);
void to_json(nlohmann::json& j, const RoutedExample& e);
void from_json(const nlohmann::json& j, RoutedExample& e);

struct RouterOptions {
  std::string separator = "[SEP]";
  std::string lang = "en";
};

struct RouteStats {
  uint64_t total = 0;
  uint64_t negated = 0;
  uint64_t fallbacks = 0;                 // generator failures, passed through
  uint64_t negated_interpretations = 0;   // generator output itself has a cue
};

// Negation-gated routing: negated inputs get "<text> <sep> <interpretation>",
// everything else passes through. Generator outages never drop records.
std::vector<RoutedExample> route(const std::vector<std::pair<std::string, std::string>>& sentences,
                                 const Detector& detector, Generator& generator,
                                 const RouterOptions& options, RouteStats* stats = nullptr);

// TSV columns: id, text, has_negation, interpretation, combined.
uint64_t export_routed(const std::vector<RoutedExample>& examples, ExportFormat format,
                       const std::string& path);

// "id<TAB>important|unimportant" lines; duplicate ids keep the last label
// and bump the warning counter.
std::map<std::string, Importance> load_importance(const std::string& path,
                                                  uint64_t* duplicate_warnings = nullptr);

struct ImportanceSplit {
  std::vector<RoutedExample> important;
  std::vector<RoutedExample> unimportant;
  std::vector<RoutedExample> unannotated;
};

ImportanceSplit split_by_importance(const std::vector<RoutedExample>& examples,
                                    const std::map<std::string, Importance>& annotations);

}  // namespace negaff
