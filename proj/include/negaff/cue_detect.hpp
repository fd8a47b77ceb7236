#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "negaff/lexicon.hpp"
#include "negaff/tokenize.hpp"

namespace negaff {

enum class CueKind { single_token, affixal, lexicalized, multitoken };
enum class AffixSide { prefix, suffix };

std::string to_string(CueKind kind);
CueKind cue_kind_from_string(const std::string& s);

// One negation cue: either a run of whole tokens or an affix inside a token.
struct CueSpan {
  std::vector<size_t> token_indices;  // strictly increasing, non-empty
  std::string surface;
  CueKind kind = CueKind::single_token;
  std::optional<AffixSide> affix_side;  // set iff kind == affixal
  std::optional<std::string> affix;
};

bool operator==(const CueSpan& a, const CueSpan& b);

struct TaggedSentence {
  std::string sentence;
  std::string lang;
  std::vector<Token> tokens;
  std::vector<std::string> tags;  // BIO: "O" / "B-CUE" / "I-CUE", one per token
  std::vector<CueSpan> cues;
};

void to_json(nlohmann::json& j, const CueSpan& c);
void from_json(const nlohmann::json& j, CueSpan& c);
void to_json(nlohmann::json& j, const Token& t);
void from_json(const nlohmann::json& j, Token& t);
void to_json(nlohmann::json& j, const TaggedSentence& s);
void from_json(const nlohmann::json& j, TaggedSentence& s);

// No "I-CUE" without a preceding "B-CUE"/"I-CUE".
bool bio_valid(const std::vector<std::string>& tags);

struct RuleDetectorOptions {
  // *SEM-style data marks affix characters, which token-level BIO cannot
  // express, so affixal cues default to O tags and live only in `cues`.
  // Switching this tags the whole host token B-CUE instead.
  bool tag_affixal_tokens = false;
};

// Rule/lexicon cue detector. Match order: multiword (longest first), then
// single tokens, then lexicalized, then affixal; each token joins at most
// one cue.
TaggedSentence detect_rules(std::string_view sentence, std::string_view lang,
                            const CueLexicon& lexicon, const RuleDetectorOptions& options = {});

// Affix test against a lexicon's prefix/suffix rules (word already
// lowercased). Shared by the rule detector and the CRF feature templates.
std::optional<std::pair<AffixSide, std::string>> find_negation_affix(const std::string& lowered,
                                                                     const CueLexicon& lexicon);

// Derives cue spans from a BIO tag sequence; single-token runs are typed
// lexicalized when the lexicon says so, single_token otherwise.
std::vector<CueSpan> spans_from_tags(const std::vector<Token>& tokens,
                                     const std::vector<std::string>& tags,
                                     const CueLexicon* lexicon);

// Detector interface shared by the rule and CRF paths.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual TaggedSentence tag(std::string_view sentence, std::string_view lang) const = 0;
  virtual std::vector<std::string> supported_langs() const = 0;
};

class RuleDetector final : public Detector {
 public:
  explicit RuleDetector(std::map<std::string, CueLexicon> lexicons,
                        RuleDetectorOptions options = {});

  TaggedSentence tag(std::string_view sentence, std::string_view lang) const override;
  std::vector<std::string> supported_langs() const override;

  const CueLexicon& lexicon(std::string_view lang) const;

 private:
  std::map<std::string, CueLexicon> lexicons_;
  RuleDetectorOptions options_;
};

bool has_negation(const Detector& detector, std::string_view sentence, std::string_view lang);

}  // namespace negaff
