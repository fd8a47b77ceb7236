#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace negaff {

struct AffixRule {
  std::string affix;     // lowercased, no hyphen
  size_t min_stem = 3;   // minimum stem length in codepoints
};

// Per-language negation cue inventory, loaded from a JSON data file.
// All entries are stored lowercased; matching is case-insensitive.
struct CueLexicon {
  std::string lang;
  std::set<std::string> single_tokens;
  std::vector<std::vector<std::string>> multiword;  // token sequences, length >= 2
  std::set<std::string> lexicalized;
  std::vector<AffixRule> neg_prefixes;
  std::vector<AffixRule> neg_suffixes;
  std::set<std::string> affix_whitelist;         // affix-like words that are not negation
  std::set<std::string> affix_stem_vocabulary;   // when non-empty, stems must be attested here
};

void to_json(nlohmann::json& j, const CueLexicon& lex);
void from_json(const nlohmann::json& j, CueLexicon& lex);

// Rejects ambiguous overlaps: single_tokens vs lexicalized, multiword
// non-first tokens vs either set, and multiword entries shorter than 2
// tokens. A multiword entry's first token may legitimately also be a
// single-token cue ("no" in "no longer").
void validate_lexicon(const CueLexicon& lex);

// Loads and validates. Throws Error on unreadable file, bad JSON, or
// validation failure.
CueLexicon load_lexicon(const std::string& path);

// Content fingerprint over the canonical JSON form; stamped into trained
// CRF models.
std::string lexicon_fingerprint(const CueLexicon& lex);

}  // namespace negaff
