#include "negaff/lexicon.hpp"

#include <fstream>
#include <sstream>

#include "negaff/error.hpp"
#include "negaff/hash.hpp"
#include "negaff/unicode.hpp"

namespace negaff {

using nlohmann::json;

namespace {

json affixes_to_json(const std::vector<AffixRule>& rules) {
  json arr = json::array();
  for (const auto& r : rules) arr.push_back(json{{"affix", r.affix}, {"min_stem", r.min_stem}});
  return arr;
}

std::vector<AffixRule> affixes_from_json(const json& arr) {
  std::vector<AffixRule> rules;
  for (const auto& e : arr) {
    AffixRule r;
    e.at("affix").get_to(r.affix);
    r.min_stem = e.value("min_stem", size_t{3});
    rules.push_back(std::move(r));
  }
  return rules;
}

std::vector<std::string> split_ws(const std::string& phrase) {
  std::istringstream in(phrase);
  std::vector<std::string> tokens;
  std::string t;
  while (in >> t) tokens.push_back(t);
  return tokens;
}

std::string join_ws(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

void to_json(json& j, const CueLexicon& lex) {
  json multi = json::array();
  for (const auto& seq : lex.multiword) multi.push_back(join_ws(seq));
  j = json{{"lang", lex.lang},
           {"single_tokens", lex.single_tokens},
           {"multiword", multi},
           {"lexicalized", lex.lexicalized},
           {"neg_prefixes", affixes_to_json(lex.neg_prefixes)},
           {"neg_suffixes", affixes_to_json(lex.neg_suffixes)},
           {"affix_whitelist", lex.affix_whitelist},
           {"affix_stem_vocabulary", lex.affix_stem_vocabulary}};
}

void from_json(const json& j, CueLexicon& lex) {
  j.at("lang").get_to(lex.lang);
  auto lower_set = [](const json& arr) {
    std::set<std::string> out;
    for (const auto& e : arr) out.insert(uni::lower(e.get<std::string>()));
    return out;
  };
  lex.single_tokens = lower_set(j.value("single_tokens", json::array()));
  lex.lexicalized = lower_set(j.value("lexicalized", json::array()));
  lex.affix_whitelist = lower_set(j.value("affix_whitelist", json::array()));
  lex.affix_stem_vocabulary = lower_set(j.value("affix_stem_vocabulary", json::array()));
  lex.multiword.clear();
  const json multiword = j.value("multiword", json::array());
  for (const auto& e : multiword) {
    lex.multiword.push_back(split_ws(uni::lower(e.get<std::string>())));
  }
  lex.neg_prefixes = affixes_from_json(j.value("neg_prefixes", json::array()));
  lex.neg_suffixes = affixes_from_json(j.value("neg_suffixes", json::array()));
  for (auto& r : lex.neg_prefixes) r.affix = uni::lower(r.affix);
  for (auto& r : lex.neg_suffixes) r.affix = uni::lower(r.affix);
}

void validate_lexicon(const CueLexicon& lex) {
  if (lex.lang.empty()) fail("lexicon has no lang");
  for (const auto& w : lex.single_tokens) {
    if (lex.lexicalized.count(w)) {
      fail("lexicon " + lex.lang + ": '" + w + "' is both single_token and lexicalized");
    }
  }
  // Multiword entries may share tokens with single_tokens ("no" inside
  // "no longer" or "by no means"): multiword matches first and occupies its
  // tokens, so behavior stays unambiguous. Lexicalized overlap is not
  // resolvable that way and is rejected.
  for (const auto& seq : lex.multiword) {
    if (seq.size() < 2) {
      fail("lexicon " + lex.lang + ": multiword entry '" + join_ws(seq) + "' has fewer than 2 tokens");
    }
    for (const auto& tok : seq) {
      if (lex.lexicalized.count(tok)) {
        fail("lexicon " + lex.lang + ": multiword token '" + tok + "' collides with a lexicalized cue");
      }
    }
  }
}

CueLexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open lexicon file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(path + ": " + e.what());
  }
  CueLexicon lex = j.get<CueLexicon>();
  validate_lexicon(lex);
  return lex;
}

std::string lexicon_fingerprint(const CueLexicon& lex) {
  json j = lex;
  return fnv1a64_hex(j.dump());
}

}  // namespace negaff
