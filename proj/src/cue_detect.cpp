#include "negaff/cue_detect.hpp"

#include <algorithm>

#include "negaff/error.hpp"
#include "negaff/unicode.hpp"

namespace negaff {

using nlohmann::json;

std::string to_string(CueKind kind) {
  switch (kind) {
    case CueKind::single_token: return "single_token";
    case CueKind::affixal: return "affixal";
    case CueKind::lexicalized: return "lexicalized";
    case CueKind::multitoken: return "multitoken";
  }
  return "single_token";
}

CueKind cue_kind_from_string(const std::string& s) {
  if (s == "single_token") return CueKind::single_token;
  if (s == "affixal") return CueKind::affixal;
  if (s == "lexicalized") return CueKind::lexicalized;
  if (s == "multitoken") return CueKind::multitoken;
  fail("unknown cue kind: " + s);
}

bool operator==(const CueSpan& a, const CueSpan& b) {
  return a.token_indices == b.token_indices && a.surface == b.surface && a.kind == b.kind &&
         a.affix_side == b.affix_side && a.affix == b.affix;
}

void to_json(json& j, const CueSpan& c) {
  j = json{{"token_indices", c.token_indices},
           {"surface", c.surface},
           {"kind", to_string(c.kind)}};
  if (c.affix_side) j["affix_side"] = (*c.affix_side == AffixSide::prefix) ? "prefix" : "suffix";
  if (c.affix) j["affix"] = *c.affix;
}

void from_json(const json& j, CueSpan& c) {
  j.at("token_indices").get_to(c.token_indices);
  j.at("surface").get_to(c.surface);
  c.kind = cue_kind_from_string(j.at("kind").get<std::string>());
  c.affix_side.reset();
  c.affix.reset();
  if (j.contains("affix_side")) {
    c.affix_side = (j["affix_side"] == "prefix") ? AffixSide::prefix : AffixSide::suffix;
  }
  if (j.contains("affix")) c.affix = j["affix"].get<std::string>();
}

void to_json(json& j, const Token& t) {
  j = json{{"text", t.text}, {"start", t.start}, {"end", t.end}, {"index", t.index}};
}

void from_json(const json& j, Token& t) {
  j.at("text").get_to(t.text);
  j.at("start").get_to(t.start);
  j.at("end").get_to(t.end);
  j.at("index").get_to(t.index);
}

void to_json(json& j, const TaggedSentence& s) {
  j = json{{"sentence", s.sentence},
           {"lang", s.lang},
           {"tokens", s.tokens},
           {"tags", s.tags},
           {"cues", s.cues}};
}

void from_json(const json& j, TaggedSentence& s) {
  j.at("sentence").get_to(s.sentence);
  j.at("lang").get_to(s.lang);
  j.at("tokens").get_to(s.tokens);
  j.at("tags").get_to(s.tags);
  j.at("cues").get_to(s.cues);
}

bool bio_valid(const std::vector<std::string>& tags) {
  bool in_span = false;
  for (const auto& tag : tags) {
    if (tag == "B-CUE") {
      in_span = true;
    } else if (tag == "I-CUE") {
      if (!in_span) return false;
    } else if (tag == "O") {
      in_span = false;
    } else {
      return false;
    }
  }
  return true;
}

namespace {

std::string join_tokens(const std::vector<Token>& tokens, const std::vector<size_t>& indices) {
  std::string out;
  for (size_t i = 0; i < indices.size(); ++i) {
    if (i) out += ' ';
    out += tokens[indices[i]].text;
  }
  return out;
}

}  // namespace

std::optional<std::pair<AffixSide, std::string>> find_negation_affix(const std::string& lowered,
                                                                     const CueLexicon& lex) {
  if (lex.affix_whitelist.count(lowered)) return std::nullopt;
  auto check = [&](const std::vector<AffixRule>& rules,
                   AffixSide side) -> std::optional<std::pair<AffixSide, std::string>> {
    for (const auto& rule : rules) {
      if (lowered.size() <= rule.affix.size()) continue;
      std::string stem;
      if (side == AffixSide::prefix) {
        if (!lowered.starts_with(rule.affix)) continue;
        stem = lowered.substr(rule.affix.size());
      } else {
        if (!lowered.ends_with(rule.affix)) continue;
        stem = lowered.substr(0, lowered.size() - rule.affix.size());
      }
      if (uni::length(stem) < rule.min_stem) continue;
      if (!lex.affix_stem_vocabulary.empty() && !lex.affix_stem_vocabulary.count(stem)) continue;
      return std::make_pair(side, rule.affix);
    }
    return std::nullopt;
  };
  if (auto hit = check(lex.neg_prefixes, AffixSide::prefix)) return hit;
  return check(lex.neg_suffixes, AffixSide::suffix);
}

TaggedSentence detect_rules(std::string_view sentence, std::string_view lang,
                            const CueLexicon& lexicon, const RuleDetectorOptions& options) {
  if (lexicon.lang != lang) {
    fail("lexicon language '" + lexicon.lang + "' does not match requested '" + std::string(lang) + "'");
  }
  TaggedSentence out;
  out.sentence = std::string(sentence);
  out.lang = std::string(lang);
  out.tokens = tokenize(sentence, lang);

  const size_t n = out.tokens.size();
  std::vector<std::string> low(n);
  for (size_t i = 0; i < n; ++i) low[i] = uni::lower(out.tokens[i].text);

  std::vector<bool> occupied(n, false);
  std::vector<CueSpan> spans;

  // Multiword cues first, longest entries first so "not at all" beats any
  // shorter overlapping phrase.
  std::vector<const std::vector<std::string>*> multi;
  for (const auto& seq : lexicon.multiword) multi.push_back(&seq);
  std::sort(multi.begin(), multi.end(), [](const auto* a, const auto* b) {
    if (a->size() != b->size()) return a->size() > b->size();
    return *a < *b;
  });
  for (size_t pos = 0; pos < n; ++pos) {
    for (const auto* seq : multi) {
      const size_t len = seq->size();
      if (pos + len > n) continue;
      bool match = true;
      for (size_t k = 0; k < len && match; ++k) {
        match = !occupied[pos + k] && low[pos + k] == (*seq)[k];
      }
      if (!match) continue;
      CueSpan span;
      for (size_t k = 0; k < len; ++k) {
        span.token_indices.push_back(pos + k);
        occupied[pos + k] = true;
      }
      span.kind = CueKind::multitoken;
      span.surface = join_tokens(out.tokens, span.token_indices);
      spans.push_back(std::move(span));
      break;
    }
  }

  auto match_set = [&](const std::set<std::string>& words, CueKind kind) {
    for (size_t i = 0; i < n; ++i) {
      if (occupied[i] || !words.count(low[i])) continue;
      occupied[i] = true;
      CueSpan span;
      span.token_indices = {i};
      span.surface = out.tokens[i].text;
      span.kind = kind;
      spans.push_back(std::move(span));
    }
  };
  match_set(lexicon.single_tokens, CueKind::single_token);
  match_set(lexicon.lexicalized, CueKind::lexicalized);

  for (size_t i = 0; i < n; ++i) {
    if (occupied[i]) continue;
    if (auto hit = find_negation_affix(low[i], lexicon)) {
      occupied[i] = true;
      CueSpan span;
      span.token_indices = {i};
      span.surface = out.tokens[i].text;
      span.kind = CueKind::affixal;
      span.affix_side = hit->first;
      span.affix = hit->second;
      spans.push_back(std::move(span));
    }
  }

  std::sort(spans.begin(), spans.end(),
            [](const CueSpan& a, const CueSpan& b) { return a.token_indices[0] < b.token_indices[0]; });

  out.tags.assign(n, "O");
  for (const auto& span : spans) {
    if (span.kind == CueKind::affixal && !options.tag_affixal_tokens) continue;
    for (size_t k = 0; k < span.token_indices.size(); ++k) {
      out.tags[span.token_indices[k]] = (k == 0) ? "B-CUE" : "I-CUE";
    }
  }
  out.cues = std::move(spans);
  return out;
}

std::vector<CueSpan> spans_from_tags(const std::vector<Token>& tokens,
                                     const std::vector<std::string>& tags,
                                     const CueLexicon* lexicon) {
  std::vector<CueSpan> spans;
  for (size_t i = 0; i < tags.size();) {
    if (tags[i] != "B-CUE") {
      ++i;
      continue;
    }
    CueSpan span;
    span.token_indices.push_back(i);
    size_t j = i + 1;
    while (j < tags.size() && tags[j] == "I-CUE") span.token_indices.push_back(j++);
    span.surface = join_tokens(tokens, span.token_indices);
    if (span.token_indices.size() > 1) {
      span.kind = CueKind::multitoken;
    } else {
      const std::string low = uni::lower(tokens[i].text);
      span.kind = (lexicon && lexicon->lexicalized.count(low)) ? CueKind::lexicalized
                                                               : CueKind::single_token;
    }
    spans.push_back(std::move(span));
    i = j;
  }
  return spans;
}

RuleDetector::RuleDetector(std::map<std::string, CueLexicon> lexicons, RuleDetectorOptions options)
    : lexicons_(std::move(lexicons)), options_(options) {
  for (const auto& [lang, lex] : lexicons_) {
    if (lex.lang != lang) fail("lexicon registered under '" + lang + "' declares lang '" + lex.lang + "'");
  }
}

const CueLexicon& RuleDetector::lexicon(std::string_view lang) const {
  auto it = lexicons_.find(std::string(lang));
  if (it == lexicons_.end()) {
    std::string supported;
    for (const auto& [l, _] : lexicons_) {
      if (!supported.empty()) supported += ", ";
      supported += l;
    }
    fail("unsupported language '" + std::string(lang) + "' (supported: " + supported + ")");
  }
  return it->second;
}

TaggedSentence RuleDetector::tag(std::string_view sentence, std::string_view lang) const {
  return detect_rules(sentence, lang, lexicon(lang), options_);
}

std::vector<std::string> RuleDetector::supported_langs() const {
  std::vector<std::string> langs;
  for (const auto& [lang, _] : lexicons_) langs.push_back(lang);
  return langs;
}

bool has_negation(const Detector& detector, std::string_view sentence, std::string_view lang) {
  return !detector.tag(sentence, lang).cues.empty();
}

}  // namespace negaff
