#include "negaff/pair_pipeline.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "negaff/error.hpp"
#include "negaff/tokenize.hpp"

namespace negaff {

using nlohmann::json;

std::string to_string(Direction d) {
  return d == Direction::original_negated ? "original_negated" : "backtranslation_negated";
}

Direction direction_from_string(const std::string& s) {
  if (s == "original_negated") return Direction::original_negated;
  if (s == "backtranslation_negated") return Direction::backtranslation_negated;
  fail("unknown direction: " + s);
}

std::string to_string(NegationType t) {
  switch (t) {
    case NegationType::single_token: return "single_token";
    case NegationType::affixal: return "affixal";
    case NegationType::lexicalized: return "lexicalized";
    case NegationType::multitoken: return "multitoken";
    case NegationType::multiple: return "multiple";
  }
  return "single_token";
}

NegationType negation_type_from_string(const std::string& s) {
  if (s == "single_token") return NegationType::single_token;
  if (s == "affixal") return NegationType::affixal;
  if (s == "lexicalized") return NegationType::lexicalized;
  if (s == "multitoken") return NegationType::multitoken;
  if (s == "multiple") return NegationType::multiple;
  fail("unknown negation type: " + s);
}

bool operator==(const AfinPair& a, const AfinPair& b) {
  return a.id == b.id && a.negated == b.negated && a.affirmative == b.affirmative &&
         a.direction == b.direction && a.cues == b.cues && a.negation_type == b.negation_type &&
         a.source_pair == b.source_pair && a.corpus == b.corpus;
}

void to_json(json& j, const AfinPair& p) {
  j = json{{"id", p.id},
           {"negated", p.negated},
           {"affirmative", p.affirmative},
           {"direction", to_string(p.direction)},
           {"cues", p.cues},
           {"negation_type", to_string(p.negation_type)},
           {"source_pair", p.source_pair},
           {"corpus", p.corpus}};
}

void from_json(const json& j, AfinPair& p) {
  j.at("id").get_to(p.id);
  j.at("negated").get_to(p.negated);
  j.at("affirmative").get_to(p.affirmative);
  p.direction = direction_from_string(j.at("direction").get<std::string>());
  j.at("cues").get_to(p.cues);
  p.negation_type = negation_type_from_string(j.at("negation_type").get<std::string>());
  j.at("source_pair").get_to(p.source_pair);
  j.at("corpus").get_to(p.corpus);
}

NegationType classify_negation_type(const std::vector<CueSpan>& cues) {
  if (cues.empty()) fail("classify_negation_type: pair has no cues");
  if (cues.size() >= 2) return NegationType::multiple;
  switch (cues.front().kind) {
    case CueKind::single_token: return NegationType::single_token;
    case CueKind::affixal: return NegationType::affixal;
    case CueKind::lexicalized: return NegationType::lexicalized;
    case CueKind::multitoken: return NegationType::multitoken;
  }
  return NegationType::single_token;
}

std::string to_string(DiscardReason r) {
  switch (r) {
    case DiscardReason::both_negated: return "both_negated";
    case DiscardReason::neither_negated: return "neither_negated";
    case DiscardReason::target_too_long: return "target_too_long";
    case DiscardReason::backtranslation_parity: return "backtranslation_parity";
    case DiscardReason::translation_failed: return "translation_failed";
  }
  return "unknown";
}

uint64_t StageCounts::discarded_total() const {
  uint64_t n = 0;
  for (const auto& [_, c] : discards) n += c;
  return n;
}

namespace {

// Builds the AfinPair for a source/backtranslation pair when exactly one
// side is negated; nullopt means parity (discard).
std::optional<AfinPair> make_afin(const SentencePair& pair, const std::string& backtranslation,
                                  const Detector& detector) {
  const TaggedSentence src = detector.tag(pair.source_text, pair.source_lang);
  const TaggedSentence bt = detector.tag(backtranslation, "en");
  const bool neg_src = !src.cues.empty();
  const bool neg_bt = !bt.cues.empty();
  if (neg_src == neg_bt) return std::nullopt;

  AfinPair out;
  out.id = "afin:" + pair.id;
  out.source_pair = pair.id;
  out.corpus = pair.corpus;
  if (neg_src) {
    out.direction = Direction::original_negated;
    out.negated = pair.source_text;
    out.affirmative = backtranslation;
    out.cues = src.cues;
  } else {
    out.direction = Direction::backtranslation_negated;
    out.negated = backtranslation;
    out.affirmative = pair.source_text;
    out.cues = bt.cues;
  }
  out.negation_type = classify_negation_type(out.cues);
  return out;
}

}  // namespace

BuildResult build_pairs(const PairSource& source, const Detector& detector, Backend& backend,
                        TranslationCache* cache, const MtOptions& mt, Clock& clock,
                        const PipelineOptions& options, const PairSink& sink) {
  BuildResult result;
  const size_t batch_size = std::max<size_t>(1, mt.batch_size);
  std::vector<SentencePair> buffer;

  auto discard = [&](const SentencePair& p, DiscardReason reason) {
    result.counts[p.corpus].discards[to_string(reason)] += 1;
  };

  auto flush = [&] {
    if (buffer.empty()) return;
    std::vector<TranslationRequest> requests;
    requests.reserve(buffer.size());
    for (const auto& p : buffer) {
      requests.push_back(TranslationRequest{p.target_text, p.target_lang, "en"});
    }
    const BatchOutcome batch = translate_batch(requests, backend, cache, mt, clock);
    for (size_t i = 0; i < buffer.size(); ++i) {
      const SentencePair& p = buffer[i];
      if (!batch.results[i].record) {
        discard(p, DiscardReason::translation_failed);
        continue;
      }
      if (auto afin = make_afin(p, batch.results[i].record->translation, detector)) {
        result.counts[p.corpus].emitted += 1;
        result.cue_stats[p.corpus].yielded_pairs += 1;
        result.emitted += 1;
        sink(*afin);
      } else {
        discard(p, DiscardReason::backtranslation_parity);
      }
    }
    buffer.clear();
  };

  while (auto pair = source()) {
    const SentencePair& p = *pair;
    result.counts[p.corpus].ingested += 1;
    CorpusStats& cs = result.cue_stats[p.corpus];
    cs.corpus = p.corpus;
    cs.total_pairs += 1;

    const bool neg_src = has_negation(detector, p.source_text, p.source_lang);
    const bool neg_tgt = has_negation(detector, p.target_text, p.target_lang);
    if (neg_src && neg_tgt) {
      cs.neg_both += 1;
      discard(p, DiscardReason::both_negated);
      continue;
    }
    if (!neg_src && !neg_tgt) {
      cs.neg_neither += 1;
      discard(p, DiscardReason::neither_negated);
      continue;
    }
    cs.neg_either += 1;

    if (token_count(p.target_text, p.target_lang) > options.max_target_tokens) {
      discard(p, DiscardReason::target_too_long);
      continue;
    }
    buffer.push_back(p);
    if (buffer.size() >= batch_size) flush();
  }
  flush();
  return result;
}

std::vector<SentencePair> filter_either_negated(const std::vector<SentencePair>& pairs,
                                                const Detector& detector,
                                                std::map<std::string, CorpusStats>& stats) {
  std::vector<SentencePair> kept;
  for (const auto& p : pairs) {
    CorpusStats& cs = stats[p.corpus];
    cs.corpus = p.corpus;
    cs.total_pairs += 1;
    const bool neg_src = has_negation(detector, p.source_text, p.source_lang);
    const bool neg_tgt = has_negation(detector, p.target_text, p.target_lang);
    if (neg_src && neg_tgt) {
      cs.neg_both += 1;
    } else if (neg_src || neg_tgt) {
      cs.neg_either += 1;
      kept.push_back(p);
    } else {
      cs.neg_neither += 1;
    }
  }
  return kept;
}

std::vector<SentencePair> filter_length(const std::vector<SentencePair>& pairs, size_t max_tokens,
                                        uint64_t* dropped) {
  std::vector<SentencePair> kept;
  for (const auto& p : pairs) {
    if (token_count(p.target_text, p.target_lang) > max_tokens) {
      if (dropped) ++*dropped;
    } else {
      kept.push_back(p);
    }
  }
  return kept;
}

std::vector<AfinPair> assemble_pairs(const std::vector<SentencePair>& pairs,
                                     const std::vector<std::optional<std::string>>& translations,
                                     const Detector& detector,
                                     std::map<std::string, StageCounts>& counts) {
  if (pairs.size() != translations.size()) fail("assemble_pairs: translation alignment mismatch");
  std::vector<AfinPair> out;
  for (size_t i = 0; i < pairs.size(); ++i) {
    StageCounts& c = counts[pairs[i].corpus];
    c.ingested += 1;
    if (!translations[i]) {
      c.discards[to_string(DiscardReason::translation_failed)] += 1;
      continue;
    }
    if (auto afin = make_afin(pairs[i], *translations[i], detector)) {
      c.emitted += 1;
      out.push_back(std::move(*afin));
    } else {
      c.discards[to_string(DiscardReason::backtranslation_parity)] += 1;
    }
  }
  return out;
}

void ReportBuilder::add(const AfinPair& pair) {
  ReportRow& row = rows_[pair.corpus];
  row.corpus = pair.corpus;
  row.pairs += 1;
  row.by_type[to_string(pair.negation_type)] += 1;
  row.by_direction[to_string(pair.direction)] += 1;
}

Report ReportBuilder::build(const std::map<std::string, uint64_t>& ingested_by_corpus) const {
  std::map<std::string, ReportRow> rows = rows_;
  ReportRow all;
  all.corpus = "all";
  for (const auto& [corpus, ingested] : ingested_by_corpus) {
    rows[corpus].corpus = corpus;
    rows[corpus].ingested = ingested;
  }
  Report report;
  for (auto& [_, row] : rows) {
    all.pairs += row.pairs;
    all.ingested += row.ingested;
    for (const auto& [t, n] : row.by_type) all.by_type[t] += n;
    for (const auto& [d, n] : row.by_direction) all.by_direction[d] += n;
    if (row.ingested > 0) {
      row.yield_pct = 100.0 * static_cast<double>(row.pairs) / static_cast<double>(row.ingested);
    }
    report.rows.push_back(std::move(row));
  }
  if (all.ingested > 0) {
    all.yield_pct = 100.0 * static_cast<double>(all.pairs) / static_cast<double>(all.ingested);
  }
  report.rows.push_back(std::move(all));
  return report;
}

Report corpus_report(const std::vector<AfinPair>& pairs,
                     const std::map<std::string, uint64_t>& ingested_by_corpus) {
  ReportBuilder builder;
  for (const auto& p : pairs) builder.add(p);
  return builder.build(ingested_by_corpus);
}

json report_json(const Report& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back(json{{"corpus", row.corpus},
                        {"pairs", row.pairs},
                        {"ingested", row.ingested},
                        {"yield_pct", row.yield_pct},
                        {"by_type", row.by_type},
                        {"by_direction", row.by_direction}});
  }
  return json{{"rows", rows}};
}

std::string report_table(const Report& report) {
  static const std::vector<std::string> kTypes = {"single_token", "affixal", "lexicalized",
                                                  "multitoken", "multiple"};
  std::ostringstream out;
  out << std::left << std::setw(22) << "corpus" << std::right << std::setw(12) << "pairs"
      << std::setw(12) << "ingested" << std::setw(10) << "%yield";
  for (const auto& t : kTypes) out << std::setw(19) << t;
  out << '\n';
  for (const auto& row : report.rows) {
    out << std::left << std::setw(22) << row.corpus << std::right << std::setw(12) << row.pairs
        << std::setw(12) << row.ingested << std::setw(10) << std::fixed << std::setprecision(2)
        << row.yield_pct;
    for (const auto& t : kTypes) {
      const auto it = row.by_type.find(t);
      const uint64_t n = it == row.by_type.end() ? 0 : it->second;
      const double pct = row.pairs ? 100.0 * static_cast<double>(n) / static_cast<double>(row.pairs) : 0.0;
      std::ostringstream cell;
      cell << n << " (" << std::fixed << std::setprecision(1) << pct << "%)";
      out << std::setw(19) << cell.str();
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace negaff
