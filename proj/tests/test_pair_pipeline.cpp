#include <doctest.h>

#include <random>

#include "bitext_gen.hpp"
#include "negaff/pair_pipeline.hpp"
#include "test_support.hpp"

using namespace negaff;
using namespace negaff::test;

namespace {

RuleDetector pipeline_detector() {
  return RuleDetector(
      {{"en", en_lexicon()}, {"no", no_lexicon()}, {"es", es_lexicon()}});
}

SentencePair make_pair(const std::string& id, const std::string& src, const std::string& tgt,
                       const std::string& tgt_lang = "no", const std::string& corpus = "c") {
  SentencePair p;
  p.id = id;
  p.source_lang = "en";
  p.target_lang = tgt_lang;
  p.source_text = src;
  p.target_text = tgt;
  p.corpus = corpus;
  return p;
}

BuildResult run_build(const std::vector<SentencePair>& pairs, Backend& backend,
                      std::vector<AfinPair>& out, size_t max_tokens = 40) {
  const RuleDetector detector = pipeline_detector();
  FakeClock clock;
  MtOptions mt;
  mt.batch_size = 3;
  PipelineOptions options;
  options.max_target_tokens = max_tokens;
  size_t i = 0;
  return build_pairs(
      [&]() -> std::optional<SentencePair> {
        if (i >= pairs.size()) return std::nullopt;
        return pairs[i++];
      },
      detector, backend, nullptr, mt, clock, options,
      [&](const AfinPair& p) { out.push_back(p); });
}

}  // namespace

TEST_CASE("either-negated filter keeps exactly-one-negated pairs and tallies the rest") {
  const RuleDetector detector = pipeline_detector();
  std::map<std::string, CorpusStats> stats;
  const std::vector<SentencePair> pairs = {
      make_pair("c:1", "There is no more than one Truth.", "Og det finnes kun en Sannhet."),
      make_pair("c:2", "It is not fine.", "El término no se popularizó.", "es"),
      make_pair("c:3", "The sun is shining.", "La casa es grande.", "es"),
  };
  const auto kept = filter_either_negated(pairs, detector, stats);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == "c:1");
  CHECK(stats["c"].total_pairs == 3);
  CHECK(stats["c"].neg_either == 1);
  CHECK(stats["c"].neg_both == 1);
  CHECK(stats["c"].neg_neither == 1);
}

TEST_CASE("length filter: 40 tokens kept, 41 dropped, strict rule") {
  std::string forty, forty_one;
  for (int i = 0; i < 40; ++i) forty += (i ? " hus" : "hus");
  forty_one = forty + " hus";
  uint64_t dropped = 0;
  const auto kept = filter_length({make_pair("c:1", "x", forty), make_pair("c:2", "x", forty_one)},
                                  40, &dropped);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == "c:1");
  CHECK(dropped == 1);
}

TEST_CASE("max_tokens=0 drops everything") {
  uint64_t dropped = 0;
  CHECK(filter_length({make_pair("c:1", "x", "hus")}, 0, &dropped).empty());
  CHECK(dropped == 1);
}

TEST_CASE("build_pairs emits the motivating original-negated pair") {
  FunctionBackend backend = scripted_backend({});
  std::vector<AfinPair> out;
  run_build({make_pair("w:1", "There is no more than one Truth.", "sol vann", "no", "w")}, backend,
            out);
  REQUIRE(out.size() == 1);
  CHECK(out[0].direction == Direction::original_negated);
  CHECK(out[0].negated == "There is no more than one Truth.");
  CHECK(out[0].affirmative == "sun water");
  CHECK(out[0].negation_type == NegationType::single_token);
  CHECK(out[0].source_pair == "w:1");
  CHECK(out[0].id == "afin:w:1");
}

TEST_CASE("build_pairs emits the backtranslation-negated direction") {
  FunctionBackend backend = scripted_backend({});
  std::vector<AfinPair> out;
  run_build({make_pair("w:1", "green table", "ikke sol", "no", "w")}, backend, out);
  REQUIRE(out.size() == 1);
  CHECK(out[0].direction == Direction::backtranslation_negated);
  CHECK(out[0].negated == "not sun");
  CHECK(out[0].affirmative == "green table");
}

TEST_CASE("meaning-flip backtranslations are emitted, not filtered") {
  // Known failure mode: the cue-free target already flipped the meaning,
  // the backtranslation mirrors it, the XOR holds, and the pair ships.
  FunctionBackend backend([](const TranslationRequest& r) {
    BackendItem item;
    item.ok = true;
    item.translation =
        (r.text == "Hvordan kan du nyte denne turen!") ? "How can you enjoy this trip!" : "thing";
    return item;
  });
  std::vector<AfinPair> out;
  run_build({make_pair("w:1", "How can you not enjoy this trip!", "Hvordan kan du nyte denne turen!",
                       "no", "w")},
            backend, out);
  REQUIRE(out.size() == 1);
  CHECK(out[0].direction == Direction::original_negated);
  CHECK(out[0].negated == "How can you not enjoy this trip!");
  CHECK(out[0].affirmative == "How can you enjoy this trip!");
}

TEST_CASE("parity discards: backtranslation reintroduces the cue") {
  FunctionBackend backend = scripted_backend({{"sol vann", BtBehavior::flip}});
  std::vector<AfinPair> out;
  const auto result =
      run_build({make_pair("w:1", "not green table", "sol vann", "no", "w")}, backend, out);
  CHECK(out.empty());
  CHECK(result.counts.at("w").discards.at("backtranslation_parity") == 1);
}

TEST_CASE("translation failures are skipped and counted") {
  FunctionBackend backend = scripted_backend({{"sol vann", BtBehavior::fail}});
  std::vector<AfinPair> out;
  const auto result =
      run_build({make_pair("w:1", "not green table", "sol vann", "no", "w")}, backend, out);
  CHECK(out.empty());
  CHECK(result.counts.at("w").discards.at("translation_failed") == 1);
}

TEST_CASE("assemble_pairs consumes pre-fetched translations aligned by index") {
  const RuleDetector detector = pipeline_detector();
  const std::vector<SentencePair> pairs = {
      make_pair("w:1", "There is no more than one Truth.", "Og det finnes kun en Sannhet.", "no", "w"),
      make_pair("w:2", "green table", "ikke sol", "no", "w"),
      make_pair("w:3", "not fine", "sol", "no", "w"),
  };
  const std::vector<std::optional<std::string>> translations = {
      "And there is only one truth.", "not sun", std::nullopt};
  std::map<std::string, StageCounts> counts;
  const auto out = assemble_pairs(pairs, translations, detector, counts);
  REQUIRE(out.size() == 2);
  CHECK(out[0].direction == Direction::original_negated);
  CHECK(out[1].direction == Direction::backtranslation_negated);
  CHECK(counts.at("w").discards.at("translation_failed") == 1);
  CHECK(counts.at("w").ingested == 3);
  CHECK(counts.at("w").emitted == 2);
  CHECK_THROWS_AS(assemble_pairs(pairs, {}, detector, counts), Error);
}

TEST_CASE("classify_negation_type follows the cue taxonomy") {
  CueSpan single{{0}, "no", CueKind::single_token, std::nullopt, std::nullopt};
  CueSpan affixal{{1}, "untouched", CueKind::affixal, AffixSide::prefix, "un"};
  CueSpan lex{{2}, "lack", CueKind::lexicalized, std::nullopt, std::nullopt};
  CueSpan multi{{3, 4}, "no longer", CueKind::multitoken, std::nullopt, std::nullopt};
  CHECK(classify_negation_type({single}) == NegationType::single_token);
  CHECK(classify_negation_type({affixal}) == NegationType::affixal);
  CHECK(classify_negation_type({lex}) == NegationType::lexicalized);
  CHECK(classify_negation_type({multi}) == NegationType::multitoken);
  CHECK(classify_negation_type({single, single}) == NegationType::multiple);
  CHECK_THROWS_AS(classify_negation_type({}), Error);
}

TEST_CASE("corpus report: hand-counted distribution over 10 pairs") {
  std::vector<AfinPair> pairs;
  auto add = [&](NegationType type, const std::string& corpus) {
    AfinPair p;
    p.id = "afin:" + corpus + ":" + std::to_string(pairs.size() + 1);
    p.negated = "x";
    p.affirmative = "y";
    p.direction = (pairs.size() % 2 == 0) ? Direction::original_negated
                                          : Direction::backtranslation_negated;
    p.negation_type = type;
    p.corpus = corpus;
    pairs.push_back(std::move(p));
  };
  for (int i = 0; i < 6; ++i) add(NegationType::single_token, "a");
  add(NegationType::affixal, "a");
  add(NegationType::affixal, "b");
  add(NegationType::lexicalized, "b");
  add(NegationType::multiple, "b");

  const Report report = corpus_report(pairs, {{"a", 70}, {"b", 30}});
  REQUIRE(report.rows.size() == 3);  // a, b, all
  const ReportRow& all = report.rows.back();
  CHECK(all.corpus == "all");
  CHECK(all.pairs == 10);
  CHECK(all.by_type.at("single_token") == 6);
  CHECK(all.by_type.at("affixal") == 2);
  CHECK(all.by_type.at("lexicalized") == 1);
  CHECK(all.by_type.at("multiple") == 1);
  CHECK(all.yield_pct == doctest::Approx(10.0));
  CHECK(report.rows[0].corpus == "a");
  CHECK(report.rows[0].yield_pct == doctest::Approx(10.0));

  // Type percentages partition the total.
  uint64_t sum = 0;
  for (const auto& [_, n] : all.by_type) sum += n;
  CHECK(sum == all.pairs);

  const std::string table = report_table(report);
  CHECK(table.find("all") != std::string::npos);
  CHECK(table.find("60.0%") != std::string::npos);
}

TEST_CASE("empty stream yields an all-zero report") {
  const Report report = corpus_report({});
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].pairs == 0);
  CHECK(report.rows[0].yield_pct == 0.0);
}

TEST_CASE("property: exactly-one-negated, conservation, and the length boundary") {
  std::mt19937_64 rng(20240816);
  const RuleDetector detector = pipeline_detector();

  const auto generated = random_bitext(rng, 300);
  std::map<std::string, BtBehavior> behaviors;
  for (const auto& g : generated) behaviors[g.pair.target_text] = g.behavior;
  FunctionBackend backend = scripted_backend(behaviors);

  std::vector<SentencePair> pairs;
  for (const auto& g : generated) pairs.push_back(g.pair);
  std::vector<AfinPair> out;
  const BuildResult result = run_build(pairs, backend, out);

  // (a) every emitted pair is exactly-one-negated under the detector
  for (const auto& p : out) {
    CHECK(!detector.tag(p.negated, "en").cues.empty());
    CHECK(detector.tag(p.affirmative, "en").cues.empty());
  }

  // (b) conservation per corpus
  for (const auto& [corpus, counts] : result.counts) {
    CHECK(counts.ingested == counts.emitted + counts.discarded_total());
  }
  CHECK(result.counts.at("prop-en-no").ingested == generated.size());

  // (c) boundary + expected discard reason per generated pair
  std::map<std::string, uint64_t> expected;
  uint64_t expected_emitted = 0;
  for (const auto& g : generated) {
    if (g.src_cue && g.tgt_cue) {
      expected["both_negated"] += 1;
    } else if (!g.src_cue && !g.tgt_cue) {
      expected["neither_negated"] += 1;
    } else if (g.long_target) {
      expected["target_too_long"] += 1;
    } else if (g.behavior == BtBehavior::fail) {
      expected["translation_failed"] += 1;
    } else {
      const bool bt_cue = (g.behavior == BtBehavior::faithful) ? g.tgt_cue : !g.tgt_cue;
      if (g.src_cue != bt_cue) {
        ++expected_emitted;
      } else {
        expected["backtranslation_parity"] += 1;
      }
    }
  }
  const StageCounts& counts = result.counts.at("prop-en-no");
  CHECK(counts.emitted == expected_emitted);
  for (const auto& [reason, n] : expected) {
    CHECK(counts.discards.at(reason) == n);
  }

  // cue_stats invariants
  const CorpusStats& cs = result.cue_stats.at("prop-en-no");
  CHECK(cs.neg_both + cs.neg_either + cs.neg_neither == cs.total_pairs);
  CHECK(cs.yielded_pairs <= cs.neg_either);
}

TEST_CASE("pipeline determinism: same input twice gives identical pairs") {
  std::mt19937_64 rng(5);
  const auto generated = random_bitext(rng, 60);
  std::map<std::string, BtBehavior> behaviors;
  for (const auto& g : generated) behaviors[g.pair.target_text] = g.behavior;
  std::vector<SentencePair> pairs;
  for (const auto& g : generated) pairs.push_back(g.pair);

  FunctionBackend b1 = scripted_backend(behaviors);
  FunctionBackend b2 = scripted_backend(behaviors);
  std::vector<AfinPair> out1, out2;
  run_build(pairs, b1, out1);
  run_build(pairs, b2, out2);
  REQUIRE(out1.size() == out2.size());
  for (size_t i = 0; i < out1.size(); ++i) CHECK(out1[i] == out2[i]);
}

TEST_CASE("afin pair json round trip") {
  AfinPair p;
  p.id = "afin:w:1";
  p.negated = "There is no more than one Truth.";
  p.affirmative = "And there is only one truth.";
  p.direction = Direction::original_negated;
  p.cues = {{std::vector<size_t>{2}, "no", CueKind::single_token, std::nullopt, std::nullopt}};
  p.negation_type = NegationType::single_token;
  p.source_pair = "w:1";
  p.corpus = "w";
  const nlohmann::json j = p;
  CHECK(j.at("direction") == "original_negated");
  CHECK(j.at("cues")[0].at("token_indices")[0] == 2);
  CHECK(j.get<AfinPair>() == p);
}
