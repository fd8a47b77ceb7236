#include <doctest.h>

#include "negaff/conll.hpp"
#include "negaff/cue_eval.hpp"
#include "test_support.hpp"

using namespace negaff;
using namespace negaff::test;

TEST_CASE("two-column reader splits sentences on blank lines") {
  TempDir dir("twocol");
  write_file(dir.file("a.tsv"),
             "It\tO\nis\tO\nnot\tB-CUE\nfine\tO\n\nno\tB-CUE\nlonger\tI-CUE\nhere\tO\n");
  const auto seqs = read_two_column(dir.file("a.tsv"));
  REQUIRE(seqs.size() == 2);
  CHECK(seqs[0].tokens == std::vector<std::string>{"It", "is", "not", "fine"});
  CHECK(seqs[0].tags == std::vector<std::string>{"O", "O", "B-CUE", "O"});
  CHECK(seqs[1].tags == std::vector<std::string>{"B-CUE", "I-CUE", "O"});
}

TEST_CASE("two-column reader rejects invalid BIO") {
  TempDir dir("twocol_bad");
  write_file(dir.file("a.tsv"), "word\tI-CUE\n");
  CHECK_THROWS_AS(read_two_column(dir.file("a.tsv")), Error);
}

TEST_CASE("sem-style reader: cue column, full-token and affix cues") {
  TempDir dir("sem");
  // Columns: chapter sentence token word lemma pos syntax cue
  write_file(dir.file("a.conll"),
             "c 0 0 The the DT x _\n"
             "c 0 1 wing wing NN x _\n"
             "c 0 2 was be VBD x _\n"
             "c 0 3 untouched untouched JJ x un\n"
             "\n"
             "c 1 0 no no DT x no\n"
             "c 1 1 longer longer RB x longer\n"
             "c 1 2 here here RB x ***\n");
  const auto sentences = read_sem_conll(dir.file("a.conll"), "en");
  REQUIRE(sentences.size() == 2);

  const TaggedSentence& s0 = sentences[0];
  REQUIRE(s0.cues.size() == 1);
  CHECK(s0.cues[0].kind == CueKind::affixal);
  CHECK(*s0.cues[0].affix == "un");
  CHECK(*s0.cues[0].affix_side == AffixSide::prefix);
  CHECK(s0.tags == std::vector<std::string>{"O", "O", "O", "O"});  // affix stays O

  const TaggedSentence& s1 = sentences[1];
  REQUIRE(s1.cues.size() == 1);
  CHECK(s1.cues[0].kind == CueKind::multitoken);
  CHECK(s1.cues[0].token_indices == std::vector<size_t>{0, 1});
  CHECK(s1.tags == std::vector<std::string>{"B-CUE", "I-CUE", "O"});

  SemConllOptions opts;
  opts.affixal_as_token = true;
  const auto tagged = read_sem_conll(dir.file("a.conll"), "en", opts);
  CHECK(tagged[0].tags == std::vector<std::string>{"O", "O", "O", "B-CUE"});
}

TEST_CASE("perfect predictions score 1.0") {
  TempDir dir("eval1");
  std::string content;
  for (int i = 0; i < 10; ++i) content += "not\tB-CUE\nfine\tO\n\n";
  write_file(dir.file("g.tsv"), content);
  std::vector<TaggedSentence> gold;
  for (const auto& seq : read_two_column(dir.file("g.tsv"))) gold.push_back(to_tagged(seq, "en"));
  const PrfScores s = evaluate_cues(gold, gold);
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.f1 == 1.0);
  CHECK(s.tp == 10);
}

TEST_CASE("zero predictions with nonzero gold is all-zero by convention") {
  LabeledSequence gold_seq{{"not", "fine"}, {"B-CUE", "O"}};
  LabeledSequence pred_seq{{"not", "fine"}, {"O", "O"}};
  const PrfScores s = evaluate_cues({to_tagged(pred_seq, "en")}, {to_tagged(gold_seq, "en")});
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);
  CHECK(s.f1 == 0.0);
}

TEST_CASE("partial match: P=0.5, R=1/3, F1=0.4") {
  // Gold: three cues across two sentences; predictions: two cues, one exact.
  LabeledSequence gold1{{"not", "a", "never"}, {"B-CUE", "O", "B-CUE"}};
  LabeledSequence gold2{{"no", "way"}, {"B-CUE", "O"}};
  LabeledSequence pred1{{"not", "a", "never"}, {"B-CUE", "B-CUE", "O"}};  // 1 TP, 1 FP
  LabeledSequence pred2{{"no", "way"}, {"O", "O"}};
  const PrfScores s = evaluate_cues({to_tagged(pred1, "en"), to_tagged(pred2, "en")},
                                    {to_tagged(gold1, "en"), to_tagged(gold2, "en")});
  CHECK(s.tp == 1);
  CHECK(s.fp == 1);
  CHECK(s.fn == 2);
  CHECK(s.precision == doctest::Approx(0.5));
  CHECK(s.recall == doctest::Approx(1.0 / 3.0));
  CHECK(s.f1 == doctest::Approx(0.4));
}

TEST_CASE("span match requires exact token indices") {
  LabeledSequence gold{{"no", "longer", "here"}, {"B-CUE", "I-CUE", "O"}};
  LabeledSequence pred{{"no", "longer", "here"}, {"B-CUE", "O", "O"}};  // shorter span
  const PrfScores s = evaluate_cues({to_tagged(pred, "en")}, {to_tagged(gold, "en")});
  CHECK(s.tp == 0);
  CHECK(s.fp == 1);
  CHECK(s.fn == 1);
}

TEST_CASE("sentence count mismatch is an error") {
  LabeledSequence seq{{"a"}, {"O"}};
  CHECK_THROWS_AS(evaluate_cues({to_tagged(seq, "en")}, {}), Error);
}
