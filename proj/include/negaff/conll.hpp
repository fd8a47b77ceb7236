#pragma once

#include <string>
#include <vector>

#include "negaff/cue_detect.hpp"

namespace negaff {

struct LabeledSequence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;  // BIO
};

// "token<TAB>tag" lines, blank line between sentences.
std::vector<LabeledSequence> read_two_column(const std::string& path);

struct SemConllOptions {
  size_t token_column = 3;  // word column in CD-SCO-style files
  size_t cue_column = 7;    // cue annotation column; "_" / "***" / "" mean none
  // Cue strings that are proper substrings of their token are affix
  // annotations; by default they stay O in BIO and surface only as
  // affixal CueSpans.
  bool affixal_as_token = false;
};

// Token-per-line CoNLL reader where one configurable column carries the cue
// annotation. Consecutive annotated tokens merge into one span.
std::vector<TaggedSentence> read_sem_conll(const std::string& path, const std::string& lang,
                                           const SemConllOptions& options = {});

// Rebuilds a TaggedSentence (space-joined sentence text, offsets, spans)
// from a gold token/tag sequence.
TaggedSentence to_tagged(const LabeledSequence& seq, const std::string& lang,
                         const CueLexicon* lexicon = nullptr);

}  // namespace negaff
