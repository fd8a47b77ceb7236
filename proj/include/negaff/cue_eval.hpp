#pragma once

#include <cstdint>
#include <vector>

#include "negaff/cue_detect.hpp"

namespace negaff {

struct PrfScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  uint64_t tp = 0;
  uint64_t fp = 0;
  uint64_t fn = 0;
};

// Cue-level exact-span scoring: a predicted cue is a true positive iff its
// token_indices match a gold cue's exactly. 0/0 ratios are defined as 0.
PrfScores evaluate_cues(const std::vector<TaggedSentence>& pred,
                        const std::vector<TaggedSentence>& gold);

}  // namespace negaff
