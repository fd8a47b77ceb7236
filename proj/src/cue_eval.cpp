#include "negaff/cue_eval.hpp"

#include <map>

#include "negaff/error.hpp"

namespace negaff {

PrfScores evaluate_cues(const std::vector<TaggedSentence>& pred,
                        const std::vector<TaggedSentence>& gold) {
  if (pred.size() != gold.size()) {
    fail("evaluate_cues: " + std::to_string(pred.size()) + " predicted sentences vs " +
         std::to_string(gold.size()) + " gold");
  }
  PrfScores s;
  for (size_t i = 0; i < pred.size(); ++i) {
    std::map<std::vector<size_t>, uint64_t> unmatched;
    for (const auto& cue : gold[i].cues) unmatched[cue.token_indices] += 1;
    for (const auto& cue : pred[i].cues) {
      auto it = unmatched.find(cue.token_indices);
      if (it != unmatched.end() && it->second > 0) {
        ++s.tp;
        --it->second;
      } else {
        ++s.fp;
      }
    }
    for (const auto& [_, count] : unmatched) s.fn += count;
  }
  s.precision = (s.tp + s.fp) ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp) : 0.0;
  s.recall = (s.tp + s.fn) ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn) : 0.0;
  s.f1 = (s.precision + s.recall > 0.0)
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

}  // namespace negaff
