#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace negaff {

struct MetricScore {
  std::string name;
  double value = 0.0;  // scaled to [0, 100]
  uint64_t n_examples = 0;
};

void to_json(nlohmann::json& j, const MetricScore& s);

// Corpus-level BLEU over 1- and 2-grams: geometric mean of modified
// precisions with brevity penalty. Zero precisions are floored at 1e-9
// instead of collapsing the log to -inf; corpus scores are insensitive to
// that choice but it keeps disjoint candidates at an exact 0.0 readout.
// Tokenization is the pipeline tokenizer (lang "en").
MetricScore bleu2(const std::vector<std::string>& candidates,
                  const std::vector<std::string>& references);

// Character n-gram F-score (n <= 6, whitespace stripped) augmented with
// word 1/2-grams, beta = 2. Precision/recall are averaged over orders
// using corpus-aggregated counts; orders that appear in neither side are
// skipped so identical inputs score exactly 100.
MetricScore chrfpp(const std::vector<std::string>& candidates,
                   const std::vector<std::string>& references);

}  // namespace negaff
