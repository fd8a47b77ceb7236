#include "negaff/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "negaff/error.hpp"
#include "negaff/tokenize.hpp"
#include "negaff/unicode.hpp"

namespace negaff {

using nlohmann::json;

void to_json(json& j, const MetricScore& s) {
  j = json{{"name", s.name}, {"value", s.value}, {"n_examples", s.n_examples}};
}

namespace {

constexpr double kBleuEpsilon = 1e-9;
constexpr size_t kCharOrder = 6;
constexpr size_t kWordOrder = 2;
constexpr double kChrfBeta = 2.0;

using Counts = std::unordered_map<std::string, uint64_t>;

Counts word_ngrams(const std::vector<std::string>& tokens, size_t n) {
  Counts counts;
  if (tokens.size() < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (size_t k = 0; k < n; ++k) {
      if (k) key += '\x1f';
      key += tokens[i + k];
    }
    counts[key] += 1;
  }
  return counts;
}

uint64_t total(const Counts& counts) {
  uint64_t t = 0;
  for (const auto& [_, c] : counts) t += c;
  return t;
}

uint64_t clipped_matches(const Counts& cand, const Counts& ref) {
  uint64_t m = 0;
  for (const auto& [gram, c] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) m += std::min(c, it->second);
  }
  return m;
}

// Codepoints of the sentence with all whitespace removed.
std::vector<std::string> squeezed_chars(const std::string& text) {
  std::vector<std::string> chars;
  size_t pos = 0;
  while (pos < text.size()) {
    const size_t start = pos;
    const char32_t cp = uni::decode(text, pos);
    if (!uni::is_space(cp)) chars.emplace_back(text.substr(start, pos - start));
  }
  return chars;
}

}  // namespace

MetricScore bleu2(const std::vector<std::string>& candidates,
                  const std::vector<std::string>& references) {
  if (candidates.size() != references.size()) {
    fail("bleu2: " + std::to_string(candidates.size()) + " candidates vs " +
         std::to_string(references.size()) + " references");
  }
  if (candidates.empty()) fail("bleu2: needs at least one example");

  uint64_t cand_len = 0, ref_len = 0;
  uint64_t match[2] = {0, 0};
  uint64_t seen[2] = {0, 0};
  for (size_t i = 0; i < candidates.size(); ++i) {
    const auto cand = token_texts(candidates[i], "en");
    const auto ref = token_texts(references[i], "en");
    cand_len += cand.size();
    ref_len += ref.size();
    for (size_t n = 1; n <= 2; ++n) {
      const Counts c = word_ngrams(cand, n);
      match[n - 1] += clipped_matches(c, word_ngrams(ref, n));
      seen[n - 1] += total(c);
    }
  }

  MetricScore score;
  score.name = "bleu2";
  score.n_examples = candidates.size();
  if (cand_len == 0) return score;

  double log_precision = 0.0;
  for (size_t n = 0; n < 2; ++n) {
    const double p =
        seen[n] > 0 ? static_cast<double>(match[n]) / static_cast<double>(seen[n]) : 0.0;
    log_precision += std::log(std::max(p, kBleuEpsilon));
  }
  const double brevity =
      cand_len >= ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
  score.value = 100.0 * brevity * std::exp(log_precision / 2.0);
  return score;
}

MetricScore chrfpp(const std::vector<std::string>& candidates,
                   const std::vector<std::string>& references) {
  if (candidates.size() != references.size()) {
    fail("chrfpp: " + std::to_string(candidates.size()) + " candidates vs " +
         std::to_string(references.size()) + " references");
  }

  // Corpus-aggregated counts per order: char orders first, then word orders.
  constexpr size_t kOrders = kCharOrder + kWordOrder;
  uint64_t match[kOrders] = {};
  uint64_t cand_total[kOrders] = {};
  uint64_t ref_total[kOrders] = {};

  for (size_t i = 0; i < candidates.size(); ++i) {
    const auto cand_chars = squeezed_chars(candidates[i]);
    const auto ref_chars = squeezed_chars(references[i]);
    for (size_t n = 1; n <= kCharOrder; ++n) {
      const Counts c = word_ngrams(cand_chars, n);
      const Counts r = word_ngrams(ref_chars, n);
      match[n - 1] += clipped_matches(c, r);
      cand_total[n - 1] += total(c);
      ref_total[n - 1] += total(r);
    }
    const auto cand_words = token_texts(candidates[i], "en");
    const auto ref_words = token_texts(references[i], "en");
    for (size_t n = 1; n <= kWordOrder; ++n) {
      const Counts c = word_ngrams(cand_words, n);
      const Counts r = word_ngrams(ref_words, n);
      match[kCharOrder + n - 1] += clipped_matches(c, r);
      cand_total[kCharOrder + n - 1] += total(c);
      ref_total[kCharOrder + n - 1] += total(r);
    }
  }

  double precision_sum = 0.0, recall_sum = 0.0;
  size_t active_orders = 0;
  for (size_t o = 0; o < kOrders; ++o) {
    if (cand_total[o] == 0 && ref_total[o] == 0) continue;  // order absent on both sides
    ++active_orders;
    if (cand_total[o] > 0) {
      precision_sum += static_cast<double>(match[o]) / static_cast<double>(cand_total[o]);
    }
    if (ref_total[o] > 0) {
      recall_sum += static_cast<double>(match[o]) / static_cast<double>(ref_total[o]);
    }
  }

  MetricScore score;
  score.name = "chrfpp";
  score.n_examples = candidates.size();
  if (active_orders == 0) return score;

  const double precision = precision_sum / static_cast<double>(active_orders);
  const double recall = recall_sum / static_cast<double>(active_orders);
  const double beta2 = kChrfBeta * kChrfBeta;
  if (precision + recall > 0.0) {
    score.value = 100.0 * (1.0 + beta2) * precision * recall / (beta2 * precision + recall);
  }
  return score;
}

}  // namespace negaff
