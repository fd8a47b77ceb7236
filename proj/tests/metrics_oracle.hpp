#pragma once

// Brute-force scoring oracles for the metric tests: independent n-gram
// counting over decoded codepoint sequences, no shared counting code with
// the implementation.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "negaff/tokenize.hpp"
#include "negaff/unicode.hpp"

namespace negaff::test {

inline std::u32string decode_all(const std::string& text) {
  std::u32string out;
  size_t pos = 0;
  while (pos < text.size()) out.push_back(uni::decode(text, pos));
  return out;
}

inline std::u32string squeeze(const std::string& text) {
  std::u32string out;
  for (const char32_t cp : decode_all(text)) {
    if (!uni::is_space(cp)) out.push_back(cp);
  }
  return out;
}

template <typename Seq>
std::map<Seq, int> ngram_multiset(const Seq& seq, size_t n) {
  std::map<Seq, int> counts;
  if (seq.size() < n) return counts;
  for (size_t i = 0; i + n <= seq.size(); ++i) {
    counts[Seq(seq.begin() + static_cast<ptrdiff_t>(i), seq.begin() + static_cast<ptrdiff_t>(i + n))] += 1;
  }
  return counts;
}

template <typename Seq>
struct OverlapCounts {
  long long match = 0;
  long long cand = 0;
  long long ref = 0;
};

template <typename Seq>
OverlapCounts<Seq> overlap(const Seq& cand, const Seq& ref, size_t n) {
  OverlapCounts<Seq> out;
  const auto c = ngram_multiset(cand, n);
  const auto r = ngram_multiset(ref, n);
  for (const auto& [gram, count] : c) {
    out.cand += count;
    auto it = r.find(gram);
    if (it != r.end()) out.match += std::min(count, it->second);
  }
  for (const auto& [_, count] : r) out.ref += count;
  return out;
}

struct BleuOracle {
  double score = 0.0;
  long long match1 = 0;  // exposed for the monotonicity property
};

inline BleuOracle oracle_bleu2(const std::vector<std::string>& candidates,
                               const std::vector<std::string>& references) {
  BleuOracle out;
  long long cand_len = 0, ref_len = 0;
  long long match[2] = {0, 0}, seen[2] = {0, 0};
  for (size_t i = 0; i < candidates.size(); ++i) {
    const auto c = token_texts(candidates[i], "en");
    const auto r = token_texts(references[i], "en");
    cand_len += static_cast<long long>(c.size());
    ref_len += static_cast<long long>(r.size());
    for (size_t n = 1; n <= 2; ++n) {
      const auto o = overlap(c, r, n);
      match[n - 1] += o.match;
      seen[n - 1] += o.cand;
    }
  }
  out.match1 = match[0];
  if (cand_len == 0) return out;
  double log_p = 0.0;
  for (int n = 0; n < 2; ++n) {
    const double p = seen[n] > 0 ? static_cast<double>(match[n]) / static_cast<double>(seen[n]) : 0.0;
    log_p += std::log(std::max(p, 1e-9));
  }
  const double bp = cand_len >= ref_len
                        ? 1.0
                        : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
  out.score = 100.0 * bp * std::exp(log_p / 2.0);
  return out;
}

inline double oracle_chrfpp(const std::vector<std::string>& candidates,
                            const std::vector<std::string>& references) {
  constexpr size_t kOrders = 8;  // char 1..6 then word 1..2
  long long match[kOrders] = {}, cand[kOrders] = {}, ref[kOrders] = {};
  for (size_t i = 0; i < candidates.size(); ++i) {
    const auto cand_chars = squeeze(candidates[i]);
    const auto ref_chars = squeeze(references[i]);
    for (size_t n = 1; n <= 6; ++n) {
      const auto o = overlap(cand_chars, ref_chars, n);
      match[n - 1] += o.match;
      cand[n - 1] += o.cand;
      ref[n - 1] += o.ref;
    }
    const auto cand_words = token_texts(candidates[i], "en");
    const auto ref_words = token_texts(references[i], "en");
    for (size_t n = 1; n <= 2; ++n) {
      const auto o = overlap(cand_words, ref_words, n);
      match[5 + n] += o.match;
      cand[5 + n] += o.cand;
      ref[5 + n] += o.ref;
    }
  }
  double p_sum = 0.0, r_sum = 0.0;
  int active = 0;
  for (size_t o = 0; o < kOrders; ++o) {
    if (cand[o] == 0 && ref[o] == 0) continue;
    ++active;
    if (cand[o] > 0) p_sum += static_cast<double>(match[o]) / static_cast<double>(cand[o]);
    if (ref[o] > 0) r_sum += static_cast<double>(match[o]) / static_cast<double>(ref[o]);
  }
  if (active == 0) return 0.0;
  const double p = p_sum / active;
  const double r = r_sum / active;
  if (p + r == 0.0) return 0.0;
  return 100.0 * 5.0 * p * r / (4.0 * p + r);
}

}  // namespace negaff::test
