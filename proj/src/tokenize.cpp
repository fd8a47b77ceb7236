#include "negaff/tokenize.hpp"

#include <array>

#include "negaff/unicode.hpp"

namespace negaff {

namespace {

struct Cp {
  char32_t cp;
  size_t start;
  size_t len;
};

// Longest entries first so "n't" wins over a bare "'d"-style suffix.
// U+2019 variants cover curly-apostrophe text.
const std::array<std::string_view, 14> kEnClitics = {
    "n't", "n’t", "'re", "’re", "'ve", "’ve",
    "'ll", "’ll", "'s",  "’s",  "'d",  "’d",
    "'m",  "’m"};

bool is_en_clitic(std::string_view lowered) {
  for (auto c : kEnClitics) {
    if (lowered == c) return true;
  }
  return false;
}

// Byte length of the clitic suffix of `lowered`, or 0. A match must leave a
// non-empty stem.
size_t clitic_suffix_len(std::string_view lowered) {
  for (auto c : kEnClitics) {
    if (lowered.size() > c.size() && lowered.ends_with(c)) return c.size();
  }
  return 0;
}

}  // namespace

bool operator==(const Token& a, const Token& b) {
  return a.text == b.text && a.start == b.start && a.end == b.end && a.index == b.index;
}

std::vector<Token> tokenize(std::string_view sentence, std::string_view lang) {
  const bool en = (lang == "en");
  std::vector<Token> out;

  auto emit = [&](size_t start, size_t end) {
    Token t;
    t.text = std::string(sentence.substr(start, end - start));
    t.start = start;
    t.end = end;
    t.index = out.size();
    out.push_back(std::move(t));
  };

  // Emits one whitespace-delimited chunk, splitting off punctuation and
  // (for English) clitics.
  auto emit_chunk = [&](const std::vector<Cp>& cps, size_t lo, size_t hi) {
    // Peel leading punctuation, one codepoint per token, unless the remaining
    // piece is itself a clitic ("'s" must survive re-tokenization whole).
    while (hi - lo > 1 && uni::is_punct(cps[lo].cp)) {
      const size_t s = cps[lo].start;
      std::string_view rest = sentence.substr(s, cps[hi - 1].start + cps[hi - 1].len - s);
      if (en && is_en_clitic(uni::lower(rest))) break;
      emit(s, s + cps[lo].len);
      ++lo;
    }
    // Collect trailing punctuation; emitted after the core, left to right.
    size_t tail = hi;
    while (tail - lo > 1 && uni::is_punct(cps[tail - 1].cp)) --tail;

    if (tail > lo) {
      const size_t core_start = cps[lo].start;
      const size_t core_end = cps[tail - 1].start + cps[tail - 1].len;
      if (en) {
        // Split clitics from the right: "shouldn't've" -> should | n't | 've.
        std::vector<std::pair<size_t, size_t>> pieces;
        size_t end = core_end;
        for (;;) {
          std::string low = uni::lower(sentence.substr(core_start, end - core_start));
          const size_t n = clitic_suffix_len(low);
          if (n == 0) break;
          pieces.emplace_back(end - n, end);
          end -= n;
        }
        emit(core_start, end);
        for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) emit(it->first, it->second);
      } else {
        emit(core_start, core_end);
      }
    }
    for (size_t i = tail; i < hi; ++i) emit(cps[i].start, cps[i].start + cps[i].len);
  };

  std::vector<Cp> chunk;
  size_t pos = 0;
  while (pos < sentence.size()) {
    const size_t start = pos;
    const char32_t cp = uni::decode(sentence, pos);
    if (uni::is_space(cp)) {
      if (!chunk.empty()) {
        emit_chunk(chunk, 0, chunk.size());
        chunk.clear();
      }
    } else {
      chunk.push_back({cp, start, pos - start});
    }
  }
  if (!chunk.empty()) emit_chunk(chunk, 0, chunk.size());
  return out;
}

size_t token_count(std::string_view sentence, std::string_view lang) {
  return tokenize(sentence, lang).size();
}

std::vector<std::string> token_texts(std::string_view sentence, std::string_view lang) {
  std::vector<std::string> texts;
  for (auto& t : tokenize(sentence, lang)) texts.push_back(std::move(t.text));
  return texts;
}

}  // namespace negaff
