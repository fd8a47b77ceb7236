#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace negaff {

// One surface token. `start`/`end` are byte offsets into the original
// sentence, so sentence.substr(start, end - start) == text always holds.
struct Token {
  std::string text;
  size_t start = 0;
  size_t end = 0;
  size_t index = 0;
};

bool operator==(const Token& a, const Token& b);

// Whitespace tokenization with leading/trailing punctuation split into
// separate tokens. For lang "en", clitics (n't, 's, 're, 've, 'll, 'd, 'm)
// become standalone tokens; "n't" in particular must be taggable as a cue.
std::vector<Token> tokenize(std::string_view sentence, std::string_view lang);

// Token count used by length filters; counts every token, punctuation included.
size_t token_count(std::string_view sentence, std::string_view lang);

std::vector<std::string> token_texts(std::string_view sentence, std::string_view lang);

}  // namespace negaff
