#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace negaff::uni {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes the codepoint starting at byte offset `pos`, advancing `pos` past it.
// Malformed sequences yield kReplacement and advance by one byte.
char32_t decode(std::string_view text, size_t& pos);

// True iff `text` is well-formed UTF-8 (rejects overlongs, surrogates, > U+10FFFF).
bool valid_utf8(std::string_view text);

// Number of codepoints; malformed bytes count one each.
size_t length(std::string_view text);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);

char32_t to_lower(char32_t cp);

// Codepoint-wise lowercasing (ASCII + Latin-1 + Latin Extended-A).
std::string lower(std::string_view text);

void append(std::string& out, char32_t cp);

// First `n` codepoints / last `n` codepoints, as UTF-8. Whole string when shorter.
std::string prefix(std::string_view text, size_t n);
std::string suffix(std::string_view text, size_t n);

}  // namespace negaff::uni
