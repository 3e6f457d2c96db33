#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace skeetrl {

// Decodes UTF-8 into Unicode scalar values. Invalid byte sequences decode as
// U+FFFD, one scalar per bad byte, so counting never throws on dirty input.
std::vector<char32_t> utf8_scalars(std::string_view text);

// Number of Unicode scalar values in the UTF-8 string.
std::size_t scalar_count(std::string_view text);

// Byte offsets of each scalar start, plus a trailing text.size() sentinel.
std::vector<std::size_t> utf8_offsets(std::string_view text);

// ASCII-only lowercase; bytes >= 0x80 pass through untouched (UTF-8 safe).
std::string ascii_lower(std::string_view text);

bool is_ascii_space(char c);

// True if the string is empty or all ASCII whitespace.
bool is_blank(std::string_view text);

// Whitespace-delimited tokens, no normalization.
std::vector<std::string> whitespace_tokens(std::string_view text);

// Removes every URL: a http:// or https:// prefix through the next
// whitespace (exclusive). The surrounding whitespace is kept.
std::string strip_urls(std::string_view text);

// Case-insensitive (ASCII) substring test.
bool contains_ci(std::string_view haystack, std::string_view needle);

// Seeded FNV-1a over the raw bytes. Stable across platforms and runs.
std::uint64_t hash64(std::string_view bytes, std::uint64_t seed);

// Truncates to at most max_scalars Unicode scalars, backing up to the last
// whitespace so the cut lands on a word boundary when one exists. Trailing
// whitespace is trimmed. Sets *truncated when the cap was hit.
std::string truncate_words(std::string_view text, std::size_t max_scalars, bool* truncated);

}  // namespace skeetrl
