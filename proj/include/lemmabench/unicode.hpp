#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace lemmabench::unicode {

// Invalid UTF-8 sequences decode to U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);

std::string nfc(std::string_view utf8);
bool is_nfc(std::string_view utf8);

/// Simple (one-to-one) case mapping of a single code point.
char32_t to_lower(char32_t c);
char32_t to_upper(char32_t c);

/// Full Unicode case folding, used for case-insensitive lookup keys.
std::string fold_case(std::string_view utf8);

/// Number of code points.
std::size_t length(std::string_view utf8);

/// Levenshtein distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

}  // namespace lemmabench::unicode
