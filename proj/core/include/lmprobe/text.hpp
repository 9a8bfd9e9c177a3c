#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lmprobe {

// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string to_lower(std::string_view s);

// Trims and collapses every run of whitespace into one space.
std::string collapse_whitespace(std::string_view s);

// Lowercase + whitespace collapse. Used as the answer-matching key.
std::string normalize_phrase(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// A "letter" for word-boundary purposes: ASCII alpha or any non-ASCII byte
// (so UTF-8 letters are never treated as boundaries).
inline bool is_letter(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline bool is_ascii_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

// Position of the first case-insensitive occurrence of `needle` in
// `haystack` that is flanked by non-letters, or npos.
std::size_t find_word(std::string_view haystack, std::string_view needle,
                      std::size_t from = 0);

bool contains_word(std::string_view haystack, std::string_view needle);

std::string replace_all(std::string_view s, std::string_view from,
                        std::string_view to);

std::size_t count_occurrences(std::string_view s, std::string_view needle);

bool is_punctuation_token(std::string_view token);

std::string read_file(const std::string& path);

// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace lmprobe
