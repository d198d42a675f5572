#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace narravine::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Strips leading/trailing ASCII punctuation (quotes, commas, dashes...).
std::string trim_punct(std::string_view token);

// Whitespace tokens that still hold something after punctuation trimming.
// These are the units counted against the prompt word limits.
std::vector<std::string> word_tokens(std::string_view s);

int count_words(std::string_view s);

// Keeps the first `max_words` counted tokens, original spelling preserved.
std::string truncate_words(std::string_view s, int max_words);

// Case-insensitive whole-word match; a trailing plural "s" and hyphen or
// slash compounds ("sticker-like") also match.
bool contains_word(std::string_view s, std::string_view word);
bool contains_any_word(std::string_view s, std::span<const std::string> words);

// Drops every token that matches one of `words` under contains_word rules.
std::string remove_words(std::string_view s, std::span<const std::string> words);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace narravine::text
