#include "narravine/common/text.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace narravine::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string_view> raw_tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool token_matches(std::string_view token, std::string_view word_lower) {
  auto t = to_lower(trim_punct(token));
  if (t.empty()) return false;
  std::string part;
  auto check = [&](const std::string& p) {
    return p == word_lower || p == std::string(word_lower) + "s" ||
           p == std::string(word_lower) + "es";
  };
  for (char c : t) {
    if (c == '-' || c == '/' || c == '\'') {
      if (check(trim_punct(part))) return true;
      part.clear();
    } else {
      part.push_back(c);
    }
  }
  return check(trim_punct(part));
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string trim_punct(std::string_view token) {
  std::size_t b = 0, e = token.size();
  while (b < e && is_punct(token[b])) ++b;
  while (e > b && is_punct(token[e - 1])) --e;
  return std::string(token.substr(b, e - b));
}

std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  for (auto tok : raw_tokens(s)) {
    auto t = trim_punct(tok);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

int count_words(std::string_view s) { return static_cast<int>(word_tokens(s).size()); }

std::string truncate_words(std::string_view s, int max_words) {
  std::string out;
  int kept = 0;
  for (auto tok : raw_tokens(s)) {
    if (trim_punct(tok).empty()) {
      // Bare punctuation rides along with the previous word.
      if (kept > 0 && kept <= max_words) out.append(" ").append(tok);
      continue;
    }
    if (kept == max_words) break;
    if (!out.empty()) out.push_back(' ');
    out.append(tok);
    ++kept;
  }
  return out;
}

bool contains_word(std::string_view s, std::string_view word) {
  auto w = to_lower(word);
  for (auto tok : raw_tokens(s)) {
    if (token_matches(tok, w)) return true;
  }
  return false;
}

bool contains_any_word(std::string_view s, std::span<const std::string> words) {
  return std::any_of(words.begin(), words.end(),
                     [&](const std::string& w) { return contains_word(s, w); });
}

std::string remove_words(std::string_view s, std::span<const std::string> words) {
  std::string out;
  for (auto tok : raw_tokens(s)) {
    bool drop = std::any_of(words.begin(), words.end(), [&](const std::string& w) {
      return token_matches(tok, to_lower(w));
    });
    if (drop) continue;
    if (!out.empty()) out.push_back(' ');
    out.append(tok);
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace narravine::text
