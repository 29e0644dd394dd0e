#include "weaktsa/text.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace weaktsa {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_punct(unsigned char c) {
  return c < 0x80 && std::ispunct(c);
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    if (i == n) break;
    std::size_t chunk_end = i;
    while (chunk_end < n && !is_space(text[chunk_end])) ++chunk_end;

    std::size_t core_begin = i;
    while (core_begin < chunk_end && is_punct(text[core_begin])) ++core_begin;
    std::size_t core_end = chunk_end;
    while (core_end > core_begin && is_punct(text[core_end - 1])) --core_end;

    for (std::size_t p = i; p < core_begin; ++p)
      tokens.push_back({std::string(1, text[p]), p, p + 1});
    if (core_end > core_begin)
      tokens.push_back({std::string(text.substr(core_begin, core_end - core_begin)),
                        core_begin, core_end});
    for (std::size_t p = std::max(core_end, core_begin); p < chunk_end; ++p)
      tokens.push_back({std::string(1, text[p]), p, p + 1});
    i = chunk_end;
  }
  return tokens;
}

std::string case_fold(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view strip_punct(std::string_view s) {
  while (!s.empty() && is_punct(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_punct(s.back())) s.remove_suffix(1);
  return s;
}

bool is_word(std::string_view token) { return !strip_punct(token).empty(); }

std::size_t word_count(const std::vector<Token>& tokens) {
  return static_cast<std::size_t>(std::count_if(
      tokens.begin(), tokens.end(), [](const Token& t) { return is_word(t.text); }));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

CodepointIndex::CodepointIndex(std::string_view utf8) {
  for (std::size_t b = 0; b < utf8.size(); ++b) {
    // continuation bytes are 10xxxxxx
    if ((static_cast<unsigned char>(utf8[b]) & 0xC0) != 0x80) byte_of_.push_back(b);
  }
  byte_of_.push_back(utf8.size());
}

std::size_t CodepointIndex::to_byte(std::size_t codepoint) const {
  if (codepoint >= byte_of_.size())
    throw std::out_of_range("character offset " + std::to_string(codepoint) +
                            " past end of text");
  return byte_of_[codepoint];
}

std::size_t CodepointIndex::to_codepoint(std::size_t byte) const {
  auto it = std::lower_bound(byte_of_.begin(), byte_of_.end(), byte);
  return static_cast<std::size_t>(it - byte_of_.begin());
}

}  // namespace weaktsa
