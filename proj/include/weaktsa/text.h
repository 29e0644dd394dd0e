// Word tokenization and the string helpers shared by the corpus, lexicon and
// tagger modules.

#ifndef WEAKTSA_TEXT_H_
#define WEAKTSA_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace weaktsa {

// A token with its byte range [begin, end) in the source text.
struct Token {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Splits on whitespace, then peels leading and trailing ASCII punctuation
// off every chunk as single-character tokens.  "car." -> "car", ".".
std::vector<Token> tokenize(std::string_view text);

// ASCII lower-casing; bytes outside ASCII pass through unchanged.
std::string case_fold(std::string_view s);

// Removes leading and trailing ASCII punctuation.
std::string_view strip_punct(std::string_view s);

// A word is a token that still has content after stripping punctuation.
bool is_word(std::string_view token);

std::size_t word_count(const std::vector<Token>& tokens);

std::string_view trim(std::string_view s);

// Maps between code point offsets (the unit used by character offsets in
// data files) and byte offsets of a UTF-8 string.
class CodepointIndex {
 public:
  explicit CodepointIndex(std::string_view utf8);

  std::size_t size() const { return byte_of_.size() - 1; }
  std::size_t to_byte(std::size_t codepoint) const;
  std::size_t to_codepoint(std::size_t byte) const;

 private:
  std::vector<std::size_t> byte_of_;  // size() + 1 entries
};

}  // namespace weaktsa

#endif  // WEAKTSA_TEXT_H_
