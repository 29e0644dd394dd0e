#ifndef WEAKTSA_SENTENCE_H_
#define WEAKTSA_SENTENCE_H_

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "weaktsa/text.h"

namespace weaktsa {

inline constexpr std::string_view kUnassignedDomain = "unassigned";

// Identity of a sentence across files: its review and position in it.
struct SentenceId {
  std::string review_id;
  std::size_t index = 0;

  auto operator<=>(const SentenceId&) const = default;
  std::string str() const { return review_id + "#" + std::to_string(index); }
};

struct Sentence {
  std::string text;
  std::vector<Token> tokens;
  std::string domain{kUnassignedDomain};
  SentenceId id;

  std::size_t size() const { return tokens.size(); }
  std::vector<std::string> words() const;
};

// Builds a sentence, tokenizing its text.
Sentence make_sentence(std::string text, std::string domain, std::string review_id,
                       std::size_t index);

}  // namespace weaktsa

#endif  // WEAKTSA_SENTENCE_H_
