#include "weaktsa/sentence.h"

namespace weaktsa {

std::vector<std::string> Sentence::words() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

Sentence make_sentence(std::string text, std::string domain, std::string review_id,
                       std::size_t index) {
  Sentence s;
  s.tokens = tokenize(text);
  s.text = std::move(text);
  s.domain = std::move(domain);
  s.id = {std::move(review_id), index};
  return s;
}

}  // namespace weaktsa
