// Sentiment word lexicon used by the sentence filter and as a tagger feature.

#ifndef WEAKTSA_LEXICON_H_
#define WEAKTSA_LEXICON_H_

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "weaktsa/text.h"

namespace weaktsa {

class LexiconError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Case-folded word -> score in [-1, 1].  Only words with |score| above the
// load threshold are stored.
class SentimentLexicon {
 public:
  SentimentLexicon() = default;

  // Rows are "word<TAB>score"; blank lines and lines starting with '#' are
  // skipped.  A duplicate word keeps the entry with the larger |score|.
  // Throws LexiconError naming the row on a bad score, and when nothing
  // survives the threshold.
  static SentimentLexicon load(const std::filesystem::path& path, double threshold);
  static SentimentLexicon parse(std::istream& in, double threshold);

  std::optional<double> score(std::string_view word) const;
  bool contains(std::string_view word) const { return score(word).has_value(); }

  std::size_t size() const { return entries_.size(); }
  double threshold() const { return threshold_; }
  const std::unordered_map<std::string, double>& entries() const { return entries_; }

 private:
  std::unordered_map<std::string, double> entries_;
  double threshold_ = 0.0;
};

// True iff some token, case-folded and stripped of punctuation, is a
// lexicon entry.
bool contains_sentiment_word(const SentimentLexicon& lexicon,
                             const std::vector<std::string>& tokens);
bool contains_sentiment_word(const SentimentLexicon& lexicon,
                             const std::vector<Token>& tokens);

}  // namespace weaktsa

#endif  // WEAKTSA_LEXICON_H_
