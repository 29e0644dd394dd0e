#include "weaktsa/lexicon.h"

#include <charconv>
#include <cmath>
#include <fstream>

namespace weaktsa {
namespace {

double parse_score(std::string_view field, std::size_t row) {
  field = trim(field);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value))
    throw LexiconError("lexicon row " + std::to_string(row) +
                       ": non-numeric score '" + std::string(field) + "'");
  if (value < -1.0 || value > 1.0)
    throw LexiconError("lexicon row " + std::to_string(row) + ": score " +
                       std::string(field) + " outside [-1, 1]");
  return value;
}

}  // namespace

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path,
                                        double threshold) {
  std::ifstream in(path);
  if (!in) throw LexiconError("cannot open lexicon " + path.string());
  return parse(in, threshold);
}

SentimentLexicon SentimentLexicon::parse(std::istream& in, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw LexiconError("lexicon threshold must be in (0, 1]");
  SentimentLexicon lex;
  lex.threshold_ = threshold;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (trim(view).empty() || view.front() == '#') continue;
    auto tab = view.find('\t');
    if (tab == std::string_view::npos)
      throw LexiconError("lexicon row " + std::to_string(row) + ": expected word<TAB>score");
    std::string word = case_fold(trim(view.substr(0, tab)));
    double score = parse_score(view.substr(tab + 1), row);
    if (word.empty() || !(std::fabs(score) > threshold)) continue;
    auto [it, inserted] = lex.entries_.emplace(word, score);
    if (!inserted && std::fabs(score) > std::fabs(it->second)) it->second = score;
  }
  if (lex.entries_.empty())
    throw LexiconError("lexicon has no entries above threshold " + std::to_string(threshold));
  return lex;
}

std::optional<double> SentimentLexicon::score(std::string_view word) const {
  auto it = entries_.find(case_fold(strip_punct(word)));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool contains_sentiment_word(const SentimentLexicon& lexicon,
                             const std::vector<std::string>& tokens) {
  for (const auto& t : tokens)
    if (lexicon.contains(t)) return true;
  return false;
}

bool contains_sentiment_word(const SentimentLexicon& lexicon,
                             const std::vector<Token>& tokens) {
  for (const auto& t : tokens)
    if (lexicon.contains(t.text)) return true;
  return false;
}

}  // namespace weaktsa
