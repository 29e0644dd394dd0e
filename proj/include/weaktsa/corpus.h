// Review ingestion: load, filter, assign one domain per review, split into
// sentences, filter sentences, and emit the unlabeled sentence pool.

#ifndef WEAKTSA_CORPUS_H_
#define WEAKTSA_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "weaktsa/lexicon.h"
#include "weaktsa/sentence.h"

namespace weaktsa {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Review {
  std::string id;
  std::string business_id;
  std::string text;
  std::int64_t useful_count = 0;
  std::vector<std::string> categories;
};

struct LoadStats {
  std::size_t lines = 0;
  std::size_t loaded = 0;
  std::size_t malformed = 0;
  std::size_t unknown_business = 0;
};

// Streams reviews from a newline-delimited JSON file.  See load_reviews.
class ReviewReader {
 public:
  ReviewReader(const std::filesystem::path& reviews,
               const std::optional<std::filesystem::path>& business);

  std::optional<Review> next();
  const LoadStats& stats() const { return stats_; }

 private:
  std::ifstream in_;
  bool joined_;
  std::unordered_map<std::string, std::vector<std::string>> categories_;
  LoadStats stats_;
};

// Reads newline-delimited JSON reviews with fields text, useful and
// categories.  With a business file, categories come from the business
// record sharing the review's business_id instead (two-file join).
// Malformed lines are skipped and counted; an unreadable file throws.
// Categories may be a string array or a comma-separated string.
std::vector<Review> load_reviews(const std::filesystem::path& reviews,
                                 const std::optional<std::filesystem::path>& business,
                                 LoadStats* stats = nullptr);

// Parses one record; nullopt when malformed.  `fallback_id` is used when
// the record carries no review_id.
std::optional<Review> parse_review(std::string_view line, std::string fallback_id);

// Reviews rated not useful (useful == 0) or without categories are dropped.
bool keep_review(const Review& review);
std::vector<Review> filter_reviews(std::vector<Review> reviews);

// First entry of `ordered_domains` present among the review's categories
// (case-insensitive exact match), or "unassigned".
std::string assign_domain(const Review& review,
                          std::span<const std::string> ordered_domains);

// Rule-based split on terminal punctuation (. ! ?) with an abbreviation
// exception list.  Returned pieces are whitespace-trimmed slices.
std::vector<std::string> split_sentence_texts(std::string_view text);

// Splits a review; every sentence carries `domain` and the review id.
std::vector<Sentence> split_sentences(const Review& review, const std::string& domain);

inline constexpr std::size_t kMinSentenceWords = 10;
inline constexpr std::size_t kMaxSentenceWords = 50;

// 10 <= words <= 50 and at least one lexicon word.
bool keep_sentence(const Sentence& sentence, const SentimentLexicon& lexicon);
std::vector<Sentence> filter_sentences(std::vector<Sentence> sentences,
                                       const SentimentLexicon& lexicon);

std::map<std::string, std::size_t> domain_histogram(std::span<const Sentence> sentences);

// The 18 Yelp domains ordered by sentence count, most popular first.
const std::vector<std::string>& yelp_domains();

// One domain per line; '#' comments and blank lines ignored.
std::vector<std::string> load_domain_list(const std::filesystem::path& path);

struct IngestConfig {
  std::filesystem::path reviews;
  std::optional<std::filesystem::path> business;
  std::vector<std::string> domains;
  std::size_t max_sentences = 0;  // 0 keeps everything
  std::uint64_t seed = 0;
};

struct IngestStats {
  LoadStats load;
  std::size_t reviews_kept = 0;
  std::size_t reviews_unassigned = 0;
  std::size_t sentences_split = 0;
  std::size_t sentences_kept = 0;
  std::size_t sentences_emitted = 0;
};

// Full ingestion.  When max_sentences is set, whole reviews are sampled
// (seeded priority reservoir) until the cap is reached; the output keeps
// input order.
std::vector<Sentence> ingest(const IngestConfig& config, const SentimentLexicon& lexicon,
                             IngestStats* stats = nullptr);

// Sentence pool files: one JSON record per line with text, tokens, domain,
// review_id, index.
void write_sentence_pool(const std::filesystem::path& path,
                         std::span<const Sentence> sentences);
std::vector<Sentence> read_sentence_pool(const std::filesystem::path& path);

}  // namespace weaktsa

#endif  // WEAKTSA_CORPUS_H_
