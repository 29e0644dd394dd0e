// Canonical labeled-sentence files: one JSON record per line,
//   {"review_id", "index", "text", "domain",
//    "targets": [{"start_char", "end_char", "polarity", "confidence"?}],
//    "provenance"?}
// Character offsets count Unicode code points.  Gold offsets are converted
// to word-token spans on load.

#ifndef WEAKTSA_DATASET_H_
#define WEAKTSA_DATASET_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "weaktsa/tagging.h"

namespace weaktsa {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetStats {
  std::size_t records = 0;
  std::size_t targets = 0;
  std::size_t dropped_polarity = 0;  // neutral / mixed / conflict
  std::size_t snapped = 0;           // boundary fell inside a token
  std::size_t dropped_empty = 0;     // covered no token
};

// Parses one record.  `fallback_id` names the sentence when the record has
// no review_id.
LabeledSentence parse_labeled(const nlohmann::json& record, const std::string& fallback_id,
                              DatasetStats* stats = nullptr);

std::vector<LabeledSentence> read_labeled(const std::filesystem::path& path,
                                          DatasetStats* stats = nullptr);

struct WriteOptions {
  bool confidence = false;
  bool provenance = false;
};

nlohmann::json labeled_to_json(const LabeledSentence& labeled, WriteOptions options = {});

void write_labeled(const std::filesystem::path& path,
                   std::span<const LabeledSentence> records, WriteOptions options = {});

// Converts a code-point range into the covering word-token span, snapping
// outward to token boundaries.  `snapped` is set when the range did not
// align.  Returns an empty span (start == end) when no token is covered.
TargetSpan char_range_to_span(const Sentence& sentence, std::size_t start_char,
                              std::size_t end_char, bool* snapped = nullptr);

}  // namespace weaktsa

#endif  // WEAKTSA_DATASET_H_
