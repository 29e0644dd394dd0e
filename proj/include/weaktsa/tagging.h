// IO tagging scheme: per-word labels POS / NEG / NONE, sub-word merging, and
// span decoding with a per-span confidence.

#ifndef WEAKTSA_TAGGING_H_
#define WEAKTSA_TAGGING_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "weaktsa/sentence.h"

namespace weaktsa {

enum class Label : std::uint8_t { kNone = 0, kPos = 1, kNeg = 2 };

inline constexpr std::size_t kNumLabels = 3;

std::string_view label_name(Label label);        // "O", "P", "N"
std::string_view polarity_name(Label polarity);  // "positive", "negative"
Label parse_polarity(std::string_view name);     // throws on anything else

class TaggingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Softmax output for one token.  Probabilities sum to 1.
struct TokenDistribution {
  double pos = 0.0;
  double neg = 0.0;
  double none = 1.0;

  double prob(Label label) const;
  // Exact ties resolve NONE > POS > NEG.
  Label argmax() const;
  bool valid(double tolerance = 1e-6) const;

  static TokenDistribution one_hot(Label label);
  static TokenDistribution uniform() { return {1.0 / 3, 1.0 / 3, 1.0 / 3}; }
};

// Piece-level distributions with the word each piece belongs to.
struct PieceAlignment {
  std::vector<TokenDistribution> piece_distributions;
  std::vector<std::size_t> piece_to_word;

  // Non-decreasing, starts at 0, no gaps, same length as distributions.
  bool valid() const;
};

// Half-open word range [start, end) with polarity and confidence.
struct TargetSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  Label polarity = Label::kPos;
  double confidence = 1.0;
  std::string surface;

  std::size_t length() const { return end - start; }
  bool same_target(const TargetSpan& other) const {
    return start == other.start && end == other.end && polarity == other.polarity;
  }
};

enum class Provenance : std::uint8_t { kLabeled, kWeakTarget, kWeakNone };

std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view name);

struct LabeledSentence {
  Sentence sentence;
  std::vector<TargetSpan> gold;
  Provenance provenance = Provenance::kLabeled;
};

// Text covered by a span, from the first token's begin to the last token's end.
std::string span_surface(const Sentence& sentence, const TargetSpan& span);

// Throws TaggingError for spans that are empty, out of range, overlapping,
// or adjacent with the same polarity (indistinguishable under IO labels).
void check_spans(std::span<const TargetSpan> spans, std::size_t sentence_length);

std::vector<Label> encode_labels(std::span<const TargetSpan> spans,
                                 std::size_t sentence_length);
std::vector<Label> encode_labels(const LabeledSentence& labeled);

// Each word takes the distribution of its first piece whose argmax is POS
// or NEG, or of its first piece when none is.
std::vector<TokenDistribution> merge_word_pieces(const PieceAlignment& alignment);

// Maximal runs of equal POS/NEG argmax labels become spans, left to right.
// Confidence is the minimum probability of the run's label over the run.
std::vector<TargetSpan> decode_spans(std::span<const TokenDistribution> words);

std::vector<Label> argmax_labels(std::span<const TokenDistribution> words);

// Spans for a label sequence (confidence 1).
std::vector<TargetSpan> spans_from_labels(std::span<const Label> labels);

}  // namespace weaktsa

#endif  // WEAKTSA_TAGGING_H_
