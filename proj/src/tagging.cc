#include "weaktsa/tagging.h"

#include <algorithm>
#include <cmath>

namespace weaktsa {

std::string_view label_name(Label label) {
  switch (label) {
    case Label::kPos: return "P";
    case Label::kNeg: return "N";
    case Label::kNone: break;
  }
  return "O";
}

std::string_view polarity_name(Label polarity) {
  switch (polarity) {
    case Label::kPos: return "positive";
    case Label::kNeg: return "negative";
    case Label::kNone: break;
  }
  throw TaggingError("NONE is not a polarity");
}

Label parse_polarity(std::string_view name) {
  if (name == "positive") return Label::kPos;
  if (name == "negative") return Label::kNeg;
  throw TaggingError("unsupported polarity '" + std::string(name) + "'");
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kWeakTarget: return "weak-target";
    case Provenance::kWeakNone: return "weak-none";
    case Provenance::kLabeled: break;
  }
  return "labeled";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "labeled") return Provenance::kLabeled;
  if (name == "weak-target") return Provenance::kWeakTarget;
  if (name == "weak-none") return Provenance::kWeakNone;
  throw TaggingError("unknown provenance '" + std::string(name) + "'");
}

double TokenDistribution::prob(Label label) const {
  switch (label) {
    case Label::kPos: return pos;
    case Label::kNeg: return neg;
    case Label::kNone: break;
  }
  return none;
}

Label TokenDistribution::argmax() const {
  if (none >= pos && none >= neg) return Label::kNone;
  if (pos >= neg) return Label::kPos;
  return Label::kNeg;
}

bool TokenDistribution::valid(double tolerance) const {
  for (double p : {pos, neg, none})
    if (!(p >= 0.0 && p <= 1.0)) return false;
  return std::fabs(pos + neg + none - 1.0) <= tolerance;
}

TokenDistribution TokenDistribution::one_hot(Label label) {
  return {label == Label::kPos ? 1.0 : 0.0, label == Label::kNeg ? 1.0 : 0.0,
          label == Label::kNone ? 1.0 : 0.0};
}

bool PieceAlignment::valid() const {
  if (piece_distributions.size() != piece_to_word.size()) return false;
  if (piece_to_word.empty()) return true;
  if (piece_to_word.front() != 0) return false;
  for (std::size_t i = 1; i < piece_to_word.size(); ++i) {
    auto step = piece_to_word[i] - piece_to_word[i - 1];
    if (piece_to_word[i] < piece_to_word[i - 1] || step > 1) return false;
  }
  return true;
}

std::string span_surface(const Sentence& sentence, const TargetSpan& span) {
  if (span.start >= span.end || span.end > sentence.tokens.size()) return {};
  auto begin = sentence.tokens[span.start].begin;
  auto end = sentence.tokens[span.end - 1].end;
  return sentence.text.substr(begin, end - begin);
}

void check_spans(std::span<const TargetSpan> spans, std::size_t sentence_length) {
  std::vector<const TargetSpan*> sorted;
  for (const auto& s : spans) {
    if (s.start >= s.end || s.end > sentence_length)
      throw TaggingError("span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                         ") outside sentence of length " + std::to_string(sentence_length));
    if (s.polarity == Label::kNone) throw TaggingError("span with NONE polarity");
    sorted.push_back(&s);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const TargetSpan* a, const TargetSpan* b) { return a->start < b->start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const auto& prev = *sorted[i - 1];
    const auto& cur = *sorted[i];
    if (cur.start < prev.end)
      throw TaggingError("overlapping spans at word " + std::to_string(cur.start));
    if (cur.start == prev.end && cur.polarity == prev.polarity)
      throw TaggingError("adjacent spans with the same polarity at word " +
                         std::to_string(cur.start) + " cannot be encoded with IO labels");
  }
}

std::vector<Label> encode_labels(std::span<const TargetSpan> spans,
                                 std::size_t sentence_length) {
  check_spans(spans, sentence_length);
  std::vector<Label> labels(sentence_length, Label::kNone);
  for (const auto& s : spans)
    std::fill(labels.begin() + static_cast<std::ptrdiff_t>(s.start),
              labels.begin() + static_cast<std::ptrdiff_t>(s.end), s.polarity);
  return labels;
}

std::vector<Label> encode_labels(const LabeledSentence& labeled) {
  return encode_labels(labeled.gold, labeled.sentence.size());
}

std::vector<TokenDistribution> merge_word_pieces(const PieceAlignment& alignment) {
  if (!alignment.valid()) throw TaggingError("invalid piece alignment");
  std::vector<TokenDistribution> words;
  std::vector<bool> has_sentiment;
  for (std::size_t i = 0; i < alignment.piece_to_word.size(); ++i) {
    const auto word = alignment.piece_to_word[i];
    const auto& piece = alignment.piece_distributions[i];
    const bool sentiment = piece.argmax() != Label::kNone;
    if (word == words.size()) {
      words.push_back(piece);
      has_sentiment.push_back(sentiment);
    } else if (sentiment && !has_sentiment[word]) {
      words[word] = piece;
      has_sentiment[word] = true;
    }
  }
  return words;
}

std::vector<Label> argmax_labels(std::span<const TokenDistribution> words) {
  std::vector<Label> labels;
  labels.reserve(words.size());
  for (const auto& d : words) labels.push_back(d.argmax());
  return labels;
}

std::vector<TargetSpan> decode_spans(std::span<const TokenDistribution> words) {
  std::vector<TargetSpan> spans;
  std::size_t i = 0;
  while (i < words.size()) {
    const Label label = words[i].argmax();
    if (label == Label::kNone) {
      ++i;
      continue;
    }
    TargetSpan span{i, i, label, 1.0, {}};
    while (i < words.size() && words[i].argmax() == label) {
      span.confidence = std::min(span.confidence, words[i].prob(label));
      ++i;
    }
    span.end = i;
    spans.push_back(std::move(span));
  }
  return spans;
}

std::vector<TargetSpan> spans_from_labels(std::span<const Label> labels) {
  std::vector<TokenDistribution> one_hot;
  one_hot.reserve(labels.size());
  for (Label l : labels) one_hot.push_back(TokenDistribution::one_hot(l));
  return decode_spans(one_hot);
}

}  // namespace weaktsa
