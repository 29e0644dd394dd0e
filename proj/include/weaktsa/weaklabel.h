// Weak-label selection: turns predictions on the unlabeled pool into a
// training set of confident targets plus explicit no-target sentences,
// capped per domain.

#ifndef WEAKTSA_WEAKLABEL_H_
#define WEAKTSA_WEAKLABEL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "weaktsa/tagging.h"

namespace weaktsa {

struct SelectionConfig {
  double target_high = 0.9;         // kept targets need S > target_high
  double target_low = 0.5;          // every other span needs S <= target_low
  double non_target_fraction = 0.1; // share of the pool eligible as non-targets
  std::size_t per_domain_cap = 20000;
  std::uint64_t rng_seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static SelectionConfig from_json(const nlohmann::json& j);
};

struct Prediction {
  Sentence sentence;
  std::vector<TargetSpan> spans;
};

struct WeakLabeledSet {
  std::vector<Prediction> target_part;     // only spans with S > target_high
  std::vector<Sentence> non_target_part;   // all tokens NONE
};

// Sentences with at least one span above target_high and every other span
// at or below target_low; the low spans are discarded.
std::vector<Prediction> select_targets(std::span<const Prediction> predictions,
                                       const SelectionConfig& config);

// The sorted indices of the ceil(non_target_fraction * n) sampled predictions.
std::vector<std::size_t> non_target_sample(std::size_t n, const SelectionConfig& config);

// Draws ceil(non_target_fraction * N) sentences uniformly from all
// predictions, then keeps those without spans or with all spans at or
// below target_low.
std::vector<Sentence> select_non_targets(std::span<const Prediction> predictions,
                                         const SelectionConfig& config);

// Keeps at most per_domain_cap items per domain by seeded sampling without
// replacement.  `stream` separates the random streams of the two parts.
// Surviving items keep their input order.
template <typename T, typename DomainOf>
std::vector<T> balance_domains(std::vector<T> items, const SelectionConfig& config,
                               std::string_view stream, DomainOf domain_of);

std::vector<Prediction> balance_domains(std::vector<Prediction> part,
                                        const SelectionConfig& config);
std::vector<Sentence> balance_domains(std::vector<Sentence> part, const SelectionConfig& config);

struct DomainSelectionStats {
  std::size_t predicted = 0;
  std::size_t target_candidates = 0;
  std::size_t target_kept = 0;
  std::size_t weak_labels = 0;
  std::size_t non_target_sampled = 0;
  std::size_t non_target_candidates = 0;
  std::size_t non_target_kept = 0;
};

struct SelectionStats {
  std::map<std::string, DomainSelectionStats> per_domain;
  nlohmann::json to_json() const;
};

// select_targets + select_non_targets + balance_domains on each part.
WeakLabeledSet build_weak_set(std::span<const Prediction> predictions,
                              const SelectionConfig& config, SelectionStats* stats = nullptr);

// Labeled data, then weak target sentences, then weak no-target sentences.
std::vector<LabeledSentence> merge_training_set(std::span<const LabeledSentence> labeled,
                                                const WeakLabeledSet& weak);

// Weak sets are stored in the labeled-sentence format with provenance and
// confidence fields.
void write_weak_set(const std::filesystem::path& path, const WeakLabeledSet& weak);
WeakLabeledSet read_weak_set(const std::filesystem::path& path);

// --- implementation -------------------------------------------------------

std::uint64_t balance_seed(const SelectionConfig& config, std::string_view stream,
                           const std::string& domain);
std::vector<std::size_t> sample_for_cap(std::size_t available, std::size_t cap,
                                        std::uint64_t seed);

template <typename T, typename DomainOf>
std::vector<T> balance_domains(std::vector<T> items, const SelectionConfig& config,
                               std::string_view stream, DomainOf domain_of) {
  std::map<std::string, std::vector<std::size_t>> by_domain;
  for (std::size_t i = 0; i < items.size(); ++i) by_domain[domain_of(items[i])].push_back(i);
  std::vector<char> keep(items.size(), 0);
  for (const auto& [domain, positions] : by_domain) {
    for (auto k : sample_for_cap(positions.size(), config.per_domain_cap,
                                 balance_seed(config, stream, domain)))
      keep[positions[k]] = 1;
  }
  std::vector<T> out;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (keep[i]) out.push_back(std::move(items[i]));
  return out;
}

}  // namespace weaktsa

#endif  // WEAKTSA_WEAKLABEL_H_
