// Deterministic synthetic multi-domain corpora with planted targets.
//
// Every clause is "<background>* <sentiment> <target> <background>*" (target
// clause) or "<background>* <sentiment> <background>*" (no target).  Strong
// sentiment words (|score| >= 0.9) only occur in target clauses; weaker
// lexicon words occur in both.  Each domain has its own target and
// background vocabulary, so unseen domains are a real vocabulary shift.

#ifndef WEAKTSA_SYNTHKIT_H_
#define WEAKTSA_SYNTHKIT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "weaktsa/tagging.h"

namespace weaktsa {

struct SynthDomain {
  std::string name;
  std::vector<std::string> targets;     // may contain multi-word targets
  std::vector<std::string> background;  // domain-specific non-target words
};

struct SentimentWord {
  std::string word;
  double score = 0.0;
};

struct SynthSpec {
  std::vector<SynthDomain> domains;
  std::vector<SentimentWord> sentiment;          // lexicon words
  std::vector<SentimentWord> synonyms;           // out-of-lexicon (|score| below threshold)
  std::vector<std::string> background;           // shared filler words
  std::vector<std::string> labeled_domains;      // empty: the first two domains
  std::size_t labeled_sentences = 500;
  std::size_t pool_sentences = 20000;
  std::size_t test_sentences_per_domain = 300;
  double target_density = 0.5;      // chance a clause carries a target
  double second_clause = 0.2;       // chance of a second clause
  double domain_background = 0.9;   // chance a filler word is domain-specific
  double weak_target = 0.2;         // chance a target clause uses a weak word
  double noise = 0.1;               // chance a sentiment word becomes a synonym
  double strong_threshold = 0.9;    // |score| at or above: target clauses only
  std::size_t min_filler = 3;
  std::size_t max_filler = 7;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on vocabulary collisions or bad parameters.
  void validate() const;
  std::vector<std::string> seen_domains() const;

  nlohmann::json to_json() const;
  static SynthSpec from_json(const nlohmann::json& j);
  static SynthSpec default_spec();
};

struct SynthCorpus {
  std::vector<LabeledSentence> labeled;
  std::vector<Sentence> pool;
  std::vector<LabeledSentence> pool_gold;  // gold for the pool, diagnostics only
  std::vector<LabeledSentence> test;       // all domains, domain field set
};

SynthCorpus generate(const SynthSpec& spec);

// Writes labeled.jsonl, pool.jsonl, pool_gold.jsonl, test.jsonl,
// lexicon.tsv and spec.json into `dir`.
void write_corpus(const std::filesystem::path& dir, const SynthSpec& spec,
                  const SynthCorpus& corpus);

}  // namespace weaktsa

#endif  // WEAKTSA_SYNTHKIT_H_
