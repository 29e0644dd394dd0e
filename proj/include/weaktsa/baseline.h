// Built-in baseline tagger: a per-token softmax classifier over sparse
// lexical features, trained with mini-batch AdaGrad on cross-entropy plus L2.

#ifndef WEAKTSA_BASELINE_H_
#define WEAKTSA_BASELINE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "weaktsa/lexicon.h"
#include "weaktsa/model.h"

namespace weaktsa {

// Lexicon score buckets used as features: -2, -1, 0 (absent), 1, 2.
int lexicon_bucket(std::optional<double> score);

// Feature strings for token `i`: bias, word, folded word, lexicon bucket,
// neighbouring words and their buckets, capitalization, 3-char suffix.
std::vector<std::string> token_features(const Sentence& sentence, std::size_t i,
                                        const std::map<std::string, int>& buckets);

class BaselineModel final : public TaggerModel {
 public:
  struct TrainingTrace {
    std::vector<double> dev_f1;  // one entry per completed epoch
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;  // 1-based; 0 when trained without dev
  };

  BaselineModel(std::vector<std::string> features, std::vector<double> weights,
                std::map<std::string, int> buckets, std::uint64_t seed, TrainingTrace trace);

  std::string_view kind() const override { return "baseline"; }
  std::uint64_t training_seed() const override { return seed_; }

  std::vector<std::vector<TokenDistribution>> distributions(
      std::span<const Sentence> sentences) const override;
  std::vector<TokenDistribution> distributions(const Sentence& sentence) const;

  void save(const std::filesystem::path& path) const override;
  static std::unique_ptr<BaselineModel> load(const std::filesystem::path& path);

  const TrainingTrace& trace() const { return trace_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t num_features() const { return features_.size(); }

 private:
  std::vector<std::string> features_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<double> weights_;  // kNumLabels per feature, label order NONE, POS, NEG
  std::map<std::string, int> buckets_;
  std::uint64_t seed_;
  TrainingTrace trace_;
};

class BaselineBackend final : public TaggerBackend {
 public:
  explicit BaselineBackend(std::shared_ptr<const SentimentLexicon> lexicon = nullptr);

  std::string_view kind() const override { return "baseline"; }

  std::unique_ptr<TaggerModel> train(std::span<const LabeledSentence> train,
                                     std::span<const LabeledSentence> dev,
                                     const TrainConfig& config, std::uint64_t seed) override;
  std::unique_ptr<TaggerModel> load(const std::filesystem::path& path) override;

  std::unique_ptr<BaselineModel> train_baseline(std::span<const LabeledSentence> train,
                                                std::span<const LabeledSentence> dev,
                                                const TrainConfig& config, std::uint64_t seed);

 private:
  std::map<std::string, int> buckets_;
};

}  // namespace weaktsa

#endif  // WEAKTSA_BASELINE_H_
