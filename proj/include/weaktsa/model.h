// Trained tagger models and the backends that produce them.  A model maps
// sentences to word-level label distributions; span prediction is shared.

#ifndef WEAKTSA_MODEL_H_
#define WEAKTSA_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "weaktsa/tagging.h"

namespace weaktsa {

class TaggerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training hyperparameters.  learning_rate and adam_epsilon are forwarded
// to external taggers; the built-in baseline uses baseline_learning_rate
// and l2 instead.  batch_size, max_epochs, min_delta and patience apply to
// both.
struct TrainConfig {
  double learning_rate = 3e-5;
  double adam_epsilon = 1e-8;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 15;
  double min_delta = 0.005;
  double dev_fraction = 0.2;
  std::size_t patience = 2;
  double baseline_learning_rate = 1.0;
  double l2 = 1e-5;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

class TaggerModel {
 public:
  virtual ~TaggerModel() = default;

  virtual std::string_view kind() const = 0;
  virtual std::uint64_t training_seed() const = 0;

  // One distribution per word token of every sentence.
  virtual std::vector<std::vector<TokenDistribution>> distributions(
      std::span<const Sentence> sentences) const = 0;

  virtual void save(const std::filesystem::path& path) const = 0;

  // Decoded spans, with surface text filled in.
  std::vector<std::vector<TargetSpan>> predict(std::span<const Sentence> sentences) const;
};

class TaggerBackend {
 public:
  virtual ~TaggerBackend() = default;

  virtual std::string_view kind() const = 0;

  // Throws TaggerError when train is empty.  An empty dev set trains for
  // max_epochs without early stopping.
  virtual std::unique_ptr<TaggerModel> train(std::span<const LabeledSentence> train,
                                             std::span<const LabeledSentence> dev,
                                             const TrainConfig& config,
                                             std::uint64_t seed) = 0;

  virtual std::unique_ptr<TaggerModel> load(const std::filesystem::path& path) = 0;
};

// Micro-averaged token F1 where POS and NEG are the positive classes: a
// token is a true positive iff predicted == gold != NONE.
double token_f1(std::span<const std::vector<Label>> predicted,
                std::span<const std::vector<Label>> gold);

// token_f1 of the model's argmax labels on a dev set.
double token_f1(const TaggerModel& model, std::span<const LabeledSentence> dev);

// Predicts in chunks across `workers` threads; results keep input order.
std::vector<std::vector<TargetSpan>> predict_parallel(const TaggerModel& model,
                                                      std::span<const Sentence> sentences,
                                                      std::size_t workers);

}  // namespace weaktsa

#endif  // WEAKTSA_MODEL_H_
