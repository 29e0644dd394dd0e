// Self-training orchestration: train on labeled data, predict on the pool,
// select weak labels, retrain from scratch, repeat.  Every iteration is
// persisted before the next one starts, so an interrupted run resumes from
// its artifact directory.

#ifndef WEAKTSA_LOOP_H_
#define WEAKTSA_LOOP_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "weaktsa/model.h"
#include "weaktsa/weaklabel.h"

namespace weaktsa {

struct LoopConfig {
  std::size_t iterations = 3;  // 0 trains the labeled-data model only
  SelectionConfig selection;
  TrainConfig train;
  std::uint64_t seed = 0;
  std::filesystem::path artifact_dir;
  bool dev_from_labeled_only = false;
  std::size_t workers = 1;

  void validate() const;
  // Everything that affects results; workers and artifact_dir are excluded.
  nlohmann::json to_json() const;
  static LoopConfig from_json(const nlohmann::json& j);
};

// Seeded split at sentence level.  |dev| = round(fraction * N), clamped so
// that train keeps at least one sentence.  Throws for N < 2.
std::pair<std::vector<LabeledSentence>, std::vector<LabeledSentence>> split_dev(
    std::span<const LabeledSentence> labeled, double fraction, std::uint64_t seed);

struct IterationArtifact {
  std::size_t iteration = 0;
  std::filesystem::path model_path;
  std::filesystem::path weak_set_path;  // empty for iteration 0
  nlohmann::json selection_stats;       // null for iteration 0
  std::vector<double> dev_trace;
  double dev_token_f1 = 0.0;
  std::size_t train_size = 0;
  std::size_t dev_size = 0;
  std::size_t weak_target = 0;
  std::size_t weak_none = 0;
};

struct LoopResult {
  std::unique_ptr<TaggerModel> model;
  std::vector<IterationArtifact> artifacts;
  std::size_t resumed_iterations = 0;  // iterations reused from disk
};

// Splits, trains and returns the model for one iteration's training set
// using the seeds derived from (root seed, iteration).
std::unique_ptr<TaggerModel> train_iteration(std::span<const LabeledSentence> labeled,
                                             const WeakLabeledSet* weak, const LoopConfig& config,
                                             std::size_t iteration, TaggerBackend& backend,
                                             IterationArtifact* artifact = nullptr);

// Runs (or resumes) the loop.  Artifacts go to config.artifact_dir:
//   config.json, iter_<k>/{model.json, weak.jsonl, selection.json,
//   summary.json, DONE}.  A tagger failure aborts the run, leaving earlier
// iterations intact.
LoopResult run_self_training(std::span<const LabeledSentence> labeled,
                             std::span<const Sentence> pool, const LoopConfig& config,
                             TaggerBackend& backend);

// Number of leading iterations with a DONE marker.
std::size_t completed_iterations(const std::filesystem::path& artifact_dir);

std::vector<Prediction> predict_pool(const TaggerModel& model, std::span<const Sentence> pool,
                                     std::size_t workers);

}  // namespace weaktsa

#endif  // WEAKTSA_LOOP_H_
