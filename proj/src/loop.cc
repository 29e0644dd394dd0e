#include "weaktsa/loop.h"

#include <cmath>
#include <tuple>
#include <fstream>

#include "weaktsa/baseline.h"
#include "weaktsa/log.h"
#include "weaktsa/random.h"

namespace weaktsa {

using nlohmann::json;
namespace fs = std::filesystem;

void LoopConfig::validate() const {
  selection.validate();
  train.validate();
  if (workers == 0) throw std::invalid_argument("workers must be >= 1");
}

json LoopConfig::to_json() const {
  return {{"iterations", iterations},
          {"selection", selection.to_json()},
          {"train", train.to_json()},
          {"seed", seed},
          {"dev_from_labeled_only", dev_from_labeled_only}};
}

LoopConfig LoopConfig::from_json(const json& j) {
  LoopConfig c;
  c.iterations = j.value("iterations", c.iterations);
  if (j.contains("selection")) c.selection = SelectionConfig::from_json(j["selection"]);
  if (j.contains("train")) c.train = TrainConfig::from_json(j["train"]);
  c.seed = j.value("seed", c.seed);
  c.dev_from_labeled_only = j.value("dev_from_labeled_only", c.dev_from_labeled_only);
  return c;
}

std::pair<std::vector<LabeledSentence>, std::vector<LabeledSentence>> split_dev(
    std::span<const LabeledSentence> labeled, double fraction, std::uint64_t seed) {
  const std::size_t n = labeled.size();
  if (n < 2) throw std::invalid_argument("split_dev needs at least 2 sentences");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("dev fraction must be in (0, 1)");
  auto dev_size = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  dev_size = std::min(dev_size, n - 1);
  Rng rng(seed);
  auto dev_idx = rng.sample_indices(n, dev_size);
  std::vector<LabeledSentence> train, dev;
  train.reserve(n - dev_size);
  dev.reserve(dev_size);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (next < dev_idx.size() && dev_idx[next] == i) {
      dev.push_back(labeled[i]);
      ++next;
    } else {
      train.push_back(labeled[i]);
    }
  }
  return {std::move(train), std::move(dev)};
}

namespace {

fs::path iteration_dir(const fs::path& root, std::size_t k) {
  return root / ("iter_" + std::to_string(k));
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return json::parse(in);
}

json summary_json(const IterationArtifact& a) {
  return {{"iteration", a.iteration},
          {"train_size", a.train_size},
          {"dev_size", a.dev_size},
          {"weak_target", a.weak_target},
          {"weak_none", a.weak_none},
          {"dev_trace", a.dev_trace},
          {"dev_token_f1", a.dev_token_f1}};
}

IterationArtifact artifact_from_disk(const fs::path& dir) {
  json s = read_json(dir / "summary.json");
  IterationArtifact a;
  a.iteration = s.at("iteration").get<std::size_t>();
  a.train_size = s.at("train_size").get<std::size_t>();
  a.dev_size = s.at("dev_size").get<std::size_t>();
  a.weak_target = s.at("weak_target").get<std::size_t>();
  a.weak_none = s.at("weak_none").get<std::size_t>();
  a.dev_trace = s.at("dev_trace").get<std::vector<double>>();
  a.dev_token_f1 = s.at("dev_token_f1").get<double>();
  a.model_path = dir / "model.json";
  if (fs::exists(dir / "weak.jsonl")) {
    a.weak_set_path = dir / "weak.jsonl";
    a.selection_stats = read_json(dir / "selection.json");
  }
  return a;
}

}  // namespace

std::unique_ptr<TaggerModel> train_iteration(std::span<const LabeledSentence> labeled,
                                             const WeakLabeledSet* weak, const LoopConfig& config,
                                             std::size_t iteration, TaggerBackend& backend,
                                             IterationArtifact* artifact) {
  const std::uint64_t split_seed = derive_seed(config.seed, "loop.split", iteration);
  const std::uint64_t train_seed = derive_seed(config.seed, "loop.train", iteration);
  const WeakLabeledSet empty;
  const WeakLabeledSet& extra = weak ? *weak : empty;

  std::vector<LabeledSentence> train, dev;
  if (config.dev_from_labeled_only) {
    auto [ld_train, ld_dev] = split_dev(labeled, config.train.dev_fraction, split_seed);
    train = merge_training_set(ld_train, extra);
    dev = std::move(ld_dev);
  } else {
    auto merged = merge_training_set(labeled, extra);
    std::tie(train, dev) = split_dev(merged, config.train.dev_fraction, split_seed);
  }
  log::info("iteration ", iteration, ": training on ", train.size(), " sentences (dev ",
            dev.size(), ")");
  auto model = backend.train(train, dev, config.train, train_seed);
  if (artifact) {
    artifact->iteration = iteration;
    artifact->train_size = train.size();
    artifact->dev_size = dev.size();
    artifact->weak_target = extra.target_part.size();
    artifact->weak_none = extra.non_target_part.size();
    if (auto* baseline = dynamic_cast<const BaselineModel*>(model.get()))
      artifact->dev_trace = baseline->trace().dev_f1;
    artifact->dev_token_f1 = dev.empty() ? 0.0 : token_f1(*model, dev);
  }
  return model;
}

std::vector<Prediction> predict_pool(const TaggerModel& model, std::span<const Sentence> pool,
                                     std::size_t workers) {
  auto spans = predict_parallel(model, pool, workers);
  std::vector<Prediction> out;
  out.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) out.push_back({pool[i], std::move(spans[i])});
  return out;
}

std::size_t completed_iterations(const fs::path& artifact_dir) {
  std::size_t k = 0;
  while (fs::exists(iteration_dir(artifact_dir, k) / "DONE")) ++k;
  return k;
}

LoopResult run_self_training(std::span<const LabeledSentence> labeled,
                             std::span<const Sentence> pool, const LoopConfig& config,
                             TaggerBackend& backend) {
  config.validate();
  if (labeled.empty()) throw std::invalid_argument("run_self_training: no labeled data");
  if (config.artifact_dir.empty()) throw std::invalid_argument("run_self_training: no artifact_dir");
  fs::create_directories(config.artifact_dir);

  const json config_json = config.to_json();
  const fs::path config_path = config.artifact_dir / "config.json";
  std::size_t done = completed_iterations(config.artifact_dir);
  if (done > 0) {
    if (!fs::exists(config_path) || read_json(config_path) != config_json)
      throw std::runtime_error("artifact dir " + config.artifact_dir.string() +
                               " holds a run with a different configuration");
  } else {
    write_json(config_path, config_json);
  }
  done = std::min(done, config.iterations + 1);

  LoopResult result;
  result.resumed_iterations = done;
  std::unique_ptr<TaggerModel> model;
  for (std::size_t k = 0; k < done; ++k)
    result.artifacts.push_back(artifact_from_disk(iteration_dir(config.artifact_dir, k)));
  if (done > 0) {
    const fs::path last = iteration_dir(config.artifact_dir, done - 1);
    log::info("resuming after iteration ", done - 1);
    if (backend.kind() == "external") {
      // External weights live in the tagger process; rebuild from inputs.
      std::unique_ptr<WeakLabeledSet> weak;
      if (done - 1 > 0) weak = std::make_unique<WeakLabeledSet>(read_weak_set(last / "weak.jsonl"));
      model = train_iteration(labeled, weak.get(), config, done - 1, backend);
    } else {
      model = backend.load(last / "model.json");
    }
  }

  for (std::size_t k = done; k <= config.iterations; ++k) {
    const fs::path dir = iteration_dir(config.artifact_dir, k);
    fs::create_directories(dir);
    IterationArtifact artifact;
    std::unique_ptr<WeakLabeledSet> weak;
    SelectionStats stats;
    if (k > 0) {
      log::info("iteration ", k, ": predicting on ", pool.size(), " pool sentences");
      auto predictions = predict_pool(*model, pool, config.workers);
      SelectionConfig selection = config.selection;
      selection.rng_seed = derive_seed(config.seed, "loop.select", k);
      weak = std::make_unique<WeakLabeledSet>(build_weak_set(predictions, selection, &stats));
      log::info("iteration ", k, ": ", weak->target_part.size(), " target sentences, ",
                weak->non_target_part.size(), " no-target sentences selected");
      write_weak_set(dir / "weak.jsonl", *weak);
      write_json(dir / "selection.json", stats.to_json());
      artifact.weak_set_path = dir / "weak.jsonl";
      artifact.selection_stats = stats.to_json();
    }
    model = train_iteration(labeled, weak.get(), config, k, backend, &artifact);
    artifact.model_path = dir / "model.json";
    model->save(artifact.model_path);
    write_json(dir / "summary.json", summary_json(artifact));
    std::ofstream(dir / "DONE") << "ok\n";
    result.artifacts.push_back(std::move(artifact));
  }
  result.model = std::move(model);
  return result;
}

}  // namespace weaktsa
