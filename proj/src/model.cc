#include "weaktsa/model.h"

#include <algorithm>
#include <thread>

namespace weaktsa {

using nlohmann::json;

void TrainConfig::validate() const {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0))
    throw std::invalid_argument("dev_fraction must be in (0, 1)");
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (!(min_delta >= 0.0)) throw std::invalid_argument("min_delta must be >= 0");
  if (!(learning_rate > 0.0) || !(baseline_learning_rate > 0.0))
    throw std::invalid_argument("learning rates must be positive");
  if (!(l2 >= 0.0)) throw std::invalid_argument("l2 must be >= 0");
}

json TrainConfig::to_json() const {
  return {{"learning_rate", learning_rate},
          {"adam_epsilon", adam_epsilon},
          {"batch_size", batch_size},
          {"max_epochs", max_epochs},
          {"min_delta", min_delta},
          {"dev_fraction", dev_fraction},
          {"patience", patience},
          {"baseline_learning_rate", baseline_learning_rate},
          {"l2", l2}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.min_delta = j.value("min_delta", c.min_delta);
  c.dev_fraction = j.value("dev_fraction", c.dev_fraction);
  c.patience = j.value("patience", c.patience);
  c.baseline_learning_rate = j.value("baseline_learning_rate", c.baseline_learning_rate);
  c.l2 = j.value("l2", c.l2);
  c.validate();
  return c;
}

std::vector<std::vector<TargetSpan>> TaggerModel::predict(
    std::span<const Sentence> sentences) const {
  auto dists = distributions(sentences);
  std::vector<std::vector<TargetSpan>> out;
  out.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto spans = decode_spans(dists[i]);
    for (auto& s : spans) s.surface = span_surface(sentences[i], s);
    out.push_back(std::move(spans));
  }
  return out;
}

double token_f1(std::span<const std::vector<Label>> predicted,
                std::span<const std::vector<Label>> gold) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      const Label p = predicted[s][i];
      const Label g = gold[s][i];
      if (p != Label::kNone && p == g) {
        ++tp;
      } else {
        if (p != Label::kNone) ++fp;
        if (g != Label::kNone) ++fn;
      }
    }
  }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

double token_f1(const TaggerModel& model, std::span<const LabeledSentence> dev) {
  std::vector<Sentence> sentences;
  std::vector<std::vector<Label>> gold;
  sentences.reserve(dev.size());
  for (const auto& l : dev) {
    sentences.push_back(l.sentence);
    gold.push_back(encode_labels(l));
  }
  std::vector<std::vector<Label>> predicted;
  for (const auto& d : model.distributions(sentences)) predicted.push_back(argmax_labels(d));
  return token_f1(predicted, gold);
}

std::vector<std::vector<TargetSpan>> predict_parallel(const TaggerModel& model,
                                                      std::span<const Sentence> sentences,
                                                      std::size_t workers) {
  workers = std::max<std::size_t>(1, std::min(workers, sentences.size()));
  if (workers == 1) return model.predict(sentences);
  std::vector<std::vector<TargetSpan>> out(sentences.size());
  const std::size_t chunk = (sentences.size() + workers - 1) / workers;
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(sentences.size(), begin + chunk);
        if (begin >= end) return;
        auto part = model.predict(sentences.subspan(begin, end - begin));
        std::move(part.begin(), part.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace weaktsa
