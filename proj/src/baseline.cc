#include "weaktsa/baseline.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "weaktsa/log.h"
#include "weaktsa/random.h"

namespace weaktsa {

using nlohmann::json;

namespace {

constexpr std::uint32_t kUnknown = std::numeric_limits<std::uint32_t>::max();

int bucket_of(const std::map<std::string, int>& buckets, std::string_view word) {
  auto it = buckets.find(case_fold(strip_punct(word)));
  return it == buckets.end() ? 0 : it->second;
}

std::array<double, kNumLabels> softmax(std::array<double, kNumLabels> scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double& s : scores) {
    s = std::exp(s - top);
    total += s;
  }
  for (double& s : scores) s /= total;
  return scores;
}

struct Encoded {
  std::vector<std::vector<std::uint32_t>> features;  // per token
  std::vector<Label> labels;
};

TokenDistribution to_distribution(const std::array<double, kNumLabels>& p) {
  return {p[static_cast<std::size_t>(Label::kPos)], p[static_cast<std::size_t>(Label::kNeg)],
          p[static_cast<std::size_t>(Label::kNone)]};
}

std::array<double, kNumLabels> score_token(const std::vector<double>& weights,
                                           const std::vector<std::uint32_t>& features) {
  std::array<double, kNumLabels> scores{};
  for (auto f : features) {
    if (f == kUnknown) continue;
    for (std::size_t k = 0; k < kNumLabels; ++k) scores[k] += weights[f * kNumLabels + k];
  }
  return scores;
}

double dev_token_f1(const std::vector<double>& weights, const std::vector<Encoded>& dev) {
  std::vector<std::vector<Label>> predicted, gold;
  predicted.reserve(dev.size());
  gold.reserve(dev.size());
  for (const auto& ex : dev) {
    std::vector<Label> labels;
    labels.reserve(ex.features.size());
    for (const auto& f : ex.features)
      labels.push_back(to_distribution(softmax(score_token(weights, f))).argmax());
    predicted.push_back(std::move(labels));
    gold.push_back(ex.labels);
  }
  return token_f1(predicted, gold);
}

}  // namespace

int lexicon_bucket(std::optional<double> score) {
  if (!score) return 0;
  if (*score >= 0.9) return 2;
  if (*score > 0.0) return 1;
  if (*score <= -0.9) return -2;
  if (*score < 0.0) return -1;
  return 0;
}

std::vector<std::string> token_features(const Sentence& sentence, std::size_t i,
                                        const std::map<std::string, int>& buckets) {
  const auto& tokens = sentence.tokens;
  const std::string& word = tokens[i].text;
  const std::string lower = case_fold(word);
  std::vector<std::string> f;
  f.reserve(11);
  f.emplace_back("b");
  f.push_back("w=" + word);
  f.push_back("lw=" + lower);
  f.push_back("lex=" + std::to_string(bucket_of(buckets, word)));
  if (i > 0) {
    f.push_back("pw=" + case_fold(tokens[i - 1].text));
    f.push_back("plex=" + std::to_string(bucket_of(buckets, tokens[i - 1].text)));
  } else {
    f.emplace_back("pw=<s>");
  }
  if (i + 1 < tokens.size()) {
    f.push_back("nw=" + case_fold(tokens[i + 1].text));
    f.push_back("nlex=" + std::to_string(bucket_of(buckets, tokens[i + 1].text)));
  } else {
    f.emplace_back("nw=</s>");
  }
  if (!word.empty() && word[0] >= 'A' && word[0] <= 'Z') f.emplace_back("cap");
  if (!is_word(word)) f.emplace_back("punct");
  f.push_back("suf=" + (lower.size() > 3 ? lower.substr(lower.size() - 3) : lower));
  return f;
}

BaselineModel::BaselineModel(std::vector<std::string> features, std::vector<double> weights,
                             std::map<std::string, int> buckets, std::uint64_t seed,
                             TrainingTrace trace)
    : features_(std::move(features)),
      weights_(std::move(weights)),
      buckets_(std::move(buckets)),
      seed_(seed),
      trace_(std::move(trace)) {
  if (weights_.size() != features_.size() * kNumLabels)
    throw TaggerError("baseline model: weight count does not match features");
  index_.reserve(features_.size());
  for (std::uint32_t i = 0; i < features_.size(); ++i) index_.emplace(features_[i], i);
}

std::vector<TokenDistribution> BaselineModel::distributions(const Sentence& sentence) const {
  std::vector<TokenDistribution> out;
  out.reserve(sentence.size());
  std::vector<std::uint32_t> ids;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    ids.clear();
    for (const auto& name : token_features(sentence, i, buckets_)) {
      auto it = index_.find(name);
      if (it != index_.end()) ids.push_back(it->second);
    }
    out.push_back(to_distribution(softmax(score_token(weights_, ids))));
  }
  return out;
}

std::vector<std::vector<TokenDistribution>> BaselineModel::distributions(
    std::span<const Sentence> sentences) const {
  std::vector<std::vector<TokenDistribution>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(distributions(s));
  return out;
}

void BaselineModel::save(const std::filesystem::path& path) const {
  json j = {{"kind", "baseline"},
            {"version", 1},
            {"seed", seed_},
            {"epochs_run", trace_.epochs_run},
            {"best_epoch", trace_.best_epoch},
            {"dev_f1", trace_.dev_f1},
            {"lexicon_buckets", buckets_},
            {"features", features_},
            {"weights", weights_}};
  std::ofstream out(path);
  if (!out) throw TaggerError("cannot write model " + path.string());
  out << j.dump() << '\n';
  if (!out) throw TaggerError("write failed for model " + path.string());
}

std::unique_ptr<BaselineModel> BaselineModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TaggerError("cannot open model " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw TaggerError("model " + path.string() + ": " + e.what());
  }
  if (j.value("kind", "") != "baseline")
    throw TaggerError("model " + path.string() + " is not a baseline model");
  TrainingTrace trace;
  trace.epochs_run = j.at("epochs_run").get<std::size_t>();
  trace.best_epoch = j.at("best_epoch").get<std::size_t>();
  trace.dev_f1 = j.at("dev_f1").get<std::vector<double>>();
  return std::make_unique<BaselineModel>(
      j.at("features").get<std::vector<std::string>>(), j.at("weights").get<std::vector<double>>(),
      j.at("lexicon_buckets").get<std::map<std::string, int>>(), j.at("seed").get<std::uint64_t>(),
      std::move(trace));
}

BaselineBackend::BaselineBackend(std::shared_ptr<const SentimentLexicon> lexicon) {
  if (!lexicon) return;
  for (const auto& [word, score] : lexicon->entries()) buckets_[word] = lexicon_bucket(score);
}

std::unique_ptr<TaggerModel> BaselineBackend::train(std::span<const LabeledSentence> train,
                                                    std::span<const LabeledSentence> dev,
                                                    const TrainConfig& config,
                                                    std::uint64_t seed) {
  return train_baseline(train, dev, config, seed);
}

std::unique_ptr<TaggerModel> BaselineBackend::load(const std::filesystem::path& path) {
  return BaselineModel::load(path);
}

std::unique_ptr<BaselineModel> BaselineBackend::train_baseline(
    std::span<const LabeledSentence> train, std::span<const LabeledSentence> dev,
    const TrainConfig& config, std::uint64_t seed) {
  if (train.empty()) throw TaggerError("train_baseline: empty training set");
  config.validate();

  std::vector<std::string> names;
  std::unordered_map<std::string, std::uint32_t> index;
  auto encode = [&](const LabeledSentence& l, bool grow) {
    Encoded ex;
    ex.labels = encode_labels(l);
    for (std::size_t i = 0; i < l.sentence.size(); ++i) {
      std::vector<std::uint32_t> ids;
      for (auto& name : token_features(l.sentence, i, buckets_)) {
        auto it = index.find(name);
        if (it != index.end()) {
          ids.push_back(it->second);
        } else if (grow) {
          auto id = static_cast<std::uint32_t>(names.size());
          index.emplace(name, id);
          names.push_back(std::move(name));
          ids.push_back(id);
        }
      }
      ex.features.push_back(std::move(ids));
    }
    return ex;
  };

  std::vector<Encoded> train_set, dev_set;
  train_set.reserve(train.size());
  for (const auto& l : train) train_set.push_back(encode(l, true));
  dev_set.reserve(dev.size());
  for (const auto& l : dev) dev_set.push_back(encode(l, false));

  const std::size_t dim = names.size() * kNumLabels;
  std::vector<double> weights(dim, 0.0), accum(dim, 0.0), grad(dim, 0.0);
  std::vector<std::uint32_t> touched;
  std::vector<char> is_touched(names.size(), 0);

  std::vector<double> best = weights;
  double best_f1 = -1.0;
  std::size_t wait = 0;
  BaselineModel::TrainingTrace trace;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    Rng rng(derive_seed(seed, "baseline.epoch", epoch));
    rng.shuffle(std::span<std::size_t>(order));

    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t b_end = std::min(order.size(), b + config.batch_size);
      std::size_t tokens = 0;
      for (std::size_t k = b; k < b_end; ++k) {
        const Encoded& ex = train_set[order[k]];
        for (std::size_t i = 0; i < ex.features.size(); ++i) {
          auto p = softmax(score_token(weights, ex.features[i]));
          p[static_cast<std::size_t>(ex.labels[i])] -= 1.0;
          for (auto f : ex.features[i]) {
            if (!is_touched[f]) {
              is_touched[f] = 1;
              touched.push_back(f);
            }
            for (std::size_t c = 0; c < kNumLabels; ++c) grad[f * kNumLabels + c] += p[c];
          }
          ++tokens;
        }
      }
      if (tokens == 0) continue;
      const double scale = 1.0 / static_cast<double>(tokens);
      for (auto f : touched) {
        for (std::size_t c = 0; c < kNumLabels; ++c) {
          const std::size_t w = f * kNumLabels + c;
          const double g = grad[w] * scale + config.l2 * weights[w];
          accum[w] += g * g;
          weights[w] -= config.baseline_learning_rate * g / (std::sqrt(accum[w]) + 1e-8);
          grad[w] = 0.0;
        }
        is_touched[f] = 0;
      }
      touched.clear();
    }
    trace.epochs_run = epoch;

    if (dev_set.empty()) continue;
    const double f1 = dev_token_f1(weights, dev_set);
    trace.dev_f1.push_back(f1);
    if (f1 > best_f1 + config.min_delta || trace.best_epoch == 0) {
      best_f1 = f1;
      best = weights;
      trace.best_epoch = epoch;
      wait = 0;
    } else if (++wait >= config.patience) {
      log::info("early stopping after epoch ", epoch, " (best epoch ", trace.best_epoch,
                ", dev token F1 ", best_f1, ")");
      break;
    }
  }
  if (!dev_set.empty()) weights = std::move(best);

  std::map<std::string, int> buckets = buckets_;
  return std::make_unique<BaselineModel>(std::move(names), std::move(weights), std::move(buckets),
                                         seed, std::move(trace));
}

}  // namespace weaktsa
