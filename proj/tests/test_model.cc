#include <doctest.h>

#include "test_util.h"
#include "weaktsa/baseline.h"
#include "weaktsa/synthkit.h"

using namespace weaktsa;
using weaktsa::testing::labeled;
using weaktsa::testing::span;
using weaktsa::testing::TempDir;

namespace {

constexpr Label O = Label::kNone, P = Label::kPos, N = Label::kNeg;

SynthCorpus small_corpus(std::size_t labeled_sentences, std::uint64_t seed = 0) {
  auto spec = SynthSpec::default_spec();
  spec.labeled_sentences = labeled_sentences;
  spec.pool_sentences = 10;
  spec.test_sentences_per_domain = 20;
  spec.seed = seed;
  return generate(spec);
}

std::shared_ptr<SentimentLexicon> corpus_lexicon(const TempDir& dir) {
  auto spec = SynthSpec::default_spec();
  write_corpus(dir.path(), spec, small_corpus(2));
  return std::make_shared<SentimentLexicon>(SentimentLexicon::load(dir / "lexicon.tsv", 0.7));
}

}  // namespace

TEST_CASE("token F1") {
  // 2 TP, 1 FP, 2 FN
  std::vector<std::vector<Label>> gold = {{P, P, O, N, N}};
  std::vector<std::vector<Label>> pred = {{P, P, P, O, O}};
  CHECK(token_f1(pred, gold) == doctest::Approx(4.0 / 7));
  CHECK(token_f1(gold, gold) == doctest::Approx(1.0));
  std::vector<std::vector<Label>> none = {{O, O, O, O, O}};
  CHECK(token_f1(none, gold) == 0.0);
  // a polarity mismatch is both a false positive and a false negative
  std::vector<std::vector<Label>> flipped = {{N, P, O, N, N}};
  CHECK(token_f1(flipped, gold) == doctest::Approx(2 * 3.0 / (2 * 3 + 1 + 1)));
}

TEST_CASE("lexicon buckets") {
  CHECK(lexicon_bucket(std::nullopt) == 0);
  CHECK(lexicon_bucket(0.95) == 2);
  CHECK(lexicon_bucket(0.75) == 1);
  CHECK(lexicon_bucket(-0.75) == -1);
  CHECK(lexicon_bucket(-0.95) == -2);
}

TEST_CASE("baseline beats the majority class on 200 synthetic sentences") {
  TempDir dir;
  auto corpus = small_corpus(200);
  std::vector train(corpus.labeled.begin(), corpus.labeled.begin() + 160);
  std::vector dev(corpus.labeled.begin() + 160, corpus.labeled.end());
  BaselineBackend backend(corpus_lexicon(dir));
  auto model = backend.train_baseline(train, dev, TrainConfig{}, 1);
  // the majority class is NONE everywhere, which scores token F1 = 0
  std::vector<std::vector<Label>> majority, gold;
  for (const auto& l : dev) {
    gold.push_back(encode_labels(l));
    majority.emplace_back(l.sentence.size(), O);
  }
  CHECK(token_f1(majority, gold) == 0.0);
  const double f1 = token_f1(*model, dev);
  MESSAGE("dev token F1 " << f1);
  CHECK(f1 > 0.5);
  CHECK(model->trace().epochs_run >= 1);
  CHECK(model->trace().best_epoch >= 1);
}

TEST_CASE("training is deterministic to the byte") {
  TempDir dir;
  auto corpus = small_corpus(120);
  std::vector train(corpus.labeled.begin(), corpus.labeled.begin() + 100);
  std::vector dev(corpus.labeled.begin() + 100, corpus.labeled.end());
  auto lexicon = corpus_lexicon(dir);
  BaselineBackend a(lexicon), b(lexicon);
  a.train(train, dev, TrainConfig{}, 9)->save(dir / "a.json");
  b.train(train, dev, TrainConfig{}, 9)->save(dir / "b.json");
  a.train(train, dev, TrainConfig{}, 10)->save(dir / "c.json");
  CHECK(testing::read_file(dir / "a.json") == testing::read_file(dir / "b.json"));
  CHECK(testing::read_file(dir / "a.json") != testing::read_file(dir / "c.json"));
}

TEST_CASE("a dev plateau stops training early") {
  // one sentence repeated: dev F1 reaches its ceiling almost at once
  std::vector<LabeledSentence> train(64, labeled("the soup was great", {span(1, 2)}));
  std::vector<LabeledSentence> dev(16, labeled("the soup was great", {span(1, 2)}));
  BaselineBackend backend;
  TrainConfig config;
  auto model = backend.train_baseline(train, dev, config, 0);
  CHECK(model->trace().epochs_run < 15);
  CHECK(model->trace().epochs_run == model->trace().best_epoch + config.patience);
  CHECK(model->trace().dev_f1.size() == model->trace().epochs_run);

  config.patience = 5;
  auto patient = backend.train_baseline(train, dev, config, 0);
  CHECK(patient->trace().epochs_run == patient->trace().best_epoch + 5);

  auto no_dev = backend.train_baseline(train, {}, TrainConfig{}, 0);
  CHECK(no_dev->trace().epochs_run == 15);
  CHECK(no_dev->trace().best_epoch == 0);
}

TEST_CASE("prediction") {
  TempDir dir;
  auto corpus = small_corpus(300);
  BaselineBackend backend(corpus_lexicon(dir));
  auto model = backend.train(corpus.labeled, {}, TrainConfig{}, 2);
  CHECK(model->predict(std::vector<Sentence>{}).empty());

  // the planted spans of training sentences come back
  std::vector<Sentence> sentences;
  for (std::size_t i = 0; i < 50; ++i) sentences.push_back(corpus.labeled[i].sentence);
  auto spans = model->predict(sentences);
  std::size_t recovered = 0, planted = 0;
  for (std::size_t i = 0; i < 50; ++i)
    for (const auto& g : corpus.labeled[i].gold) {
      ++planted;
      for (const auto& p : spans[i]) recovered += p.same_target(g);
    }
  CHECK(recovered * 10 >= planted * 9);

  auto again = model->predict(sentences);
  for (std::size_t i = 0; i < 50; ++i) {
    REQUIRE(again[i].size() == spans[i].size());
    for (std::size_t j = 0; j < spans[i].size(); ++j) {
      CHECK(again[i][j].same_target(spans[i][j]));
      CHECK(again[i][j].confidence == spans[i][j].confidence);
    }
  }

  auto parallel = predict_parallel(*model, sentences, 4);
  for (std::size_t i = 0; i < 50; ++i) CHECK(parallel[i].size() == spans[i].size());

  model->save(dir / "m.json");
  auto loaded = backend.load(dir / "m.json");
  auto d1 = model->distributions(sentences);
  auto d2 = loaded->distributions(sentences);
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t k = 0; k < d1[i].size(); ++k) {
      CHECK(d1[i][k].pos == d2[i][k].pos);
      CHECK(d1[i][k].none == d2[i][k].none);
    }
  loaded->save(dir / "m2.json");
  CHECK(testing::read_file(dir / "m.json") == testing::read_file(dir / "m2.json"));
}

TEST_CASE("distributions are valid and confidence bounds hold") {
  TempDir dir;
  auto corpus = small_corpus(100);
  BaselineBackend backend(corpus_lexicon(dir));
  auto model = backend.train(corpus.labeled, {}, TrainConfig{}, 3);
  std::vector<Sentence> sentences;
  for (const auto& t : corpus.test) sentences.push_back(t.sentence);
  auto dists = model->distributions(sentences);
  auto spans = model->predict(sentences);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    REQUIRE(dists[i].size() == sentences[i].size());
    for (const auto& d : dists[i]) CHECK(d.valid());
    for (const auto& s : spans[i])
      for (std::size_t k = s.start; k < s.end; ++k)
        CHECK(s.confidence <= dists[i][k].prob(s.polarity));
  }
}

TEST_CASE("training errors") {
  BaselineBackend backend;
  CHECK_THROWS_AS(backend.train({}, {}, TrainConfig{}, 0), TaggerError);
  TrainConfig bad;
  bad.patience = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  TrainConfig c;
  c.baseline_learning_rate = 0.5;
  c.max_epochs = 4;
  auto back = TrainConfig::from_json(c.to_json());
  CHECK(back.baseline_learning_rate == 0.5);
  CHECK(back.max_epochs == 4);
  TempDir dir;
  testing::write_file(dir / "x.json", "{\"kind\":\"external\"}");
  CHECK_THROWS(backend.load(dir / "x.json"));
}
