#include "weaktsa/synthkit.h"

#include <cmath>
#include <fstream>
#include <set>

#include "weaktsa/corpus.h"
#include "weaktsa/dataset.h"
#include "weaktsa/random.h"

namespace weaktsa {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(s)) out.push_back(t.text);
  return out;
}

const std::string& pick(const std::vector<std::string>& items, Rng& rng) {
  return items[rng.uniform(items.size())];
}

class SentenceBuilder {
 public:
  SentenceBuilder(const SynthSpec& spec, const SynthDomain& domain, Rng& rng)
      : spec_(spec), domain_(domain), rng_(rng) {
    for (const auto& w : spec.sentiment) {
      (std::fabs(w.score) >= spec.strong_threshold ? strong_ : weak_).push_back(&w);
    }
  }

  LabeledSentence build(const std::string& review_id) {
    words_.clear();
    spans_.clear();
    clause();
    if (rng_.uniform01() < spec_.second_clause) {
      words_.push_back("and");
      clause();
    }
    std::string text;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (i > 0) text += ' ';
      text += words_[i];
    }
    text += '.';
    LabeledSentence out;
    out.sentence = make_sentence(std::move(text), domain_.name, review_id, 0);
    out.gold = spans_;
    for (auto& s : out.gold) s.surface = span_surface(out.sentence, s);
    return out;
  }

 private:
  void filler() {
    const std::size_t n =
        spec_.min_filler + rng_.uniform(spec_.max_filler - spec_.min_filler + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const bool local = !domain_.background.empty() && rng_.uniform01() < spec_.domain_background;
      words_.push_back(pick(local ? domain_.background : spec_.background, rng_));
    }
  }

  // Returns the polarity of the emitted sentiment word.
  Label sentiment(bool target_clause) {
    const SentimentWord* w = nullptr;
    if (target_clause) {
      const auto& group = rng_.uniform01() < spec_.weak_target ? weak_ : strong_;
      w = group[rng_.uniform(group.size())];
    } else {
      w = weak_[rng_.uniform(weak_.size())];
    }
    const Label polarity = w->score > 0 ? Label::kPos : Label::kNeg;
    std::string word = w->word;
    if (!spec_.synonyms.empty() && rng_.uniform01() < spec_.noise) {
      std::vector<const SentimentWord*> same;
      for (const auto& s : spec_.synonyms)
        if ((s.score > 0) == (polarity == Label::kPos)) same.push_back(&s);
      if (!same.empty()) word = same[rng_.uniform(same.size())]->word;
    }
    words_.push_back(std::move(word));
    return polarity;
  }

  void clause() {
    filler();
    const bool has_target = rng_.uniform01() < spec_.target_density;
    const Label polarity = sentiment(has_target);
    if (has_target) {
      auto target = split_words(pick(domain_.targets, rng_));
      TargetSpan span{words_.size(), words_.size() + target.size(), polarity, 1.0, {}};
      for (auto& t : target) words_.push_back(std::move(t));
      spans_.push_back(span);
    }
    filler();
  }

  const SynthSpec& spec_;
  const SynthDomain& domain_;
  Rng& rng_;
  std::vector<const SentimentWord*> strong_, weak_;
  std::vector<std::string> words_;
  std::vector<TargetSpan> spans_;
};

std::vector<SentimentWord> parse_words(const json& j) {
  std::vector<SentimentWord> out;
  for (const auto& e : j) out.push_back({e.at("word").get<std::string>(), e.at("score").get<double>()});
  return out;
}

json words_json(const std::vector<SentimentWord>& words) {
  json out = json::array();
  for (const auto& w : words) out.push_back({{"word", w.word}, {"score", w.score}});
  return out;
}

}  // namespace

std::vector<std::string> SynthSpec::seen_domains() const {
  if (!labeled_domains.empty()) return labeled_domains;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < domains.size() && i < 2; ++i) out.push_back(domains[i].name);
  return out;
}

void SynthSpec::validate() const {
  if (domains.empty()) throw std::invalid_argument("synth spec: no domains");
  if (labeled_sentences == 0 || pool_sentences == 0 || test_sentences_per_domain == 0)
    throw std::invalid_argument("synth spec: sentence counts must be positive");
  if (!(target_density > 0.0 && target_density <= 1.0) || !(second_clause >= 0.0 && second_clause < 1.0) ||
      !(domain_background >= 0.0 && domain_background <= 1.0) || !(noise >= 0.0 && noise <= 1.0) ||
      !(weak_target >= 0.0 && weak_target <= 1.0))
    throw std::invalid_argument("synth spec: probabilities out of range");
  if (min_filler == 0 || max_filler < min_filler)
    throw std::invalid_argument("synth spec: need 1 <= min_filler <= max_filler");
  if (background.empty()) throw std::invalid_argument("synth spec: no background words");

  // Every word belongs to exactly one role (and one domain).
  std::map<std::string, std::string> owner;
  auto claim = [&](const std::string& phrase, const std::string& role) {
    for (const auto& w : split_words(phrase)) {
      auto folded = case_fold(w);
      auto [it, inserted] = owner.emplace(folded, role);
      if (!inserted && it->second != role)
        throw std::invalid_argument("synth spec: word '" + folded + "' used as " + it->second +
                                    " and " + role);
    }
  };
  for (const auto& w : background) claim(w, "background");
  claim("and", "background");
  bool strong = false, weak_pos = false, weak_neg = false;
  for (const auto& w : sentiment) {
    if (!(std::fabs(w.score) <= 1.0) || w.score == 0.0)
      throw std::invalid_argument("synth spec: sentiment score out of range for " + w.word);
    claim(w.word, "sentiment");
    if (std::fabs(w.score) >= strong_threshold) strong = true;
    else if (w.score > 0) weak_pos = true;
    else weak_neg = true;
  }
  if (!strong || !weak_pos || !weak_neg)
    throw std::invalid_argument("synth spec: need strong and weak sentiment words of both polarities");
  for (const auto& w : synonyms) claim(w.word, "synonym");
  std::set<std::string> names;
  for (const auto& d : domains) {
    if (!names.insert(d.name).second) throw std::invalid_argument("synth spec: duplicate domain " + d.name);
    if (d.targets.empty()) throw std::invalid_argument("synth spec: domain " + d.name + " has no targets");
    for (const auto& t : d.targets) claim(t, "target of " + d.name);
    for (const auto& b : d.background) claim(b, "background of " + d.name);
  }
  for (const auto& s : seen_domains())
    if (!names.count(s)) throw std::invalid_argument("synth spec: unknown labeled domain " + s);
}

SynthCorpus generate(const SynthSpec& spec) {
  spec.validate();
  SynthCorpus out;
  std::map<std::string, const SynthDomain*> by_name;
  for (const auto& d : spec.domains) by_name[d.name] = &d;
  const auto seen = spec.seen_domains();

  Rng labeled_rng(derive_seed(spec.seed, "synth.labeled"));
  for (std::size_t i = 0; i < spec.labeled_sentences; ++i) {
    const SynthDomain& d = *by_name.at(seen[labeled_rng.uniform(seen.size())]);
    SentenceBuilder builder(spec, d, labeled_rng);
    out.labeled.push_back(builder.build("labeled-" + std::to_string(i)));
  }

  Rng pool_rng(derive_seed(spec.seed, "synth.pool"));
  for (std::size_t i = 0; i < spec.pool_sentences; ++i) {
    const SynthDomain& d = spec.domains[pool_rng.uniform(spec.domains.size())];
    SentenceBuilder builder(spec, d, pool_rng);
    auto l = builder.build("pool-" + std::to_string(i));
    out.pool.push_back(l.sentence);
    out.pool_gold.push_back(std::move(l));
  }

  for (const auto& d : spec.domains) {
    Rng test_rng(derive_seed(derive_seed(spec.seed, "synth.test"), d.name));
    SentenceBuilder builder(spec, d, test_rng);
    for (std::size_t i = 0; i < spec.test_sentences_per_domain; ++i)
      out.test.push_back(builder.build("test-" + d.name + "-" + std::to_string(i)));
  }
  return out;
}

void write_corpus(const fs::path& dir, const SynthSpec& spec, const SynthCorpus& corpus) {
  fs::create_directories(dir);
  write_labeled(dir / "labeled.jsonl", corpus.labeled);
  write_sentence_pool(dir / "pool.jsonl", corpus.pool);
  write_labeled(dir / "pool_gold.jsonl", corpus.pool_gold);
  write_labeled(dir / "test.jsonl", corpus.test);
  {
    std::ofstream lex(dir / "lexicon.tsv");
    lex << "# synthetic sentiment lexicon: word<TAB>score\n";
    char buf[32];
    for (const auto& w : spec.sentiment) {
      std::snprintf(buf, sizeof buf, "%.3f", w.score);
      lex << w.word << '\t' << buf << '\n';
    }
    for (const auto& w : spec.synonyms) {
      std::snprintf(buf, sizeof buf, "%.3f", w.score);
      lex << w.word << '\t' << buf << '\n';
    }
  }
  std::ofstream(dir / "spec.json") << spec.to_json().dump(2) << '\n';
}

json SynthSpec::to_json() const {
  json ds = json::array();
  for (const auto& d : domains)
    ds.push_back({{"name", d.name}, {"targets", d.targets}, {"background", d.background}});
  return {{"domains", std::move(ds)},
          {"sentiment", words_json(sentiment)},
          {"synonyms", words_json(synonyms)},
          {"background", background},
          {"labeled_domains", labeled_domains},
          {"labeled_sentences", labeled_sentences},
          {"pool_sentences", pool_sentences},
          {"test_sentences_per_domain", test_sentences_per_domain},
          {"target_density", target_density},
          {"second_clause", second_clause},
          {"domain_background", domain_background},
          {"weak_target", weak_target},
          {"noise", noise},
          {"strong_threshold", strong_threshold},
          {"min_filler", min_filler},
          {"max_filler", max_filler},
          {"seed", seed}};
}

SynthSpec SynthSpec::from_json(const json& j) {
  SynthSpec s = default_spec();
  if (j.contains("domains")) {
    s.domains.clear();
    for (const auto& d : j["domains"])
      s.domains.push_back({d.at("name").get<std::string>(),
                           d.at("targets").get<std::vector<std::string>>(),
                           d.value("background", std::vector<std::string>{})});
  }
  if (j.contains("sentiment")) s.sentiment = parse_words(j["sentiment"]);
  if (j.contains("synonyms")) s.synonyms = parse_words(j["synonyms"]);
  s.background = j.value("background", s.background);
  s.labeled_domains = j.value("labeled_domains", s.labeled_domains);
  s.labeled_sentences = j.value("labeled_sentences", s.labeled_sentences);
  s.pool_sentences = j.value("pool_sentences", s.pool_sentences);
  s.test_sentences_per_domain = j.value("test_sentences_per_domain", s.test_sentences_per_domain);
  s.target_density = j.value("target_density", s.target_density);
  s.second_clause = j.value("second_clause", s.second_clause);
  s.domain_background = j.value("domain_background", s.domain_background);
  s.weak_target = j.value("weak_target", s.weak_target);
  s.noise = j.value("noise", s.noise);
  s.strong_threshold = j.value("strong_threshold", s.strong_threshold);
  s.min_filler = j.value("min_filler", s.min_filler);
  s.max_filler = j.value("max_filler", s.max_filler);
  s.seed = j.value("seed", s.seed);
  return s;
}

SynthSpec SynthSpec::default_spec() {
  SynthSpec s;
  s.domains = {
      {"restaurants",
       {"pasta", "sushi", "waiter", "waitress", "dessert", "menu", "steak", "salad", "burger",
        "pizza", "soup", "bread", "wine", "coffee", "tacos", "noodles", "chef", "appetizer",
        "seafood", "brunch", "cocktails", "sauce", "fries", "curry", "dumplings"},
       {"table", "plate", "fork", "napkin", "reservation", "booth", "bill", "tip", "kitchen",
        "counter", "takeout", "patio"}},
      {"laptops",
       {"keyboard", "screen", "battery", "trackpad", "processor", "speakers", "charger",
        "display", "hinge", "webcam", "touchpad", "fan", "memory", "graphics", "ports",
        "software", "drivers", "chassis", "resolution", "bezel", "warranty", "ssd", "backlight",
        "firmware", "motherboard"},
       {"box", "laptop", "unit", "desk", "bag", "office", "update", "setup", "cable", "usb",
        "version", "manual"}},
      {"hotels",
       {"bed", "lobby", "pool", "concierge", "breakfast", "shower", "towels", "housekeeping",
        "balcony", "elevator", "suite", "mattress", "pillows", "gym", "spa", "reception",
        "minibar", "bathroom", "view", "wifi", "carpet", "hallway", "doorman", "sauna", "valet"},
       {"stay", "vacation", "luggage", "corridor", "floor", "key", "checkout", "booking",
        "resort", "guests", "lounge", "downtown"}},
      {"automotive",
       {"engine", "transmission", "brakes", "steering", "mileage", "seats", "dashboard",
        "suspension", "tires", "headlights", "mechanic", "dealership", "clutch", "gearbox",
        "exhaust", "horn", "wipers", "sunroof", "trunk", "radiator", "alternator", "muffler",
        "odometer", "airbag", "ignition"},
       {"car", "highway", "garage", "driveway", "commute", "road", "miles", "sedan", "truck",
        "license", "traffic", "lane"}},
      {"movies",
       {"plot", "acting", "soundtrack", "director", "cast", "script", "dialogue", "ending",
        "cinematography", "villain", "sequel", "screenplay", "visuals", "pacing", "storyline",
        "actors", "actress", "editing", "score", "costumes", "effects", "protagonist",
        "humor", "climax", "narration"},
       {"film", "theater", "popcorn", "screening", "ticket", "seat", "audience", "premiere",
        "weekend", "matinee", "studio", "release"}},
      {"pets",
       {"groomer", "vet", "kennel", "leash", "collar", "kibble", "litter", "aquarium",
        "hamster", "puppy", "kitten", "treats", "toys", "grooming", "boarding", "trainer",
        "cage", "harness", "catnip", "vaccines", "shampoo", "crate", "daycare", "terrier",
        "parrot"},
       {"dog", "cat", "shop", "appointment", "walk", "yard", "fur", "paws", "bowl",
        "adoption", "shelter", "pet"}},
  };
  s.sentiment = {
      {"excellent", 0.95},   {"amazing", 0.93},     {"fantastic", 0.94}, {"wonderful", 0.92},
      {"outstanding", 0.96}, {"superb", 0.95},      {"perfect", 0.91},   {"awesome", 0.92},
      {"good", 0.78},        {"nice", 0.75},        {"decent", 0.72},    {"solid", 0.74},
      {"pleasant", 0.8},     {"lovely", 0.85},      {"fine", 0.71},      {"great", 0.86},
      {"terrible", -0.95},   {"horrible", -0.94},   {"awful", -0.93},    {"disgusting", -0.92},
      {"atrocious", -0.96},  {"dreadful", -0.91},   {"abysmal", -0.95},  {"pathetic", -0.9},
      {"bad", -0.8},         {"poor", -0.78},       {"mediocre", -0.74}, {"disappointing", -0.82},
      {"bland", -0.72},      {"sloppy", -0.76},     {"lousy", -0.85},    {"weak", -0.71},
  };
  s.synonyms = {
      {"stellar", 0.6},  {"terrific", 0.55}, {"splendid", 0.5},  {"fabulous", 0.6},
      {"shoddy", -0.6},  {"subpar", -0.55},  {"dismal", -0.5},   {"crummy", -0.6},
  };
  s.background = {
      "the",     "a",       "we",      "i",        "it",       "was",    "really",  "very",
      "this",    "that",    "our",     "my",       "they",     "so",     "just",    "also",
      "there",   "here",    "then",    "when",     "after",    "before", "with",    "for",
      "on",      "at",      "in",      "of",       "to",       "from",   "again",   "today",
      "yesterday", "last",  "night",   "week",     "time",     "visit",  "came",    "went",
      "got",     "had",     "have",    "been",     "is",       "are",    "were",    "be",
      "would",   "will",    "could",   "all",      "some",     "more",   "quite",   "overall",
      "definitely", "probably", "maybe", "honestly", "friend", "family", "people",  "everyone",
      "back",    "around",  "about",   "through",  "over",     "while",  "because", "since",
      "though",  "only",    "even",    "still",    "first",    "second", "other",   "one",
  };
  return s;
}

}  // namespace weaktsa
