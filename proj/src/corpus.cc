#include "weaktsa/corpus.h"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "weaktsa/log.h"
#include "weaktsa/random.h"

namespace weaktsa {
namespace {

using nlohmann::json;

std::vector<std::string> parse_categories(const json& value) {
  std::vector<std::string> out;
  if (value.is_null()) return out;
  if (value.is_string()) {
    std::string_view rest = value.get_ref<const std::string&>();
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto item = trim(rest.substr(0, comma));
      if (!item.empty()) out.emplace_back(item);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }
  if (!value.is_array()) throw std::invalid_argument("categories");
  for (const auto& item : value) {
    if (!item.is_string()) throw std::invalid_argument("categories");
    auto name = trim(item.get_ref<const std::string&>());
    if (!name.empty()) out.emplace_back(name);
  }
  return out;
}

std::unordered_map<std::string, std::vector<std::string>> load_business_categories(
    const std::filesystem::path& path, LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open business file " + path.string());
  std::unordered_map<std::string, std::vector<std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      json record = json::parse(line);
      out[record.at("business_id").get<std::string>()] =
          parse_categories(record.value("categories", json()));
    } catch (const std::exception&) {
      if (stats) ++stats->malformed;
      log::warn("business file line ", lineno, ": malformed record skipped");
    }
  }
  return out;
}

// Lower-cased abbreviations (without the final period) that never end a
// sentence.
const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> kAbbrev = {
      "mr",   "mrs",  "ms",   "dr",  "prof", "sr",  "jr",  "st",   "vs",
      "etc",  "e.g",  "i.e",  "inc", "ltd",  "co",  "corp", "mt",  "ave",
      "blvd", "rd",   "approx", "dept", "est", "fig", "no", "u.s", "a.m",
      "p.m",  "jan",  "feb",  "mar", "apr",  "jun", "jul",  "aug", "sep",
      "sept", "oct",  "nov",  "dec", "hwy",  "lt",  "gen",  "col", "capt"};
  return kAbbrev;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}'; }

// Word ending right before `period`, e.g. "Dr" for "Dr.".
std::string_view word_before(std::string_view text, std::size_t period) {
  std::size_t start = period;
  while (start > 0 && !is_space(text[start - 1])) --start;
  auto word = text.substr(start, period - start);
  while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\''))
    word.remove_prefix(1);
  return word;
}

bool blocks_split(std::string_view word) {
  if (word.empty()) return false;
  if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0]))) return true;
  return abbreviations().count(case_fold(word)) > 0;
}

struct Candidate {
  double key;
  std::size_t ordinal;
  std::vector<Sentence> sentences;
};

struct ByKey {
  bool operator()(const Candidate& a, const Candidate& b) const {
    return a.key < b.key || (a.key == b.key && a.ordinal < b.ordinal);
  }
};

}  // namespace

std::optional<Review> parse_review(std::string_view line, std::string fallback_id) {
  try {
    json record = json::parse(line);
    if (!record.is_object()) return std::nullopt;
    Review review;
    review.text = record.at("text").get<std::string>();
    if (record.contains("useful")) {
      const auto& useful = record["useful"];
      if (!useful.is_number_integer()) return std::nullopt;
      review.useful_count = useful.get<std::int64_t>();
      if (review.useful_count < 0) return std::nullopt;
    }
    review.categories = parse_categories(record.value("categories", json()));
    review.id = record.contains("review_id") ? record["review_id"].get<std::string>()
                                             : std::move(fallback_id);
    if (record.contains("business_id"))
      review.business_id = record["business_id"].get<std::string>();
    return review;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

ReviewReader::ReviewReader(const std::filesystem::path& reviews,
                           const std::optional<std::filesystem::path>& business)
    : in_(reviews), joined_(business.has_value()) {
  if (business) categories_ = load_business_categories(*business, &stats_);
  if (!in_) throw CorpusError("cannot open reviews file " + reviews.string());
}

std::optional<Review> ReviewReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++stats_.lines;
    if (trim(line).empty()) continue;
    auto review = parse_review(line, "line" + std::to_string(stats_.lines));
    if (!review) {
      ++stats_.malformed;
      log::warn("reviews line ", stats_.lines, ": malformed record skipped");
      continue;
    }
    if (joined_) {
      auto it = categories_.find(review->business_id);
      if (it == categories_.end()) {
        ++stats_.unknown_business;
        review->categories.clear();
      } else {
        review->categories = it->second;
      }
    }
    ++stats_.loaded;
    return review;
  }
  return std::nullopt;
}

std::vector<Review> load_reviews(const std::filesystem::path& reviews,
                                 const std::optional<std::filesystem::path>& business,
                                 LoadStats* stats) {
  ReviewReader reader(reviews, business);
  std::vector<Review> out;
  while (auto review = reader.next()) out.push_back(std::move(*review));
  if (reader.stats().malformed > 0)
    log::warn(reader.stats().malformed, " malformed records skipped");
  if (stats) *stats = reader.stats();
  return out;
}

bool keep_review(const Review& review) {
  return review.useful_count != 0 && !review.categories.empty();
}

std::vector<Review> filter_reviews(std::vector<Review> reviews) {
  std::erase_if(reviews, [](const Review& r) { return !keep_review(r); });
  return reviews;
}

std::string assign_domain(const Review& review,
                          std::span<const std::string> ordered_domains) {
  std::unordered_set<std::string> folded;
  for (const auto& c : review.categories) folded.insert(case_fold(c));
  for (const auto& domain : ordered_domains)
    if (folded.count(case_fold(domain))) return domain;
  return std::string(kUnassignedDomain);
}

std::vector<std::string> split_sentence_texts(std::string_view text) {
  std::vector<std::string> out;
  const std::size_t n = text.size();
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    auto piece = trim(text.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
    start = end;
  };
  std::size_t i = 0;
  while (i < n) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && is_terminal(text[j])) ++j;
    const bool single_period = (j == i + 1 && text[i] == '.');
    while (j < n && is_closer(text[j])) ++j;
    if (j < n && !is_space(text[j])) {
      i = j;
      continue;
    }
    if (single_period && blocks_split(word_before(text, i))) {
      i = j;
      continue;
    }
    emit(j);
    i = j;
  }
  emit(n);
  return out;
}

std::vector<Sentence> split_sentences(const Review& review, const std::string& domain) {
  std::vector<Sentence> out;
  auto pieces = split_sentence_texts(review.text);
  out.reserve(pieces.size());
  for (std::size_t k = 0; k < pieces.size(); ++k)
    out.push_back(make_sentence(std::move(pieces[k]), domain, review.id, k));
  return out;
}

bool keep_sentence(const Sentence& sentence, const SentimentLexicon& lexicon) {
  const std::size_t words = word_count(sentence.tokens);
  return words >= kMinSentenceWords && words <= kMaxSentenceWords &&
         contains_sentiment_word(lexicon, sentence.tokens);
}

std::vector<Sentence> filter_sentences(std::vector<Sentence> sentences,
                                       const SentimentLexicon& lexicon) {
  std::erase_if(sentences, [&](const Sentence& s) { return !keep_sentence(s, lexicon); });
  return sentences;
}

std::map<std::string, std::size_t> domain_histogram(std::span<const Sentence> sentences) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences) ++counts[s.domain];
  return counts;
}

const std::vector<std::string>& yelp_domains() {
  static const std::vector<std::string> kDomains = {
      "Restaurants",   "Food",          "Beauty & Spas", "Services",  "Travel",
      "Shopping",      "Automotive",    "Health",        "Active Life",
      "Entertainment", "Bars",          "Pets",          "Local Flavor",
      "Education",     "Nightlife",     "Television",    "Religious", "Media"};
  return kDomains;
}

std::vector<std::string> load_domain_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open domain list " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto name = trim(line);
    if (name.empty() || name.front() == '#') continue;
    out.emplace_back(name);
  }
  if (out.empty()) throw CorpusError("domain list " + path.string() + " is empty");
  return out;
}

std::vector<Sentence> ingest(const IngestConfig& config, const SentimentLexicon& lexicon,
                             IngestStats* stats) {
  IngestStats local;
  IngestStats& st = stats ? *stats : local;
  if (config.domains.empty()) throw CorpusError("ingest: empty domain list");

  ReviewReader reader(config.reviews, config.business);
  Rng rng(derive_seed(config.seed, "ingest.reservoir"));

  // Max-heap on key: the review with the largest key is evicted first.
  std::vector<Candidate> held;
  std::size_t held_sentences = 0;

  for (std::size_t ordinal = 0;; ++ordinal) {
    auto review = reader.next();
    if (!review) break;
    if (!keep_review(*review)) continue;
    ++st.reviews_kept;
    std::string domain = assign_domain(*review, config.domains);
    if (domain == kUnassignedDomain) {
      ++st.reviews_unassigned;
      continue;
    }
    auto sentences = split_sentences(*review, domain);
    st.sentences_split += sentences.size();
    sentences = filter_sentences(std::move(sentences), lexicon);
    st.sentences_kept += sentences.size();
    if (sentences.empty()) continue;

    held_sentences += sentences.size();
    held.push_back({rng.uniform01(), ordinal, std::move(sentences)});
    if (config.max_sentences == 0) continue;
    std::push_heap(held.begin(), held.end(), ByKey());
    while (held_sentences - held.front().sentences.size() >= config.max_sentences) {
      held_sentences -= held.front().sentences.size();
      std::pop_heap(held.begin(), held.end(), ByKey());
      held.pop_back();
    }
  }
  st.load = reader.stats();
  if (st.load.malformed > 0) log::warn(st.load.malformed, " malformed records skipped");

  if (config.max_sentences != 0) {
    std::sort(held.begin(), held.end(), ByKey());
    std::size_t budget = config.max_sentences;
    for (auto& c : held) {
      if (c.sentences.size() > budget) c.sentences.resize(budget);
      budget -= c.sentences.size();
    }
    std::sort(held.begin(), held.end(),
              [](const Candidate& a, const Candidate& b) { return a.ordinal < b.ordinal; });
  }

  std::vector<Sentence> out;
  for (auto& c : held)
    for (auto& s : c.sentences) out.push_back(std::move(s));
  st.sentences_emitted = out.size();
  return out;
}

void write_sentence_pool(const std::filesystem::path& path,
                         std::span<const Sentence> sentences) {
  std::ofstream out(path);
  if (!out) throw CorpusError("cannot write " + path.string());
  for (const auto& s : sentences) {
    json record = {{"text", s.text},
                   {"tokens", s.words()},
                   {"domain", s.domain},
                   {"review_id", s.id.review_id},
                   {"index", s.id.index}};
    out << record.dump() << '\n';
  }
}

std::vector<Sentence> read_sentence_pool(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open sentence pool " + path.string());
  std::vector<Sentence> out;
  std::string line;
  std::size_t lineno = 0;
  std::size_t mismatched = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
      Sentence s = make_sentence(record.at("text").get<std::string>(),
                                 record.value("domain", std::string(kUnassignedDomain)),
                                 record.value("review_id", "line" + std::to_string(lineno)),
                                 record.value("index", std::size_t{0}));
      if (record.contains("tokens") && record["tokens"].get<std::vector<std::string>>() != s.words())
        ++mismatched;
      out.push_back(std::move(s));
    } catch (const std::exception& e) {
      throw CorpusError(path.string() + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (mismatched > 0)
    log::warn(path.string(), ": ", mismatched,
              " records whose tokens differ from re-tokenized text; text wins");
  return out;
}

}  // namespace weaktsa
