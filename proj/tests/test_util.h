// Shared fixtures for the unit tests.

#ifndef WEAKTSA_TESTS_TEST_UTIL_H_
#define WEAKTSA_TESTS_TEST_UTIL_H_

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "weaktsa/lexicon.h"
#include "weaktsa/sentence.h"
#include "weaktsa/tagging.h"

namespace weaktsa::testing {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("weaktsa-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream(path) << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline SentimentLexicon lexicon_from(const std::string& tsv, double threshold = 0.7) {
  std::istringstream in(tsv);
  return SentimentLexicon::parse(in, threshold);
}

inline LabeledSentence labeled(const std::string& text, std::vector<TargetSpan> spans,
                               const std::string& domain = "d", const std::string& id = "r",
                               std::size_t index = 0) {
  LabeledSentence l{make_sentence(text, domain, id, index), std::move(spans),
                    Provenance::kLabeled};
  for (auto& s : l.gold) s.surface = span_surface(l.sentence, s);
  return l;
}

inline TargetSpan span(std::size_t start, std::size_t end, Label polarity = Label::kPos,
                       double confidence = 1.0) {
  return TargetSpan{start, end, polarity, confidence, {}};
}

// "w0 w1 ... w{n-1}"
inline std::string words(std::size_t n, const std::string& prefix = "w") {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out += ' ';
    out += prefix + std::to_string(i);
  }
  return out;
}

}  // namespace weaktsa::testing

#endif  // WEAKTSA_TESTS_TEST_UTIL_H_
