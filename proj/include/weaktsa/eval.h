// Exact-match evaluation: per-domain counts, P/R/F1, macro averaging over
// domains, mean/std over seeds, precision-recall curves and error samples.

#ifndef WEAKTSA_EVAL_H_
#define WEAKTSA_EVAL_H_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "weaktsa/tagging.h"

namespace weaktsa {

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const MatchCounts&) const = default;
};

// A prediction is correct iff an unmatched gold span has the same
// boundaries and polarity.  `matched`, when given, receives one flag per
// prediction.
MatchCounts exact_match(std::span<const TargetSpan> predicted, std::span<const TargetSpan> gold,
                        std::vector<bool>* matched = nullptr);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Zero denominators give 0 for the affected metric.
Prf prf(const MatchCounts& counts);

class AlignmentError : public std::runtime_error {
 public:
  AlignmentError(std::string message, std::vector<std::string> offenders)
      : std::runtime_error(std::move(message)), offenders_(std::move(offenders)) {}
  const std::vector<std::string>& offenders() const { return offenders_; }

 private:
  std::vector<std::string> offenders_;
};

struct AlignedSentence {
  const LabeledSentence* gold;
  const LabeledSentence* predicted;
};

// Pairs predictions with gold sentences by sentence id.  Throws
// AlignmentError naming every id present on one side only (or duplicated).
std::vector<AlignedSentence> align(std::span<const LabeledSentence> predicted,
                                   std::span<const LabeledSentence> gold);

using DomainCounts = std::map<std::string, MatchCounts>;
using RunResult = std::map<std::string, Prf>;

// Counts per gold domain, using only predicted spans with confidence >=
// min_confidence.
DomainCounts count_by_domain(std::span<const AlignedSentence> aligned,
                             double min_confidence = -std::numeric_limits<double>::infinity());

RunResult evaluate_run(std::span<const LabeledSentence> predicted,
                       std::span<const LabeledSentence> gold);

// Unweighted mean over domains of P, R and F1.
Prf macro_average(const RunResult& run);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population std
};

MeanStd mean_std(std::span<const double> values);

struct MetricSummary {
  MeanStd precision;
  MeanStd recall;
  MeanStd f1;
};

struct EvalReport {
  std::string dataset;
  std::vector<std::string> domains;
  std::map<std::string, MetricSummary> per_domain;
  MetricSummary macro;
  std::vector<RunResult> per_seed;
  std::vector<Prf> per_seed_macro;

  nlohmann::json to_json() const;
  // Aligned plain-text table, metrics in percent.
  std::string table() const;
};

// Per-domain mean/std over seeds; macro is computed per seed first, then
// averaged.  Throws std::invalid_argument when seeds cover different
// domain sets.
EvalReport aggregate_seeds(std::vector<RunResult> runs, std::string dataset);

struct PRPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct PRCurve {
  // Per domain, plus "macro" (mean over domains).  Averaged over seeds.
  std::map<std::string, std::vector<PRPoint>> curves;
  std::string csv() const;
};

// One curve point per threshold t, counting only spans with S >= t.
// `runs` holds one prediction set per seed.  Thresholds must be strictly
// increasing.
PRCurve pr_curve(std::span<const std::vector<LabeledSentence>> runs,
                 std::span<const LabeledSentence> gold, std::span<const double> thresholds);

struct ErrorRecord {
  std::string domain;
  const LabeledSentence* sentence = nullptr;  // the prediction's sentence
  TargetSpan predicted;
  std::vector<TargetSpan> overlapping_gold;
};

// Samples min(n, available) false-positive predictions per domain.
std::vector<ErrorRecord> sample_errors(std::span<const LabeledSentence> predicted,
                                       std::span<const LabeledSentence> gold,
                                       std::size_t n_per_domain, std::uint64_t seed);

// JSON lines with a '#' header listing the manual error categories.
void write_error_sample(const std::filesystem::path& path, std::span<const ErrorRecord> errors);

}  // namespace weaktsa

#endif  // WEAKTSA_EVAL_H_
