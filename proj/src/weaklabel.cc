#include "weaktsa/weaklabel.h"

#include <cmath>
#include <fstream>

#include "weaktsa/dataset.h"
#include "weaktsa/random.h"

namespace weaktsa {

using nlohmann::json;

void SelectionConfig::validate() const {
  if (!(0.0 <= target_low && target_low < target_high && target_high <= 1.0))
    throw std::invalid_argument("selection thresholds need 0 <= target_low < target_high <= 1");
  if (!(non_target_fraction > 0.0 && non_target_fraction <= 1.0))
    throw std::invalid_argument("non_target_fraction must be in (0, 1]");
  if (per_domain_cap == 0) throw std::invalid_argument("per_domain_cap must be positive");
}

json SelectionConfig::to_json() const {
  return {{"target_high", target_high},
          {"target_low", target_low},
          {"non_target_fraction", non_target_fraction},
          {"per_domain_cap", per_domain_cap},
          {"rng_seed", rng_seed}};
}

SelectionConfig SelectionConfig::from_json(const json& j) {
  SelectionConfig c;
  c.target_high = j.value("target_high", c.target_high);
  c.target_low = j.value("target_low", c.target_low);
  c.non_target_fraction = j.value("non_target_fraction", c.non_target_fraction);
  c.per_domain_cap = j.value("per_domain_cap", c.per_domain_cap);
  c.rng_seed = j.value("rng_seed", c.rng_seed);
  c.validate();
  return c;
}

namespace {

bool all_low(const std::vector<TargetSpan>& spans, double low) {
  for (const auto& s : spans)
    if (!(s.confidence <= low)) return false;
  return true;
}

}  // namespace

std::vector<Prediction> select_targets(std::span<const Prediction> predictions,
                                       const SelectionConfig& config) {
  std::vector<Prediction> out;
  for (const auto& p : predictions) {
    std::vector<TargetSpan> high;
    bool rejected = false;
    for (const auto& s : p.spans) {
      if (s.confidence > config.target_high) {
        high.push_back(s);
      } else if (!(s.confidence <= config.target_low)) {
        rejected = true;
        break;
      }
    }
    if (rejected || high.empty()) continue;
    out.push_back({p.sentence, std::move(high)});
  }
  return out;
}

std::vector<std::size_t> non_target_sample(std::size_t n, const SelectionConfig& config) {
  // The epsilon keeps exact products such as 0.1 * 30 from rounding up.
  const auto k = static_cast<std::size_t>(
      std::ceil(config.non_target_fraction * static_cast<double>(n) - 1e-9));
  Rng rng(derive_seed(config.rng_seed, "select.non-target-sample"));
  return rng.sample_indices(n, k);
}

std::vector<Sentence> select_non_targets(std::span<const Prediction> predictions,
                                         const SelectionConfig& config) {
  std::vector<Sentence> out;
  for (auto i : non_target_sample(predictions.size(), config)) {
    if (all_low(predictions[i].spans, config.target_low)) out.push_back(predictions[i].sentence);
  }
  return out;
}

std::uint64_t balance_seed(const SelectionConfig& config, std::string_view stream,
                           const std::string& domain) {
  return derive_seed(derive_seed(config.rng_seed, stream), domain);
}

std::vector<std::size_t> sample_for_cap(std::size_t available, std::size_t cap,
                                        std::uint64_t seed) {
  if (available <= cap) {
    std::vector<std::size_t> all(available);
    for (std::size_t i = 0; i < available; ++i) all[i] = i;
    return all;
  }
  Rng rng(seed);
  return rng.sample_indices(available, cap);
}

std::vector<Prediction> balance_domains(std::vector<Prediction> part,
                                        const SelectionConfig& config) {
  return balance_domains(std::move(part), config, "balance.target",
                         [](const Prediction& p) -> const std::string& { return p.sentence.domain; });
}

std::vector<Sentence> balance_domains(std::vector<Sentence> part, const SelectionConfig& config) {
  return balance_domains(std::move(part), config, "balance.non-target",
                         [](const Sentence& s) -> const std::string& { return s.domain; });
}

json SelectionStats::to_json() const {
  json domains = json::object();
  DomainSelectionStats total;
  for (const auto& [name, d] : per_domain) {
    domains[name] = {{"predicted", d.predicted},
                     {"target_candidates", d.target_candidates},
                     {"target_kept", d.target_kept},
                     {"weak_labels", d.weak_labels},
                     {"non_target_sampled", d.non_target_sampled},
                     {"non_target_candidates", d.non_target_candidates},
                     {"non_target_kept", d.non_target_kept}};
    total.predicted += d.predicted;
    total.target_candidates += d.target_candidates;
    total.target_kept += d.target_kept;
    total.weak_labels += d.weak_labels;
    total.non_target_sampled += d.non_target_sampled;
    total.non_target_candidates += d.non_target_candidates;
    total.non_target_kept += d.non_target_kept;
  }
  return {{"per_domain", std::move(domains)},
          {"total",
           {{"predicted", total.predicted},
            {"target_candidates", total.target_candidates},
            {"target_kept", total.target_kept},
            {"weak_labels", total.weak_labels},
            {"non_target_sampled", total.non_target_sampled},
            {"non_target_candidates", total.non_target_candidates},
            {"non_target_kept", total.non_target_kept}}}};
}

WeakLabeledSet build_weak_set(std::span<const Prediction> predictions,
                              const SelectionConfig& config, SelectionStats* stats) {
  config.validate();
  WeakLabeledSet weak;
  auto targets = select_targets(predictions, config);
  auto non_targets = select_non_targets(predictions, config);
  if (stats) {
    for (const auto& p : predictions) ++stats->per_domain[p.sentence.domain].predicted;
    for (auto i : non_target_sample(predictions.size(), config))
      ++stats->per_domain[predictions[i].sentence.domain].non_target_sampled;
    for (const auto& p : targets) ++stats->per_domain[p.sentence.domain].target_candidates;
    for (const auto& s : non_targets) ++stats->per_domain[s.domain].non_target_candidates;
  }
  weak.target_part = balance_domains(std::move(targets), config);
  weak.non_target_part = balance_domains(std::move(non_targets), config);
  if (stats) {
    for (const auto& p : weak.target_part) {
      auto& d = stats->per_domain[p.sentence.domain];
      ++d.target_kept;
      d.weak_labels += p.spans.size();
    }
    for (const auto& s : weak.non_target_part) ++stats->per_domain[s.domain].non_target_kept;
  }
  return weak;
}

std::vector<LabeledSentence> merge_training_set(std::span<const LabeledSentence> labeled,
                                                const WeakLabeledSet& weak) {
  std::vector<LabeledSentence> out(labeled.begin(), labeled.end());
  out.reserve(labeled.size() + weak.target_part.size() + weak.non_target_part.size());
  for (const auto& p : weak.target_part) out.push_back({p.sentence, p.spans, Provenance::kWeakTarget});
  for (const auto& s : weak.non_target_part) out.push_back({s, {}, Provenance::kWeakNone});
  return out;
}

void write_weak_set(const std::filesystem::path& path, const WeakLabeledSet& weak) {
  std::vector<LabeledSentence> records;
  records.reserve(weak.target_part.size() + weak.non_target_part.size());
  for (const auto& p : weak.target_part) records.push_back({p.sentence, p.spans, Provenance::kWeakTarget});
  for (const auto& s : weak.non_target_part) records.push_back({s, {}, Provenance::kWeakNone});
  write_labeled(path, records, {.confidence = true, .provenance = true});
}

WeakLabeledSet read_weak_set(const std::filesystem::path& path) {
  WeakLabeledSet weak;
  for (auto& l : read_labeled(path)) {
    if (l.provenance == Provenance::kWeakTarget) {
      weak.target_part.push_back({std::move(l.sentence), std::move(l.gold)});
    } else if (l.provenance == Provenance::kWeakNone) {
      weak.non_target_part.push_back(std::move(l.sentence));
    } else {
      throw std::runtime_error(path.string() + ": weak set contains a labeled record");
    }
  }
  return weak;
}

}  // namespace weaktsa
