// Brute-force oracles and random instance generators shared by the unit
// tests and the acceptance runner.

#ifndef WEAKTSA_TESTS_ORACLES_H_
#define WEAKTSA_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "weaktsa/eval.h"
#include "weaktsa/random.h"
#include "weaktsa/tagging.h"
#include "weaktsa/weaklabel.h"

namespace weaktsa::oracle {

// Random non-overlapping spans with no same-polarity neighbours.
inline std::vector<TargetSpan> random_layout(Rng& rng, std::size_t n, std::size_t max_len = 4) {
  std::vector<TargetSpan> spans;
  std::size_t i = 0;
  while (i < n) {
    if (rng.uniform(3) != 0) {
      ++i;
      continue;
    }
    const std::size_t len = 1 + rng.uniform(std::min(max_len, n - i));
    Label p = rng.uniform(2) ? Label::kPos : Label::kNeg;
    if (!spans.empty() && spans.back().end == i && spans.back().polarity == p)
      p = p == Label::kPos ? Label::kNeg : Label::kPos;
    spans.push_back({i, i + len, p, 1.0, {}});
    i += len;
  }
  return spans;
}

// decode(one-hot(encode(x))) == x with S = 1.  Returns false on mismatch.
inline bool round_trip_holds(const std::vector<TargetSpan>& gold, std::size_t n) {
  auto labels = encode_labels(gold, n);
  std::vector<TokenDistribution> d;
  for (auto l : labels) d.push_back(TokenDistribution::one_hot(l));
  auto back = decode_spans(d);
  if (back.size() != gold.size()) return false;
  for (std::size_t k = 0; k < gold.size(); ++k)
    if (!back[k].same_target(gold[k]) || back[k].confidence != 1.0) return false;
  return true;
}

// Confidences that hit both thresholds exactly and just beside them.
inline double random_confidence(Rng& rng, const SelectionConfig& cfg) {
  switch (rng.uniform(8)) {
    case 0: return cfg.target_high;
    case 1: return cfg.target_low;
    case 2: return std::nextafter(cfg.target_high, 2.0);
    case 3: return std::nextafter(cfg.target_low, 2.0);
    case 4: return std::nextafter(cfg.target_low, -1.0);
    default: return rng.uniform01();
  }
}

inline std::vector<Prediction> random_predictions(Rng& rng, const SelectionConfig& cfg,
                                                  std::size_t count,
                                                  const std::vector<std::string>& domains) {
  std::vector<Prediction> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 1 + rng.uniform(12);
    std::string text;
    for (std::size_t k = 0; k < n; ++k) text += (k ? " w" : "w") + std::to_string(k);
    Prediction p{make_sentence(text, domains[rng.uniform(domains.size())], "s" + std::to_string(i), 0),
                 random_layout(rng, n)};
    for (auto& s : p.spans) s.confidence = random_confidence(rng, cfg);
    out.push_back(std::move(p));
  }
  return out;
}

// Checks every selection invariant for one prediction set.  Appends a
// description of each violation to `failures`.
inline void check_selection(const std::vector<Prediction>& predictions, const SelectionConfig& cfg,
                            std::vector<std::string>& failures) {
  auto weak = build_weak_set(predictions, cfg);
  std::map<SentenceId, const Prediction*> by_id;
  for (const auto& p : predictions) by_id[p.sentence.id] = &p;
  auto fail = [&](const std::string& what, const SentenceId& id) {
    failures.push_back(what + " (" + id.str() + ")");
  };

  std::map<std::string, std::size_t> target_domain, none_domain;
  std::set<SentenceId> in_target;
  for (const auto& t : weak.target_part) {
    const Prediction& src = *by_id.at(t.sentence.id);
    in_target.insert(t.sentence.id);
    ++target_domain[t.sentence.domain];
    if (t.spans.empty()) fail("target sentence without weak labels", t.sentence.id);
    for (const auto& s : t.spans)
      if (!(s.confidence > cfg.target_high)) fail("weak label with S <= target_high", t.sentence.id);
    std::vector<TargetSpan> expected;
    for (const auto& s : src.spans) {
      if (s.confidence > cfg.target_low && s.confidence <= cfg.target_high)
        fail("kept sentence carries a span in (low, high]", t.sentence.id);
      if (s.confidence > cfg.target_high) expected.push_back(s);
    }
    if (expected.size() != t.spans.size()) {
      fail("weak labels differ from the confident spans", t.sentence.id);
    } else {
      for (std::size_t k = 0; k < expected.size(); ++k)
        if (!expected[k].same_target(t.spans[k])) fail("weak label moved", t.sentence.id);
    }
  }
  for (const auto& s : weak.non_target_part) {
    ++none_domain[s.domain];
    for (const auto& sp : by_id.at(s.id)->spans)
      if (!(sp.confidence <= cfg.target_low)) fail("non-target sentence with a span above low", s.id);
  }
  for (const auto& [d, c] : target_domain)
    if (c > cfg.per_domain_cap) failures.push_back("target part over cap in " + d);
  for (const auto& [d, c] : none_domain)
    if (c > cfg.per_domain_cap) failures.push_back("non-target part over cap in " + d);

  // Completeness: every eligible target sentence is kept unless its domain hit the cap.
  std::map<std::string, std::size_t> eligible;
  for (const auto& p : predictions) {
    bool high = false, mid = false;
    for (const auto& s : p.spans) {
      high = high || s.confidence > cfg.target_high;
      mid = mid || (s.confidence > cfg.target_low && s.confidence <= cfg.target_high);
    }
    if (high && !mid) ++eligible[p.sentence.domain];
    if (!(high && !mid) && in_target.count(p.sentence.id))
      fail("ineligible sentence selected", p.sentence.id);
  }
  for (const auto& [d, c] : eligible)
    if (target_domain[d] != std::min(c, cfg.per_domain_cap))
      failures.push_back("target part in " + d + " has " + std::to_string(target_domain[d]) +
                         ", expected " + std::to_string(std::min(c, cfg.per_domain_cap)));

  // Non-target part: exactly the qualifying members of the sample, capped.
  const auto sample = non_target_sample(predictions.size(), cfg);
  const auto want_size = static_cast<std::size_t>(
      std::ceil(cfg.non_target_fraction * static_cast<double>(predictions.size()) - 1e-9));
  if (sample.size() != std::min(want_size, predictions.size()))
    failures.push_back("non-target sample has the wrong size");
  std::map<std::string, std::size_t> qualifying;
  for (auto i : sample) {
    bool low = true;
    for (const auto& s : predictions[i].spans) low = low && s.confidence <= cfg.target_low;
    if (low) ++qualifying[predictions[i].sentence.domain];
  }
  for (const auto& [d, c] : qualifying)
    if (none_domain[d] != std::min(c, cfg.per_domain_cap))
      failures.push_back("non-target part in " + d + " has the wrong size");
}

// Maximum bipartite matching between predicted and gold spans where an
// edge means identical boundaries and polarity (Kuhn's algorithm).
inline std::size_t max_matching(const std::vector<TargetSpan>& pred,
                                const std::vector<TargetSpan>& gold) {
  std::vector<int> match_of_gold(gold.size(), -1);
  std::function<bool(std::size_t, std::vector<bool>&)> augment =
      [&](std::size_t p, std::vector<bool>& seen) {
        for (std::size_t g = 0; g < gold.size(); ++g) {
          if (seen[g] || !pred[p].same_target(gold[g])) continue;
          seen[g] = true;
          if (match_of_gold[g] < 0 ||
              augment(static_cast<std::size_t>(match_of_gold[g]), seen)) {
            match_of_gold[g] = static_cast<int>(p);
            return true;
          }
        }
        return false;
      };
  std::size_t matched = 0;
  for (std::size_t p = 0; p < pred.size(); ++p) {
    std::vector<bool> seen(gold.size(), false);
    if (augment(p, seen)) ++matched;
  }
  return matched;
}

// Small random span sets (<= 6 per side) over a short sentence; duplicates
// and overlaps allowed so the matcher sees adversarial inputs.
inline std::vector<TargetSpan> random_small_spans(Rng& rng, std::size_t n) {
  std::vector<TargetSpan> out;
  for (std::size_t k = rng.uniform(7); k > 0; --k) {
    const std::size_t a = rng.uniform(n);
    const std::size_t b = a + 1 + rng.uniform(std::min<std::size_t>(2, n - a));
    out.push_back({a, b, rng.uniform(2) ? Label::kPos : Label::kNeg, rng.uniform01(), {}});
  }
  return out;
}

// Returns an empty string when exact_match agrees with the oracle and the
// count identities hold.
inline std::string check_exact_match(const std::vector<TargetSpan>& pred,
                                     const std::vector<TargetSpan>& gold) {
  const auto counts = exact_match(pred, gold);
  const auto best = max_matching(pred, gold);
  if (counts.tp != best) return "tp " + std::to_string(counts.tp) + " != oracle " + std::to_string(best);
  if (counts.tp + counts.fp != pred.size()) return "tp + fp != |pred|";
  if (counts.tp + counts.fn != gold.size()) return "tp + fn != |gold|";
  if (counts.tp > std::min(pred.size(), gold.size())) return "tp > min(|pred|, |gold|)";
  return {};
}

}  // namespace weaktsa::oracle

#endif  // WEAKTSA_TESTS_ORACLES_H_
