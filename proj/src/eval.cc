#include "weaktsa/eval.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "weaktsa/random.h"

namespace weaktsa {

using nlohmann::json;

MatchCounts exact_match(std::span<const TargetSpan> predicted, std::span<const TargetSpan> gold,
                        std::vector<bool>* matched) {
  MatchCounts counts;
  std::vector<bool> gold_used(gold.size(), false);
  if (matched) matched->assign(predicted.size(), false);
  for (std::size_t p = 0; p < predicted.size(); ++p) {
    bool hit = false;
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (!gold_used[g] && predicted[p].same_target(gold[g])) {
        gold_used[g] = true;
        hit = true;
        break;
      }
    }
    if (hit) {
      ++counts.tp;
      if (matched) (*matched)[p] = true;
    } else {
      ++counts.fp;
    }
  }
  counts.fn = gold.size() - counts.tp;
  return counts;
}

Prf prf(const MatchCounts& c) {
  Prf out;
  if (c.tp + c.fp > 0) out.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) out.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (out.precision + out.recall > 0.0)
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

std::vector<AlignedSentence> align(std::span<const LabeledSentence> predicted,
                                   std::span<const LabeledSentence> gold) {
  std::map<SentenceId, const LabeledSentence*> by_id;
  std::vector<std::string> offenders;
  for (const auto& p : predicted) {
    if (!by_id.emplace(p.sentence.id, &p).second)
      offenders.push_back("duplicate prediction " + p.sentence.id.str());
  }
  std::vector<AlignedSentence> out;
  std::set<SentenceId> seen;
  for (const auto& g : gold) {
    if (!seen.insert(g.sentence.id).second) {
      offenders.push_back("duplicate gold " + g.sentence.id.str());
      continue;
    }
    auto it = by_id.find(g.sentence.id);
    if (it == by_id.end()) {
      offenders.push_back("missing prediction " + g.sentence.id.str());
      continue;
    }
    out.push_back({&g, it->second});
  }
  for (const auto& [id, p] : by_id)
    if (!seen.count(id)) offenders.push_back("prediction without gold " + id.str());
  if (!offenders.empty()) {
    std::string message = "predictions and gold do not align:";
    for (const auto& o : offenders) message += "\n  " + o;
    throw AlignmentError(message, std::move(offenders));
  }
  return out;
}

DomainCounts count_by_domain(std::span<const AlignedSentence> aligned, double min_confidence) {
  DomainCounts counts;
  std::vector<TargetSpan> kept;
  for (const auto& a : aligned) {
    kept.clear();
    for (const auto& s : a.predicted->gold)
      if (s.confidence >= min_confidence) kept.push_back(s);
    counts[a.gold->sentence.domain] += exact_match(kept, a.gold->gold);
  }
  return counts;
}

RunResult evaluate_run(std::span<const LabeledSentence> predicted,
                       std::span<const LabeledSentence> gold) {
  auto aligned = align(predicted, gold);
  RunResult out;
  for (const auto& [domain, counts] : count_by_domain(aligned)) out[domain] = prf(counts);
  return out;
}

Prf macro_average(const RunResult& run) {
  Prf out;
  if (run.empty()) return out;
  for (const auto& [domain, m] : run) {
    out.precision += m.precision;
    out.recall += m.recall;
    out.f1 += m.f1;
  }
  const double n = static_cast<double>(run.size());
  out.precision /= n;
  out.recall /= n;
  out.f1 /= n;
  return out;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(var / static_cast<double>(values.size()));
  return out;
}

namespace {

MetricSummary summarize(const std::vector<Prf>& values) {
  std::vector<double> p, r, f;
  for (const auto& v : values) {
    p.push_back(v.precision);
    r.push_back(v.recall);
    f.push_back(v.f1);
  }
  return {mean_std(p), mean_std(r), mean_std(f)};
}

json summary_json(const MetricSummary& m) {
  return {{"precision", {{"mean", m.precision.mean}, {"std", m.precision.std}}},
          {"recall", {{"mean", m.recall.mean}, {"std", m.recall.std}}},
          {"f1", {{"mean", m.f1.mean}, {"std", m.f1.std}}}};
}

json prf_json(const Prf& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

std::string fmt_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

}  // namespace

EvalReport aggregate_seeds(std::vector<RunResult> runs, std::string dataset) {
  if (runs.empty()) throw std::invalid_argument("aggregate_seeds: no runs");
  EvalReport report;
  report.dataset = std::move(dataset);
  for (const auto& [domain, m] : runs.front()) report.domains.push_back(domain);
  for (std::size_t s = 1; s < runs.size(); ++s) {
    std::vector<std::string> domains;
    for (const auto& [domain, m] : runs[s]) domains.push_back(domain);
    if (domains != report.domains)
      throw std::invalid_argument("aggregate_seeds: seed " + std::to_string(s) +
                                  " covers a different domain set");
  }
  for (const auto& domain : report.domains) {
    std::vector<Prf> values;
    for (const auto& run : runs) values.push_back(run.at(domain));
    report.per_domain[domain] = summarize(values);
  }
  for (const auto& run : runs) report.per_seed_macro.push_back(macro_average(run));
  report.macro = summarize(report.per_seed_macro);
  report.per_seed = std::move(runs);
  return report;
}

json EvalReport::to_json() const {
  json per_domain_json = json::object();
  for (const auto& [domain, m] : per_domain) per_domain_json[domain] = summary_json(m);
  json seeds = json::array();
  for (std::size_t s = 0; s < per_seed.size(); ++s) {
    json domains = json::object();
    for (const auto& [domain, m] : per_seed[s]) domains[domain] = prf_json(m);
    seeds.push_back({{"per_domain", std::move(domains)}, {"macro", prf_json(per_seed_macro[s])}});
  }
  return {{"dataset", dataset},
          {"seeds", per_seed.size()},
          {"per_domain", std::move(per_domain_json)},
          {"macro", summary_json(macro)},
          {"per_seed", std::move(seeds)}};
}

std::string EvalReport::table() const {
  std::size_t width = std::string("macro").size();
  for (const auto& d : domains) width = std::max(width, d.size());
  std::ostringstream os;
  auto row = [&](const std::string& name, const std::string& p, const std::string& r,
                 const std::string& f) {
    os << name << std::string(width - name.size() + 2, ' ');
    for (const auto* cell : {&p, &r}) os << std::string(7 - std::min<std::size_t>(7, cell->size()), ' ') << *cell;
    os << std::string(14 - std::min<std::size_t>(14, f.size()), ' ') << f << '\n';
  };
  os << "dataset: " << dataset << " (" << per_seed.size() << " seeds)\n";
  row("domain", "P", "R", "F1");
  auto metric_row = [&](const std::string& name, const MetricSummary& m) {
    row(name, fmt_pct(m.precision.mean), fmt_pct(m.recall.mean),
        fmt_pct(m.f1.mean) + " ± " + fmt_pct(m.f1.std));
  };
  for (const auto& d : domains) metric_row(d, per_domain.at(d));
  metric_row("macro", macro);
  return os.str();
}

PRCurve pr_curve(std::span<const std::vector<LabeledSentence>> runs,
                 std::span<const LabeledSentence> gold, std::span<const double> thresholds) {
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (!(thresholds[i] > thresholds[i - 1]))
      throw std::invalid_argument("pr_curve: thresholds must be strictly increasing");
  PRCurve curve;
  if (runs.empty()) return curve;
  std::vector<std::vector<AlignedSentence>> aligned;
  for (const auto& run : runs) aligned.push_back(align(run, gold));

  const double n_runs = static_cast<double>(runs.size());
  for (double t : thresholds) {
    std::map<std::string, PRPoint> sum;
    PRPoint macro{t, 0.0, 0.0};
    for (const auto& a : aligned) {
      RunResult run;
      for (const auto& [domain, counts] : count_by_domain(a, t)) run[domain] = prf(counts);
      for (const auto& [domain, m] : run) {
        auto& point = sum[domain];
        point.threshold = t;
        point.precision += m.precision / n_runs;
        point.recall += m.recall / n_runs;
      }
      Prf avg = macro_average(run);
      macro.precision += avg.precision / n_runs;
      macro.recall += avg.recall / n_runs;
    }
    for (const auto& [domain, point] : sum) curve.curves[domain].push_back(point);
    curve.curves["macro"].push_back(macro);
  }
  return curve;
}

std::string PRCurve::csv() const {
  std::ostringstream os;
  os << "domain,threshold,precision,recall\n";
  char buf[128];
  for (const auto& [domain, points] : curves) {
    for (const auto& p : points) {
      std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f\n", p.threshold, p.precision, p.recall);
      os << domain << buf;
    }
  }
  return os.str();
}

std::vector<ErrorRecord> sample_errors(std::span<const LabeledSentence> predicted,
                                       std::span<const LabeledSentence> gold,
                                       std::size_t n_per_domain, std::uint64_t seed) {
  if (n_per_domain == 0) throw std::invalid_argument("sample_errors: n must be >= 1");
  auto aligned = align(predicted, gold);
  std::map<std::string, std::vector<ErrorRecord>> by_domain;
  std::vector<bool> matched;
  for (const auto& a : aligned) {
    exact_match(a.predicted->gold, a.gold->gold, &matched);
    for (std::size_t i = 0; i < matched.size(); ++i) {
      if (matched[i]) continue;
      const TargetSpan& p = a.predicted->gold[i];
      ErrorRecord r{a.gold->sentence.domain, a.predicted, p, {}};
      for (const auto& g : a.gold->gold)
        if (g.start < p.end && p.start < g.end) r.overlapping_gold.push_back(g);
      by_domain[r.domain].push_back(std::move(r));
    }
  }
  std::vector<ErrorRecord> out;
  for (auto& [domain, errors] : by_domain) {
    Rng domain_rng(derive_seed(derive_seed(seed, "sample-errors"), domain));
    for (auto i : domain_rng.sample_indices(errors.size(), n_per_domain))
      out.push_back(std::move(errors[i]));
  }
  return out;
}

void write_error_sample(const std::filesystem::path& path, std::span<const ErrorRecord> errors) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# Sampled false-positive predictions, one JSON record per line.\n"
         "# Fill \"category\" with one of: invalid-target, wrong-sentiment-or-span,\n"
         "# borderline-target, correct-target.\n";
  for (const auto& e : errors) {
    const Sentence& s = e.sentence->sentence;
    CodepointIndex index(s.text);
    auto span_json = [&](const TargetSpan& span, bool with_confidence) {
      json j = {{"start_char", index.to_codepoint(s.tokens[span.start].begin)},
                {"end_char", index.to_codepoint(s.tokens[span.end - 1].end)},
                {"surface", span_surface(s, span)},
                {"polarity", polarity_name(span.polarity)}};
      if (with_confidence) j["confidence"] = span.confidence;
      return j;
    };
    json gold = json::array();
    for (const auto& g : e.overlapping_gold) gold.push_back(span_json(g, false));
    json record = {{"domain", e.domain},
                   {"review_id", s.id.review_id},
                   {"index", s.id.index},
                   {"text", s.text},
                   {"predicted", span_json(e.predicted, true)},
                   {"overlapping_gold", std::move(gold)},
                   {"category", ""}};
    out << record.dump() << '\n';
  }
}

}  // namespace weaktsa
