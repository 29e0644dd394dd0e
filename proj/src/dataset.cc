#include "weaktsa/dataset.h"

#include <algorithm>
#include <fstream>

#include "weaktsa/log.h"

namespace weaktsa {

using nlohmann::json;

TargetSpan char_range_to_span(const Sentence& sentence, std::size_t start_char,
                              std::size_t end_char, bool* snapped) {
  CodepointIndex index(sentence.text);
  const std::size_t begin = index.to_byte(start_char);
  const std::size_t end = index.to_byte(end_char);
  TargetSpan span;
  const auto& tokens = sentence.tokens;
  std::size_t first = 0;
  while (first < tokens.size() && tokens[first].end <= begin) ++first;
  std::size_t last = first;
  while (last < tokens.size() && tokens[last].begin < end) ++last;
  span.start = first;
  span.end = last;
  if (snapped) {
    *snapped = last > first &&
               (tokens[first].begin != begin || tokens[last - 1].end != end);
  }
  return span;
}

LabeledSentence parse_labeled(const json& record, const std::string& fallback_id,
                              DatasetStats* stats) {
  LabeledSentence out;
  out.sentence = make_sentence(record.at("text").get<std::string>(),
                               record.value("domain", std::string(kUnassignedDomain)),
                               record.value("review_id", fallback_id),
                               record.value("index", std::size_t{0}));
  if (record.contains("provenance"))
    out.provenance = parse_provenance(record["provenance"].get<std::string>());
  if (record.contains("targets")) {
    for (const auto& target : record["targets"]) {
      if (stats) ++stats->targets;
      const auto polarity = target.at("polarity").get<std::string>();
      if (polarity != "positive" && polarity != "negative") {
        if (stats) ++stats->dropped_polarity;
        continue;
      }
      bool snapped = false;
      TargetSpan span = char_range_to_span(out.sentence, target.at("start_char").get<std::size_t>(),
                                           target.at("end_char").get<std::size_t>(), &snapped);
      if (span.start == span.end) {
        if (stats) ++stats->dropped_empty;
        continue;
      }
      if (snapped && stats) ++stats->snapped;
      span.polarity = parse_polarity(polarity);
      span.confidence = target.value("confidence", 1.0);
      span.surface = span_surface(out.sentence, span);
      out.gold.push_back(std::move(span));
    }
  }
  std::sort(out.gold.begin(), out.gold.end(),
            [](const TargetSpan& a, const TargetSpan& b) { return a.start < b.start; });
  check_spans(out.gold, out.sentence.size());
  if (stats) ++stats->records;
  return out;
}

std::vector<LabeledSentence> read_labeled(const std::filesystem::path& path,
                                          DatasetStats* stats) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path.string());
  DatasetStats local;
  DatasetStats& st = stats ? *stats : local;
  std::vector<LabeledSentence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse_labeled(json::parse(line), "line" + std::to_string(lineno), &st));
    } catch (const std::exception& e) {
      throw DatasetError(path.string() + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (st.snapped > 0)
    log::warn(path.string(), ": ", st.snapped, " target boundaries snapped to token boundaries");
  if (st.dropped_polarity > 0)
    log::info(path.string(), ": ", st.dropped_polarity, " non-binary polarity targets removed");
  if (st.dropped_empty > 0)
    log::warn(path.string(), ": ", st.dropped_empty, " targets covering no token removed");
  return out;
}

json labeled_to_json(const LabeledSentence& labeled, WriteOptions options) {
  const Sentence& s = labeled.sentence;
  CodepointIndex index(s.text);
  json targets = json::array();
  for (const auto& span : labeled.gold) {
    json t = {{"start_char", index.to_codepoint(s.tokens[span.start].begin)},
              {"end_char", index.to_codepoint(s.tokens[span.end - 1].end)},
              {"polarity", polarity_name(span.polarity)},
              {"surface", span_surface(s, span)}};
    if (options.confidence) t["confidence"] = span.confidence;
    targets.push_back(std::move(t));
  }
  json record = {{"review_id", s.id.review_id},
                 {"index", s.id.index},
                 {"text", s.text},
                 {"domain", s.domain},
                 {"targets", std::move(targets)}};
  if (options.provenance) record["provenance"] = provenance_name(labeled.provenance);
  return record;
}

void write_labeled(const std::filesystem::path& path,
                   std::span<const LabeledSentence> records, WriteOptions options) {
  std::ofstream out(path);
  if (!out) throw DatasetError("cannot write " + path.string());
  for (const auto& r : records) out << labeled_to_json(r, options).dump() << '\n';
  if (!out) throw DatasetError("write failed for " + path.string());
}

}  // namespace weaktsa
