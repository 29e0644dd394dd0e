// A scripted tagger speaking the wire protocol, used by the conformance
// tests.  Modes:
//   memorize  training sentences get their gold labels back; elsewhere,
//             words seen inside a training target get that polarity
//   uniform   every word gets 1/3 for each label
//   electric  "electric" and "car" are positive, everything else is NONE
//   pieces    memorize, but words longer than 3 chars come back as two
//             pieces, the first one neutral
//   version2  handshake answers with protocol version 2
//   malformed predict answers with a line that is not JSON
//   error     train answers with an error message
//   hangup    the stream closes instead of answering train

#ifndef WEAKTSA_TESTS_MOCK_TAGGER_H_
#define WEAKTSA_TESTS_MOCK_TAGGER_H_

#include <cstdio>
#include <map>
#include <string>

#include <json.hpp>

namespace weaktsa::mock {

using nlohmann::json;

inline json distribution(const std::string& label, double p = 0.95) {
  const double rest = (1.0 - p) / 2;
  if (label == "P") return {p, rest, rest};
  if (label == "N") return {rest, p, rest};
  return {rest, rest, p};
}

inline std::string fold(std::string w) {
  for (auto& c : w)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return w;
}

class MockTagger {
 public:
  explicit MockTagger(std::string mode) : mode_(std::move(mode)) {}

  // Returns the reply line, or "" to close the stream.
  std::string handle(const std::string& line) {
    json msg;
    try {
      msg = json::parse(line);
    } catch (const std::exception&) {
      return json{{"op", "error"}, {"stage", "parse"}, {"message", "bad request"}}.dump();
    }
    const std::string op = msg.value("op", "");
    if (op == "hello") {
      return json{{"op", "hello"},
                  {"version", mode_ == "version2" ? 2 : 1},
                  {"piece_level", mode_ == "pieces"}}
          .dump();
    }
    if (op == "train") {
      if (mode_ == "error")
        return json{{"op", "error"}, {"stage", "train"}, {"message", "out of memory"}}.dump();
      if (mode_ == "hangup") return "";
      auto& memory = models_["m" + std::to_string(models_.size())];
      auto& seen = sentences_["m" + std::to_string(sentences_.size())];
      for (const auto& record : msg.at("train")) {
        const auto& tokens = record.at("tokens");
        const auto& labels = record.at("labels");
        seen[tokens.dump()] = labels.get<std::vector<std::string>>();
        for (std::size_t i = 0; i < tokens.size(); ++i) {
          const std::string label = labels[i].get<std::string>();
          if (label != "O") memory[fold(tokens[i].get<std::string>())] = label;
        }
      }
      last_config_ = msg.at("config");
      last_seed_ = msg.at("seed").get<std::uint64_t>();
      return json{{"op", "trained"}, {"model_id", "m" + std::to_string(models_.size() - 1)}}.dump();
    }
    if (op == "predict") {
      if (mode_ == "malformed") return "this is not json";
      const std::string id = msg.value("model_id", "");
      auto found = models_.find(id);
      if (found == models_.end() && mode_ != "uniform" && mode_ != "electric")
        return json{{"op", "error"}, {"stage", "predict"}, {"message", "unknown model " + id}}.dump();
      json results = json::array();
      for (const auto& s : msg.at("sentences")) {
        json dists = json::array(), pieces = json::array(), owner = json::array();
        const std::vector<std::string>* known = nullptr;
        if (found != models_.end()) {
          auto hit = sentences_[id].find(s.at("tokens").dump());
          if (hit != sentences_[id].end()) known = &hit->second;
        }
        std::size_t w = 0;
        for (const auto& token : s.at("tokens")) {
          const std::string word = fold(token.get<std::string>());
          std::string label = "O";
          if (mode_ == "electric") {
            if (word == "electric" || word == "car") label = "P";
          } else if (found != models_.end()) {
            auto hit = found->second.find(word);
            if (hit != found->second.end()) label = hit->second;
            if (known) label = (*known)[w];
          }
          if (mode_ == "uniform") {
            dists.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
          } else if (mode_ == "pieces" && word.size() > 3) {
            pieces.push_back(distribution("O", 0.6));
            pieces.push_back(distribution(label));
            owner.push_back(w);
            owner.push_back(w);
          } else {
            dists.push_back(distribution(label));
            pieces.push_back(distribution(label));
            owner.push_back(w);
          }
          ++w;
        }
        if (mode_ == "pieces")
          results.push_back({{"pieces", pieces}, {"piece_to_word", owner}});
        else
          results.push_back({{"distributions", dists}});
      }
      return json{{"op", "predictions"}, {"results", results}}.dump();
    }
    return json{{"op", "error"}, {"stage", op}, {"message", "unknown op"}}.dump();
  }

  const json& last_config() const { return last_config_; }
  std::uint64_t last_seed() const { return last_seed_; }

 private:
  std::string mode_;
  std::map<std::string, std::map<std::string, std::string>> models_;
  std::map<std::string, std::map<std::string, std::vector<std::string>>> sentences_;
  json last_config_;
  std::uint64_t last_seed_ = 0;
};

// Serves requests from `in` until end of stream or a hangup.
inline void serve(std::FILE* in, std::FILE* out, const std::string& mode) {
  MockTagger tagger(mode);
  std::string line;
  int c;
  while ((c = std::fgetc(in)) != EOF) {
    if (c != '\n') {
      line.push_back(static_cast<char>(c));
      continue;
    }
    std::string reply = tagger.handle(line);
    line.clear();
    if (reply.empty()) return;
    std::fputs(reply.c_str(), out);
    std::fputc('\n', out);
    std::fflush(out);
  }
}

}  // namespace weaktsa::mock

#endif  // WEAKTSA_TESTS_MOCK_TAGGER_H_
