// Client for taggers hosted outside this process.  Messages are single-line
// JSON objects exchanged over a spawned command's stdin/stdout or a TCP
// socket ("tcp://host:port").
//
//   -> {"op":"hello","version":1}
//   <- {"op":"hello","version":1,"piece_level":bool}
//   -> {"op":"train","config":{...},"train":[...],"dev":[...],"seed":K}
//   <- {"op":"trained","model_id":"..."}
//   -> {"op":"predict","model_id":"...","sentences":[{"tokens":[...]}]}
//   <- {"op":"predictions","results":[
//        {"distributions":[[p_pos,p_neg,p_none],...]} |
//        {"pieces":[[p_pos,p_neg,p_none],...],"piece_to_word":[...]}]}
//   <- {"op":"error","stage":"...","message":"..."}   (any request)
//
// Train and dev records are labeled-sentence records plus "tokens" and
// per-token "labels" ("O", "P" or "N").

#ifndef WEAKTSA_EXTERNAL_H_
#define WEAKTSA_EXTERNAL_H_

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "weaktsa/model.h"

namespace weaktsa {

inline constexpr int kProtocolVersion = 1;

// A bidirectional line stream.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void send(std::string_view line) = 0;
  // nullopt on end of stream.
  virtual std::optional<std::string> receive() = 0;
};

// Runs `command` through /bin/sh with its stdin/stdout attached.
std::unique_ptr<LineChannel> spawn_process(const std::string& command);
std::unique_ptr<LineChannel> connect_tcp(const std::string& host, int port);

// "tcp://host:port" connects; anything else is run as a command.
std::unique_ptr<LineChannel> open_endpoint(const std::string& endpoint);

// One protocol session.  Requests are serialized per session.
class ExternalSession {
 public:
  // Performs the handshake; throws TaggerError on version mismatch.
  explicit ExternalSession(std::unique_ptr<LineChannel> channel);

  bool piece_level() const { return piece_level_; }

  // Sends a request and returns the reply, which must carry `expected_op`.
  // Error replies and malformed replies throw TaggerError naming `stage`.
  nlohmann::json request(const nlohmann::json& message, std::string_view stage,
                         std::string_view expected_op);

 private:
  std::unique_ptr<LineChannel> channel_;
  std::mutex mutex_;
  bool piece_level_ = false;
};

class ExternalModel final : public TaggerModel {
 public:
  ExternalModel(std::shared_ptr<ExternalSession> session, std::string model_id,
                std::uint64_t seed);

  std::string_view kind() const override { return "external"; }
  std::uint64_t training_seed() const override { return seed_; }
  const std::string& model_id() const { return model_id_; }

  std::vector<std::vector<TokenDistribution>> distributions(
      std::span<const Sentence> sentences) const override;

  // Writes a reference {"kind":"external","model_id","seed"}; weights stay
  // on the external side.
  void save(const std::filesystem::path& path) const override;

 private:
  std::shared_ptr<ExternalSession> session_;
  std::string model_id_;
  std::uint64_t seed_;
};

class ExternalBackend final : public TaggerBackend {
 public:
  explicit ExternalBackend(const std::string& endpoint);
  explicit ExternalBackend(std::unique_ptr<LineChannel> channel);

  std::string_view kind() const override { return "external"; }

  std::unique_ptr<TaggerModel> train(std::span<const LabeledSentence> train,
                                     std::span<const LabeledSentence> dev,
                                     const TrainConfig& config, std::uint64_t seed) override;
  std::unique_ptr<TaggerModel> load(const std::filesystem::path& path) override;

  const std::shared_ptr<ExternalSession>& session() const { return session_; }

 private:
  std::shared_ptr<ExternalSession> session_;
};

// Parses one "predictions" result into word-level distributions for a
// sentence of `words` tokens, merging piece-level results.
std::vector<TokenDistribution> parse_prediction_result(const nlohmann::json& result,
                                                       std::size_t words);

}  // namespace weaktsa

#endif  // WEAKTSA_EXTERNAL_H_
