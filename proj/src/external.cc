#include "weaktsa/external.h"

#include <fstream>

#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "weaktsa/dataset.h"

namespace weaktsa {

using nlohmann::json;

namespace {

std::string errno_text() { return std::strerror(errno); }

void write_all(int fd, std::string_view data, bool socket) {
  while (!data.empty()) {
    ssize_t n = socket ? ::send(fd, data.data(), data.size(), MSG_NOSIGNAL)
                       : ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TaggerError("write to tagger failed: " + errno_text());
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

// Buffered line reader over a file descriptor.
class FdReader {
 public:
  explicit FdReader(int fd) : fd_(fd) {}

  std::optional<std::string> line() {
    for (;;) {
      auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string out = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!out.empty() && out.back() == '\r') out.pop_back();
        return out;
      }
      char chunk[65536];
      ssize_t n = ::read(fd_, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        if (buffer_.empty()) return std::nullopt;
        std::string out;
        out.swap(buffer_);
        return out;
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buffer_;
};

class ProcessChannel final : public LineChannel {
 public:
  explicit ProcessChannel(const std::string& command) {
    std::signal(SIGPIPE, SIG_IGN);
    int to_child[2], from_child[2];
    if (::pipe(to_child) != 0) throw TaggerError("pipe: " + errno_text());
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw TaggerError("pipe: " + errno_text());
    }
    pid_ = ::fork();
    if (pid_ < 0) throw TaggerError("fork: " + errno_text());
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
    ::fcntl(write_fd_, F_SETFD, FD_CLOEXEC);
    ::fcntl(read_fd_, F_SETFD, FD_CLOEXEC);
    reader_ = std::make_unique<FdReader>(read_fd_);
  }

  ~ProcessChannel() override {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    if (pid_ > 0) {
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
  }

  void send(std::string_view line) override {
    std::string data(line);
    data.push_back('\n');
    write_all(write_fd_, data, false);
  }

  std::optional<std::string> receive() override { return reader_->line(); }

 private:
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::unique_ptr<FdReader> reader_;
};

class TcpChannel final : public LineChannel {
 public:
  TcpChannel(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0)
      throw TaggerError("connect: cannot resolve " + host + ": " + ::gai_strerror(rc));
    for (addrinfo* a = found; a != nullptr; a = a->ai_next) {
      int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
        fd_ = fd;
        break;
      }
      ::close(fd);
    }
    ::freeaddrinfo(found);
    if (fd_ < 0)
      throw TaggerError("connect: cannot reach " + host + ":" + service + ": " + errno_text());
    reader_ = std::make_unique<FdReader>(fd_);
  }

  ~TcpChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(std::string_view line) override {
    std::string data(line);
    data.push_back('\n');
    write_all(fd_, data, true);
  }

  std::optional<std::string> receive() override { return reader_->line(); }

 private:
  int fd_ = -1;
  std::unique_ptr<FdReader> reader_;
};

std::string clip(const std::string& s, std::size_t n = 200) {
  return s.size() <= n ? s : s.substr(0, n) + "...";
}

TokenDistribution parse_distribution(const json& triple) {
  if (!triple.is_array() || triple.size() != kNumLabels)
    throw TaggerError("distribution must be [p_pos, p_neg, p_none]");
  TokenDistribution d{triple[0].get<double>(), triple[1].get<double>(), triple[2].get<double>()};
  if (!d.valid(1e-5)) throw TaggerError("distribution does not sum to 1");
  return d;
}

json sentence_record(const LabeledSentence& l) {
  json record = labeled_to_json(l);
  record["tokens"] = l.sentence.words();
  json labels = json::array();
  for (Label label : encode_labels(l)) labels.push_back(label_name(label));
  record["labels"] = std::move(labels);
  return record;
}

}  // namespace

std::unique_ptr<LineChannel> spawn_process(const std::string& command) {
  return std::make_unique<ProcessChannel>(command);
}

std::unique_ptr<LineChannel> connect_tcp(const std::string& host, int port) {
  return std::make_unique<TcpChannel>(host, port);
}

std::unique_ptr<LineChannel> open_endpoint(const std::string& endpoint) {
  constexpr std::string_view kTcp = "tcp://";
  if (endpoint.rfind(kTcp, 0) == 0) {
    std::string rest = endpoint.substr(kTcp.size());
    auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw TaggerError("endpoint " + endpoint + " lacks a port");
    return connect_tcp(rest.substr(0, colon), std::stoi(rest.substr(colon + 1)));
  }
  if (endpoint.empty()) throw TaggerError("empty tagger endpoint");
  return spawn_process(endpoint);
}

ExternalSession::ExternalSession(std::unique_ptr<LineChannel> channel)
    : channel_(std::move(channel)) {
  json reply = request({{"op", "hello"}, {"version", kProtocolVersion}}, "handshake", "hello");
  if (!reply.contains("version") || !reply["version"].is_number_integer())
    throw TaggerError("handshake: reply without a protocol version: " + clip(reply.dump()));
  const int version = reply["version"].get<int>();
  if (version != kProtocolVersion)
    throw TaggerError("handshake: tagger speaks protocol version " + std::to_string(version) +
                      ", expected " + std::to_string(kProtocolVersion));
  piece_level_ = reply.value("piece_level", false);
}

json ExternalSession::request(const json& message, std::string_view stage,
                              std::string_view expected_op) {
  std::lock_guard<std::mutex> lock(mutex_);
  const std::string where(stage);
  try {
    channel_->send(message.dump());
  } catch (const TaggerError& e) {
    throw TaggerError(where + ": " + e.what());
  }
  auto line = channel_->receive();
  if (!line) throw TaggerError(where + ": tagger closed the connection");
  json reply;
  try {
    reply = json::parse(*line);
  } catch (const std::exception&) {
    throw TaggerError(where + ": malformed reply: " + clip(*line));
  }
  if (!reply.is_object() || !reply.contains("op") || !reply["op"].is_string())
    throw TaggerError(where + ": malformed reply: " + clip(*line));
  const auto& op = reply["op"].get_ref<const std::string&>();
  if (op == "error")
    throw TaggerError(where + ": tagger error at stage '" + reply.value("stage", "?") +
                      "': " + reply.value("message", ""));
  if (op != expected_op)
    throw TaggerError(where + ": expected '" + std::string(expected_op) + "' reply, got: " +
                      clip(*line));
  return reply;
}

std::vector<TokenDistribution> parse_prediction_result(const json& result, std::size_t words) {
  std::vector<TokenDistribution> out;
  if (result.contains("distributions")) {
    for (const auto& d : result["distributions"]) out.push_back(parse_distribution(d));
  } else if (result.contains("pieces")) {
    PieceAlignment alignment;
    for (const auto& d : result["pieces"]) alignment.piece_distributions.push_back(parse_distribution(d));
    alignment.piece_to_word = result.at("piece_to_word").get<std::vector<std::size_t>>();
    if (!alignment.valid()) throw TaggerError("invalid piece_to_word alignment");
    out = merge_word_pieces(alignment);
  } else {
    throw TaggerError("result has neither distributions nor pieces");
  }
  if (out.size() != words)
    throw TaggerError("result covers " + std::to_string(out.size()) + " words, sentence has " +
                      std::to_string(words));
  return out;
}

ExternalModel::ExternalModel(std::shared_ptr<ExternalSession> session, std::string model_id,
                             std::uint64_t seed)
    : session_(std::move(session)), model_id_(std::move(model_id)), seed_(seed) {}

std::vector<std::vector<TokenDistribution>> ExternalModel::distributions(
    std::span<const Sentence> sentences) const {
  std::vector<std::vector<TokenDistribution>> out;
  if (sentences.empty()) return out;
  json batch = json::array();
  for (const auto& s : sentences) batch.push_back({{"tokens", s.words()}});
  json reply = session_->request(
      {{"op", "predict"}, {"model_id", model_id_}, {"sentences", std::move(batch)}}, "predict",
      "predictions");
  const json& results = reply.value("results", json());
  if (!results.is_array() || results.size() != sentences.size())
    throw TaggerError("predict: expected " + std::to_string(sentences.size()) +
                      " results: " + clip(reply.dump()));
  out.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    try {
      out.push_back(parse_prediction_result(results[i], sentences[i].size()));
    } catch (const std::exception& e) {
      throw TaggerError("predict: result " + std::to_string(i) + ": " + e.what() + ": " +
                        clip(results[i].dump()));
    }
  }
  return out;
}

void ExternalModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw TaggerError("cannot write " + path.string());
  out << json({{"kind", "external"}, {"model_id", model_id_}, {"seed", seed_}}).dump() << '\n';
}

ExternalBackend::ExternalBackend(const std::string& endpoint)
    : ExternalBackend(open_endpoint(endpoint)) {}

ExternalBackend::ExternalBackend(std::unique_ptr<LineChannel> channel)
    : session_(std::make_shared<ExternalSession>(std::move(channel))) {}

std::unique_ptr<TaggerModel> ExternalBackend::train(std::span<const LabeledSentence> train,
                                                    std::span<const LabeledSentence> dev,
                                                    const TrainConfig& config,
                                                    std::uint64_t seed) {
  if (train.empty()) throw TaggerError("train: empty training set");
  json train_records = json::array(), dev_records = json::array();
  for (const auto& l : train) train_records.push_back(sentence_record(l));
  for (const auto& l : dev) dev_records.push_back(sentence_record(l));
  json config_json = {{"learning_rate", config.learning_rate},
                      {"adam_epsilon", config.adam_epsilon},
                      {"batch_size", config.batch_size},
                      {"max_epochs", config.max_epochs},
                      {"min_delta", config.min_delta}};
  json reply = session_->request({{"op", "train"},
                                  {"config", std::move(config_json)},
                                  {"train", std::move(train_records)},
                                  {"dev", std::move(dev_records)},
                                  {"seed", seed}},
                                 "train", "trained");
  if (!reply.contains("model_id") || !reply["model_id"].is_string())
    throw TaggerError("train: reply without model_id: " + clip(reply.dump()));
  return std::make_unique<ExternalModel>(session_, reply["model_id"].get<std::string>(), seed);
}

std::unique_ptr<TaggerModel> ExternalBackend::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TaggerError("cannot open " + path.string());
  json j = json::parse(in);
  if (j.value("kind", "") != "external")
    throw TaggerError(path.string() + " is not an external model reference");
  return std::make_unique<ExternalModel>(session_, j.at("model_id").get<std::string>(),
                                         j.value("seed", std::uint64_t{0}));
}

}  // namespace weaktsa
