#pragma once

#include <cstdint>
#include <string>

#include "pir/rational.hpp"
#include "pir/server.hpp"

namespace pir {

/// The server answered with an ERROR frame.
class ServerError : public Error {
 public:
  ServerError(wire::ErrorCode code, const std::string& message)
      : Error("server error " + wire::to_string(code) + ": " + message), code_(code) {}
  wire::ErrorCode code() const noexcept { return code_; }

 private:
  wire::ErrorCode code_;
};

/// One TCP session with a server.
class Connection {
 public:
  Connection(const std::string& host, std::uint16_t port);
  ~Connection();
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  void send(const wire::Frame& f);
  /// Throws NetworkError if the server hung up.
  wire::Frame receive();
  /// send + receive; an ERROR reply raises ServerError.
  wire::Frame exchange(const wire::Frame& f, wire::FrameType expected);

  /// Every byte written and read so far, in order.
  const wire::Bytes& sent() const { return sent_; }
  const wire::Bytes& received() const { return received_; }

 private:
  int fd_ = -1;
  wire::Bytes sent_, received_;
};

struct RetrieveConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  Setting setting = Setting::PcsiI;
  ProblemParams params;
  Secret secret;
  Message side_info;
  std::uint64_t seed = 0;
};

struct Transcript {
  wire::Bytes sent;
  wire::Bytes received;
  std::size_t symbols = 0;
  Rational rate;
};

struct RetrieveResult {
  Message message;
  Transcript transcript;
};

/// HELLO, QUERY, ANSWER, then local decoding. The query is generated from
/// Rng(seed), so a fixed seed yields a fixed transcript.
RetrieveResult retrieve(const RetrieveConfig& cfg);

/// The same run without a network: identical query, answer and decode.
Message retrieve_local(const RetrieveConfig& cfg, const Database& db);

}  // namespace pir
