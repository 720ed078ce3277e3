#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "pir/wire.hpp"

namespace pir {

class NetworkError : public Error {
 public:
  using Error::Error;
};

/// "host:port" → (host, port). Throws ParamError on a malformed address.
std::pair<std::string, std::uint16_t> parse_address(const std::string& addr);

namespace net {
/// Blocking frame I/O on a connected socket. read_frame returns nullopt on a
/// clean EOF before any header byte; DecodeError on a malformed header.
std::optional<wire::Frame> read_frame(int fd);
void write_frame(int fd, const wire::Frame& f);
}  // namespace net

/// Socket-free server state machine for one connection. The server sees the
/// setting and θ from HELLO but never (W, S, C).
class SessionHandler {
 public:
  explicit SessionHandler(const Database& db) : db_(db) {}

  struct Reply {
    wire::Frame frame;
    bool close = false;
  };

  Reply on_frame(const wire::Frame& in);
  const std::optional<wire::SessionParams>& session() const { return session_; }

 private:
  static Reply error(wire::ErrorCode code, const std::string& msg, bool close);

  const Database& db_;
  std::optional<wire::SessionParams> session_;
};

/// Thread-per-connection TCP server over an immutable database.
class Server {
 public:
  explicit Server(Database db);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and listens; port 0 picks an ephemeral port. Returns the bound port.
  std::uint16_t bind(const std::string& host, std::uint16_t port);
  /// Accept loop; returns after stop().
  void run();
  /// bind + run on a background thread.
  std::uint16_t start(const std::string& host, std::uint16_t port);
  /// Closes the listener and all live connections, then joins every thread.
  void stop();

  std::uint16_t port() const { return port_; }
  const Database& database() const { return db_; }

 private:
  struct Connection {
    int fd;
    std::thread thread;
    std::atomic<bool> done{false};
  };

  void serve_connection(Connection& conn);
  void reap_finished();

  const Database db_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex mu_;
  std::list<std::unique_ptr<Connection>> connections_;
};

}  // namespace pir
