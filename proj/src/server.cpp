#include "pir/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

namespace pir {

std::pair<std::string, std::uint16_t> parse_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon + 1 == addr.size())
    throw ParamError("address must look like host:port, got '" + addr + "'");
  std::string host = addr.substr(0, colon);
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']')
    host = host.substr(1, host.size() - 2);
  if (host.empty()) host = "127.0.0.1";
  unsigned port = 0;
  const auto* first = addr.data() + colon + 1;
  const auto* last = addr.data() + addr.size();
  auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || ptr != last || port > 65535)
    throw ParamError("bad port in '" + addr + "'");
  return {host, static_cast<std::uint16_t>(port)};
}

namespace net {

namespace {

/// False on EOF before any byte was read; throws on a partial read.
bool read_exact(int fd, std::uint8_t* buf, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const auto r = ::recv(fd, buf + got, n - got, 0);
    if (r == 0) {
      if (got == 0) return false;
      throw NetworkError("connection closed mid-frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      throw NetworkError(std::string("recv: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

}  // namespace

std::optional<wire::Frame> read_frame(int fd) {
  std::uint8_t header[wire::kHeaderSize];
  if (!read_exact(fd, header, sizeof header)) return std::nullopt;
  auto [type, len] = wire::parse_header(header);
  wire::Frame f{type, wire::Bytes(len)};
  if (len > 0 && !read_exact(fd, f.payload.data(), len))
    throw NetworkError("connection closed mid-frame");
  return f;
}

void write_frame(int fd, const wire::Frame& f) {
  const auto bytes = wire::encode_frame(f);
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const auto r = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw NetworkError(std::string("send: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(r);
  }
}

}  // namespace net

// ---------------------------------------------------------------------------

SessionHandler::Reply SessionHandler::error(wire::ErrorCode code, const std::string& msg,
                                            bool close) {
  return Reply{wire::Frame{wire::FrameType::Error, wire::encode_error(code, msg)}, close};
}

SessionHandler::Reply SessionHandler::on_frame(const wire::Frame& in) {
  using wire::ErrorCode;
  using wire::FrameType;
  switch (in.type) {
    case FrameType::Hello: {
      wire::SessionParams s;
      try {
        s = wire::decode_session(in.payload);
      } catch (const DecodeError& e) {
        return error(ErrorCode::Malformed, e.what(), true);
      }
      const auto& x = db_.front();
      if (s.K != db_.size() || s.q != x.modulus() || s.l != x.degree())
        return error(ErrorCode::ParamMismatch,
                     "database holds K=" + std::to_string(db_.size()) +
                         " q=" + std::to_string(x.modulus()) + " l=" + std::to_string(x.degree()),
                     false);
      try {
        s.validate();
      } catch (const Error& e) {
        return error(ErrorCode::ParamMismatch, e.what(), false);
      }
      session_ = s;
      return Reply{wire::Frame{FrameType::HelloAck, wire::encode_session(s)}, false};
    }
    case FrameType::Query: {
      if (!session_) return error(ErrorCode::Unexpected, "QUERY before HELLO", false);
      std::optional<Query> q;
      try {
        q = wire::decode_query(in.payload, session_->setting, session_->K, session_->q);
      } catch (const DecodeError& e) {
        return error(ErrorCode::Malformed, e.what(), true);
      }
      try {
        check_query_shape(session_->setting, session_->problem(), *q);
        return Reply{wire::Frame{FrameType::Answer, wire::encode_answer(answer(*q, db_))}, false};
      } catch (const Error& e) {
        return error(ErrorCode::BadQuery, e.what(), false);
      }
    }
    default:
      return error(ErrorCode::Unexpected, "unexpected " + wire::to_string(in.type) + " frame",
                   false);
  }
}

// ---------------------------------------------------------------------------

Server::Server(Database db) : db_(std::move(db)) {
  if (db_.empty()) throw ParamError("server needs a nonempty database");
}

Server::~Server() { stop(); }

std::uint16_t Server::bind(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE | AI_NUMERICSERV;
  addrinfo* res = nullptr;
  const auto service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
    throw NetworkError("resolve " + host + ": " + ::gai_strerror(rc));

  int fd = -1;
  std::string last_error = "no usable address";
  for (auto* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) break;
    last_error = std::strerror(errno);
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw NetworkError("bind " + host + ":" + service + ": " + last_error);

  sockaddr_storage bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.ss_family == AF_INET6
                    ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                    : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
  listen_fd_ = fd;
  return port_;
}

void Server::reap_finished() {
  std::lock_guard lock(mu_);
  for (auto it = connections_.begin(); it != connections_.end();) {
    if ((*it)->done) {
      (*it)->thread.join();
      it = connections_.erase(it);
    } else {
      ++it;
    }
  }
}

void Server::run() {
  if (listen_fd_ < 0) throw NetworkError("server is not bound");
  while (!stopping_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      if (stopping_) break;
      throw NetworkError(std::string("accept: ") + std::strerror(errno));
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    reap_finished();
    std::lock_guard lock(mu_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    auto conn = std::make_unique<Connection>();
    conn->fd = fd;
    auto* raw = conn.get();
    conn->thread = std::thread([this, raw] { serve_connection(*raw); });
    connections_.push_back(std::move(conn));
  }
}

std::uint16_t Server::start(const std::string& host, std::uint16_t port) {
  const auto bound = bind(host, port);
  accept_thread_ = std::thread([this] {
    try {
      run();
    } catch (const std::exception&) {
      // listener failure ends the accept loop; stop() still cleans up
    }
  });
  return bound;
}

void Server::stop() {
  if (stopping_.exchange(true)) return;
  if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
  if (accept_thread_.joinable()) accept_thread_.join();
  {
    std::lock_guard lock(mu_);
    for (auto& c : connections_)
      if (c->fd >= 0) ::shutdown(c->fd, SHUT_RDWR);
  }
  for (auto& c : connections_) c->thread.join();
  connections_.clear();
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
}

void Server::serve_connection(Connection& conn) {
  SessionHandler handler(db_);
  try {
    while (true) {
      std::optional<wire::Frame> in;
      try {
        in = net::read_frame(conn.fd);
      } catch (const DecodeError& e) {
        net::write_frame(conn.fd, wire::Frame{wire::FrameType::Error,
                                              wire::encode_error(wire::ErrorCode::Malformed,
                                                                 e.what())});
        break;
      }
      if (!in) break;
      auto reply = handler.on_frame(*in);
      net::write_frame(conn.fd, reply.frame);
      if (reply.close) break;
    }
  } catch (const std::exception&) {
    // peer went away or the server is stopping
  }
  std::lock_guard lock(mu_);
  ::close(conn.fd);
  conn.fd = -1;
  conn.done = true;
}

}  // namespace pir
