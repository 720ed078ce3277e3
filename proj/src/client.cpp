#include "pir/client.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "pir/rates.hpp"
#include "pir/rng.hpp"

namespace pir {

Connection::Connection(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_NUMERICSERV;
  addrinfo* res = nullptr;
  const auto service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
    throw NetworkError("resolve " + host + ": " + ::gai_strerror(rc));
  std::string last_error = "no usable address";
  for (auto* ai = res; ai; ai = ai->ai_next) {
    fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd_ < 0) continue;
    if (::connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) break;
    last_error = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) throw NetworkError("connect " + host + ":" + service + ": " + last_error);
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

Connection::~Connection() {
  if (fd_ >= 0) ::close(fd_);
}

void Connection::send(const wire::Frame& f) {
  const auto bytes = wire::encode_frame(f);
  net::write_frame(fd_, f);
  sent_.insert(sent_.end(), bytes.begin(), bytes.end());
}

wire::Frame Connection::receive() {
  auto f = net::read_frame(fd_);
  if (!f) throw NetworkError("server closed the connection");
  const auto bytes = wire::encode_frame(*f);
  received_.insert(received_.end(), bytes.begin(), bytes.end());
  return *f;
}

wire::Frame Connection::exchange(const wire::Frame& f, wire::FrameType expected) {
  send(f);
  auto reply = receive();
  if (reply.type == wire::FrameType::Error) {
    auto [code, msg] = wire::decode_error(reply.payload);
    throw ServerError(code, msg);
  }
  if (reply.type != expected)
    throw NetworkError("expected " + wire::to_string(expected) + ", got " +
                       wire::to_string(reply.type));
  return reply;
}

RetrieveResult retrieve(const RetrieveConfig& cfg) {
  const auto session = wire::SessionParams::from(cfg.setting, cfg.params);
  Rng rng(cfg.seed);
  const auto prepared = prepare_query(cfg.setting, cfg.params, cfg.secret, rng);

  Connection conn(cfg.host, cfg.port);
  const auto ack =
      conn.exchange({wire::FrameType::Hello, wire::encode_session(session)}, wire::FrameType::HelloAck);
  if (wire::decode_session(ack.payload) != session)
    throw NetworkError("server acknowledged different session parameters");

  const auto reply = conn.exchange({wire::FrameType::Query, wire::encode_query(prepared.query)},
                                   wire::FrameType::Answer);
  const auto ans = wire::decode_answer(reply.payload, cfg.params.q, cfg.params.l);
  auto message = decode(ans, prepared.state, cfg.side_info);
  return {std::move(message),
          Transcript{conn.sent(), conn.received(), ans.symbols.size(), measured_rate(ans)}};
}

Message retrieve_local(const RetrieveConfig& cfg, const Database& db) {
  Rng rng(cfg.seed);
  const auto prepared = prepare_query(cfg.setting, cfg.params, cfg.secret, rng);
  return decode(answer(prepared.query, db), prepared.state, cfg.side_info);
}

}  // namespace pir
