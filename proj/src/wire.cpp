#include "pir/wire.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

namespace pir::wire {

namespace {

constexpr char kMagic[4] = {'P', 'I', 'R', 'C'};
constexpr char kDbMagic[6] = {'P', 'I', 'R', 'D', 'B', '1'};
constexpr std::size_t kDbHeader = 16;

struct Writer {
  Bytes out;
  void u8(std::uint8_t v) { out.push_back(v); }
  void u16(std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
};

struct Reader {
  std::span<const std::uint8_t> in;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (in.size() - pos < n) throw DecodeError("truncated payload");
  }
  std::uint8_t u8() {
    need(1);
    return in[pos++];
  }
  std::uint16_t u16() {
    need(2);
    auto v = static_cast<std::uint16_t>(in[pos] | (in[pos + 1] << 8));
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  Fq element(std::uint16_t q) {
    auto v = u16();
    if (v >= q) throw DecodeError("field element " + std::to_string(v) + " >= q");
    return Fq(v, q);
  }
  void finish() const {
    if (pos != in.size()) throw DecodeError("trailing bytes after payload");
  }
};

bool known_type(std::uint8_t t) { return t >= 1 && t <= 5; }

void check_modulus(std::uint16_t q) {
  if (!is_prime(q)) throw DecodeError("q = " + std::to_string(q) + " is not prime");
}

}  // namespace

std::string to_string(FrameType t) {
  switch (t) {
    case FrameType::Hello: return "HELLO";
    case FrameType::HelloAck: return "HELLO_ACK";
    case FrameType::Query: return "QUERY";
    case FrameType::Answer: return "ANSWER";
    case FrameType::Error: return "ERROR";
  }
  return "UNKNOWN";
}

std::string to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParamMismatch: return "PARAM_MISMATCH";
    case ErrorCode::Malformed: return "MALFORMED";
    case ErrorCode::BadQuery: return "BAD_QUERY";
    case ErrorCode::Unexpected: return "UNEXPECTED";
  }
  return "UNKNOWN";
}

Bytes encode_frame(const Frame& f) {
  if (f.payload.size() > kMaxPayload) throw ParamError("payload too large");
  Writer w;
  w.raw(kMagic, 4);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(f.type));
  w.u32(static_cast<std::uint32_t>(f.payload.size()));
  w.raw(f.payload.data(), f.payload.size());
  return std::move(w.out);
}

std::pair<FrameType, std::uint32_t> parse_header(std::span<const std::uint8_t> header) {
  if (header.size() < kHeaderSize) throw DecodeError("truncated frame header");
  if (std::memcmp(header.data(), kMagic, 4) != 0) throw DecodeError("bad frame magic");
  if (header[4] != kVersion) throw DecodeError("unsupported version " + std::to_string(header[4]));
  if (!known_type(header[5])) throw DecodeError("unknown frame type " + std::to_string(header[5]));
  Reader r{header.subspan(6, 4)};
  const auto len = r.u32();
  if (len > kMaxPayload) throw DecodeError("payload length too large");
  return {static_cast<FrameType>(header[5]), len};
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  auto [type, len] = parse_header(bytes);
  if (bytes.size() - kHeaderSize != len) throw DecodeError("frame length mismatch");
  return Frame{type, Bytes(bytes.begin() + kHeaderSize, bytes.end())};
}

SessionParams SessionParams::from(Setting s, const ProblemParams& p) {
  return SessionParams{p.K, p.M, p.q, p.l, s, theta_of(p.model)};
}

ProblemParams SessionParams::problem() const { return params_for(setting, K, M, q, l); }

void SessionParams::validate() const {
  if (theta != theta_of(model_of(setting)))
    throw ParamError("theta does not match setting " + pir::to_string(setting));
  problem().validate();
}

Bytes encode_session(const SessionParams& s) {
  Writer w;
  w.u16(s.K);
  w.u16(s.M);
  w.u16(s.q);
  w.u16(s.l);
  w.u8(static_cast<std::uint8_t>(s.setting));
  w.u8(s.theta);
  return std::move(w.out);
}

SessionParams decode_session(std::span<const std::uint8_t> bytes) {
  Reader r{bytes};
  SessionParams s;
  s.K = r.u16();
  s.M = r.u16();
  s.q = r.u16();
  s.l = r.u16();
  const auto setting = r.u8();
  if (setting > 3) throw DecodeError("unknown setting id " + std::to_string(setting));
  s.setting = static_cast<Setting>(setting);
  s.theta = r.u8();
  if (s.theta > 1) throw DecodeError("theta must be 0 or 1");
  r.finish();
  return s;
}

Bytes encode_query(const Query& q) {
  Writer w;
  if (const auto* g = std::get_if<GrsQuery>(&q)) {
    if (g->coeffs.rows() > 0xffff) throw ParamError("too many rows");
    w.u16(static_cast<std::uint16_t>(g->coeffs.rows()));
    for (std::size_t r = 0; r < g->coeffs.rows(); ++r)
      for (const auto& x : g->coeffs.row(r)) w.u16(x.value());
    return std::move(w.out);
  }
  const auto& ic = std::get<IndexCoeffQuery>(q);
  if (ic.parts.size() > 0xff) throw ParamError("too many query parts");
  w.u8(static_cast<std::uint8_t>(ic.parts.size()));
  for (const auto& part : ic.parts) {
    if (part.indices.size() != part.coeffs.size()) throw ShapeMismatch("|U| != |V|");
    w.u16(static_cast<std::uint16_t>(part.indices.size()));
    for (auto i : part.indices) w.u16(i);
    for (const auto& c : part.coeffs) w.u16(c.value());
  }
  return std::move(w.out);
}

Query decode_query(std::span<const std::uint8_t> bytes, Setting setting, std::uint16_t K,
                   std::uint16_t q) {
  check_modulus(q);
  if (K == 0) throw DecodeError("K must be positive");
  Reader r{bytes};
  if (setting == Setting::PcsiI || setting == Setting::PcsiII) {
    const auto rows = r.u16();
    if (rows == 0) throw DecodeError("empty coefficient matrix");
    r.need(std::size_t{rows} * K * 2);
    FqMatrix m(rows, K, PrimeField(q));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < K; ++j) m(i, j) = r.element(q);
    r.finish();
    return GrsQuery{std::move(m)};
  }
  IndexCoeffQuery out;
  const auto parts = r.u8();
  if (parts == 0) throw DecodeError("query without parts");
  for (std::size_t p = 0; p < parts; ++p) {
    QueryPart part;
    const auto n = r.u16();
    r.need(std::size_t{n} * 4);
    for (std::size_t k = 0; k < n; ++k) {
      const auto idx = r.u16();
      if (idx < 1 || idx > K) throw DecodeError("index " + std::to_string(idx) + " out of range");
      part.indices.push_back(idx);
    }
    for (std::size_t k = 0; k < n; ++k) part.coeffs.push_back(r.element(q));
    out.parts.push_back(std::move(part));
  }
  r.finish();
  return out;
}

Bytes encode_answer(const Answer& a) {
  Writer w;
  if (a.symbols.size() > 0xffff) throw ParamError("too many answer symbols");
  w.u16(static_cast<std::uint16_t>(a.symbols.size()));
  for (const auto& m : a.symbols)
    for (const auto& c : m.coords()) w.u16(c.value());
  return std::move(w.out);
}

Answer decode_answer(std::span<const std::uint8_t> bytes, std::uint16_t q, std::uint16_t l) {
  check_modulus(q);
  if (l == 0) throw DecodeError("l must be positive");
  Reader r{bytes};
  const auto n = r.u16();
  r.need(std::size_t{n} * l * 2);
  Answer a;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Fq> coords;
    for (std::size_t k = 0; k < l; ++k) coords.push_back(r.element(q));
    a.symbols.emplace_back(std::move(coords));
  }
  r.finish();
  return a;
}

Bytes encode_error(ErrorCode code, const std::string& message) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(code));
  w.raw(message.data(), message.size());
  return std::move(w.out);
}

std::pair<ErrorCode, std::string> decode_error(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw DecodeError("empty error payload");
  if (bytes[0] < 1 || bytes[0] > 4) throw DecodeError("unknown error code");
  return {static_cast<ErrorCode>(bytes[0]), std::string(bytes.begin() + 1, bytes.end())};
}

Bytes encode_database(const Database& db) {
  if (db.empty()) throw ParamError("empty database");
  const auto q = db.front().modulus();
  const auto l = db.front().degree();
  if (l > 0xffff) throw ParamError("l too large");
  Writer w;
  w.raw(kDbMagic, 6);
  w.u16(q);
  w.u16(static_cast<std::uint16_t>(l));
  w.u32(static_cast<std::uint32_t>(db.size()));
  w.u16(0);
  for (const auto& m : db) {
    if (m.modulus() != q || m.degree() != l) throw ShapeMismatch("inconsistent database messages");
    for (const auto& c : m.coords()) w.u16(c.value());
  }
  return std::move(w.out);
}

Database decode_database(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kDbHeader || std::memcmp(bytes.data(), kDbMagic, 6) != 0)
    throw DecodeError("not a database file");
  Reader r{bytes, 6};
  const auto q = r.u16();
  const auto l = r.u16();
  const auto K = r.u32();
  if (r.u16() != 0) throw DecodeError("reserved header bytes must be zero");
  check_modulus(q);
  if (l == 0 || K == 0 || K > 0xffff) throw DecodeError("bad database dimensions");
  r.need(std::size_t{K} * l * 2);
  Database db;
  db.reserve(K);
  for (std::size_t i = 0; i < K; ++i) {
    std::vector<Fq> coords;
    for (std::size_t k = 0; k < l; ++k) coords.push_back(r.element(q));
    db.emplace_back(std::move(coords));
  }
  r.finish();
  return db;
}

void save_database(const std::filesystem::path& path, const Database& db) {
  const auto bytes = encode_database(db);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write failed: " + path.string());
}

Database load_database(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_database(bytes);
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

}  // namespace pir::wire
