#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pir/model.hpp"
#include "pir/protocols.hpp"

namespace pir::wire {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 10;  // "PIRC" + version + type + u32 length
inline constexpr std::uint32_t kMaxPayload = 64u << 20;

enum class FrameType : std::uint8_t { Hello = 1, HelloAck = 2, Query = 3, Answer = 4, Error = 5 };

enum class ErrorCode : std::uint8_t {
  ParamMismatch = 1,
  Malformed = 2,
  BadQuery = 3,
  Unexpected = 4,
};

std::string to_string(FrameType t);
std::string to_string(ErrorCode c);

struct Frame {
  FrameType type;
  Bytes payload;
  friend bool operator==(const Frame&, const Frame&) = default;
};

Bytes encode_frame(const Frame& f);

/// Validates magic, version and type; returns (type, payload length).
/// Throws DecodeError on any mismatch or a length above kMaxPayload.
std::pair<FrameType, std::uint32_t> parse_header(std::span<const std::uint8_t> header);

/// Decodes exactly one frame occupying the whole buffer.
Frame decode_frame(std::span<const std::uint8_t> bytes);

/// What the server is told in HELLO: the model and setting, never (W, S, C).
struct SessionParams {
  std::uint16_t K = 0, M = 0, q = 0, l = 0;
  Setting setting = Setting::PcsiI;
  std::uint8_t theta = 0;

  static SessionParams from(Setting s, const ProblemParams& p);
  ProblemParams problem() const;
  /// Throws ParamError when θ disagrees with the setting or the ranges are invalid.
  void validate() const;

  friend bool operator==(const SessionParams&, const SessionParams&) = default;
};

Bytes encode_session(const SessionParams& s);
SessionParams decode_session(std::span<const std::uint8_t> bytes);

/// Canonical injective query encoding. Equal queries have equal bytes, so the
/// encoding doubles as the auditor's key.
Bytes encode_query(const Query& q);
/// The form (matrix vs index/coefficient) follows from the setting; K and q
/// bound indices and elements.
Query decode_query(std::span<const std::uint8_t> bytes, Setting setting, std::uint16_t K,
                   std::uint16_t q);

Bytes encode_answer(const Answer& a);
Answer decode_answer(std::span<const std::uint8_t> bytes, std::uint16_t q, std::uint16_t l);

Bytes encode_error(ErrorCode code, const std::string& message);
std::pair<ErrorCode, std::string> decode_error(std::span<const std::uint8_t> bytes);

/// Flat database file: "PIRDB1", q, l (u16 LE), K (u32 LE), two zero bytes,
/// then K·l elements as u16 LE.
Bytes encode_database(const Database& db);
Database decode_database(std::span<const std::uint8_t> bytes);
void save_database(const std::filesystem::path& path, const Database& db);
Database load_database(const std::filesystem::path& path);

std::string to_hex(std::span<const std::uint8_t> bytes);
inline std::string to_hex(const std::string& s) {
  return to_hex(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

}  // namespace pir::wire
