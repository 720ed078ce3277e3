#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pir/protocols.hpp"
#include "pir/rational.hpp"

namespace pir {

enum class CapacityKind : std::uint8_t { General, ScalarLinear };

std::string to_string(CapacityKind k);

/// Capacity in message-symbol units: one message is L = l·log2(q) bits, and
/// rates are ratios of such units, so L never needs to be evaluated.
struct CapacityResult {
  Setting setting;
  CapacityKind kind;
  std::uint16_t K, M;
  /// The capacity, or the best known lower bound when `open`.
  Rational value;
  /// Set only for the general PCSI-II capacity with M <= (K+1)/2.
  bool open = false;
};

/// Throws ParamError when M lies outside the setting's range.
CapacityResult capacity(Setting setting, CapacityKind kind, std::uint16_t K, std::uint16_t M);

/// 1 / (number of answer symbols). Throws ParamError on an empty answer.
Rational measured_rate(const Answer& a);

/// Smallest prime field on which the setting's protocol runs at (K, M).
std::uint16_t smallest_field(Setting setting, std::uint16_t K, std::uint16_t M);

struct TableCell {
  CapacityResult capacity;
  std::uint16_t q;
  /// Rate of a live protocol run on a random instance over GF(q).
  Rational measured;
  bool decoded;
};

/// Every setting × kind × (K, M) with K_min <= K <= K_max and M across the
/// setting's full range; each (setting, K, M) gets one live run seeded by `seed`.
std::vector<TableCell> capacity_table(std::uint16_t K_min, std::uint16_t K_max,
                                      std::uint64_t seed = 1);

std::string format_table_text(const std::vector<TableCell>& cells);
/// Columns: setting, kind, K, M, capacity_num, capacity_den, open_flag,
/// measured_num, measured_den.
std::string format_table_csv(const std::vector<TableCell>& cells);

}  // namespace pir
