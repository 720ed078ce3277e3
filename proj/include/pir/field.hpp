#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pir/error.hpp"

namespace pir {

class Rng;

/// True iff n is a prime below 2^16.
bool is_prime(std::uint32_t n) noexcept;

/// An element of the prime field GF(q). The modulus travels with the value
/// and every binary operation checks that both operands agree on it.
class Fq {
 public:
  /// Reduces `value` modulo `modulus`; throws ParamError unless the modulus
  /// is a prime below 2^16.
  Fq(std::uint64_t value, std::uint32_t modulus);

  std::uint16_t value() const noexcept { return value_; }
  std::uint16_t modulus() const noexcept { return modulus_; }
  bool is_zero() const noexcept { return value_ == 0; }

  Fq operator-() const noexcept;
  Fq inv() const;
  Fq pow(std::uint64_t exponent) const noexcept;

  Fq& operator+=(const Fq& rhs);
  Fq& operator-=(const Fq& rhs);
  Fq& operator*=(const Fq& rhs);
  Fq& operator/=(const Fq& rhs);

  friend bool operator==(const Fq&, const Fq&) = default;
  friend std::strong_ordering operator<=>(const Fq&, const Fq&) = default;

 private:
  struct Unchecked {};
  Fq(std::uint16_t value, std::uint16_t modulus, Unchecked) noexcept
      : modulus_(modulus), value_(value) {}
  void check_same_field(const Fq& rhs) const;

  // modulus first so that ordering groups by field
  std::uint16_t modulus_;
  std::uint16_t value_;
};

inline Fq operator+(Fq a, const Fq& b) { return a += b; }
inline Fq operator-(Fq a, const Fq& b) { return a -= b; }
inline Fq operator*(Fq a, const Fq& b) { return a *= b; }
inline Fq operator/(Fq a, const Fq& b) { return a /= b; }

std::ostream& operator<<(std::ostream& os, const Fq& a);

/// Convenience handle for building elements of one fixed field.
class PrimeField {
 public:
  explicit PrimeField(std::uint32_t q);

  std::uint16_t order() const noexcept { return q_; }
  Fq operator()(std::uint64_t v) const { return Fq(v, q_); }
  Fq zero() const { return Fq(0, q_); }
  Fq one() const { return Fq(1, q_); }
  std::vector<Fq> elements() const;
  std::vector<Fq> nonzero_elements() const;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint16_t q_;
};

/// A message of F_{q^l} stored as its l coordinates over GF(q). Only the
/// F_q-scalar action is ever needed, so no extension-field product exists.
class Message {
 public:
  Message(std::vector<Fq> coords);
  static Message zero(const PrimeField& field, std::size_t l);

  std::size_t degree() const noexcept { return coords_.size(); }
  std::uint16_t modulus() const noexcept { return coords_.front().modulus(); }
  std::span<const Fq> coords() const noexcept { return coords_; }
  const Fq& operator[](std::size_t i) const { return coords_.at(i); }
  bool is_zero() const noexcept;

  Message& operator+=(const Message& rhs);
  Message& operator-=(const Message& rhs);

  friend bool operator==(const Message&, const Message&) = default;

 private:
  void check_compatible(const Message& rhs) const;
  std::vector<Fq> coords_;
};

inline Message operator+(Message a, const Message& b) { return a += b; }
inline Message operator-(Message a, const Message& b) { return a -= b; }

/// Coordinate-wise product c·x.
Message msg_scale(const Fq& c, const Message& x);
inline Message msg_add(const Message& x, const Message& y) { return x + y; }
inline Message operator*(const Fq& c, const Message& x) { return msg_scale(c, x); }

std::ostream& operator<<(std::ostream& os, const Message& m);

/// Uniform draw from GF(q)^× .
Fq sample_nonzero(const PrimeField& field, Rng& rng);
/// Uniform draw from GF(q).
Fq sample_element(const PrimeField& field, Rng& rng);
/// Uniform draw from F_{q^l}.
Message sample_message(const PrimeField& field, std::size_t l, Rng& rng);

}  // namespace pir
