#include "pir/field.hpp"

#include <ostream>
#include <string>

#include "pir/rng.hpp"

namespace pir {

bool is_prime(std::uint32_t n) noexcept {
  if (n < 2 || n > 0xFFFF) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

Fq::Fq(std::uint64_t value, std::uint32_t modulus) {
  if (!is_prime(modulus))
    throw ParamError("field order " + std::to_string(modulus) + " is not a prime below 2^16");
  modulus_ = static_cast<std::uint16_t>(modulus);
  value_ = static_cast<std::uint16_t>(value % modulus);
}

void Fq::check_same_field(const Fq& rhs) const {
  if (modulus_ != rhs.modulus_)
    throw ModulusMismatch("GF(" + std::to_string(modulus_) + ") vs GF(" +
                          std::to_string(rhs.modulus_) + ")");
}

Fq Fq::operator-() const noexcept {
  return Fq(value_ == 0 ? 0 : static_cast<std::uint16_t>(modulus_ - value_), modulus_, Unchecked{});
}

Fq& Fq::operator+=(const Fq& rhs) {
  check_same_field(rhs);
  value_ = static_cast<std::uint16_t>((std::uint32_t{value_} + rhs.value_) % modulus_);
  return *this;
}

Fq& Fq::operator-=(const Fq& rhs) {
  check_same_field(rhs);
  value_ = static_cast<std::uint16_t>((std::uint32_t{value_} + modulus_ - rhs.value_) % modulus_);
  return *this;
}

Fq& Fq::operator*=(const Fq& rhs) {
  check_same_field(rhs);
  value_ = static_cast<std::uint16_t>((std::uint32_t{value_} * rhs.value_) % modulus_);
  return *this;
}

Fq& Fq::operator/=(const Fq& rhs) {
  check_same_field(rhs);
  return *this *= rhs.inv();
}

Fq Fq::pow(std::uint64_t exponent) const noexcept {
  std::uint32_t base = value_, acc = 1 % modulus_;
  while (exponent) {
    if (exponent & 1) acc = acc * base % modulus_;
    base = base * base % modulus_;
    exponent >>= 1;
  }
  return Fq(static_cast<std::uint16_t>(acc), modulus_, Unchecked{});
}

Fq Fq::inv() const {
  if (value_ == 0) throw DivisionByZero();
  // Fermat: a^(q-2) = a^-1 for prime q
  return pow(modulus_ - 2u);
}

std::ostream& operator<<(std::ostream& os, const Fq& a) { return os << a.value(); }

PrimeField::PrimeField(std::uint32_t q) : q_(Fq(0, q).modulus()) {}

std::vector<Fq> PrimeField::elements() const {
  std::vector<Fq> out;
  out.reserve(q_);
  for (std::uint32_t v = 0; v < q_; ++v) out.emplace_back(v, q_);
  return out;
}

std::vector<Fq> PrimeField::nonzero_elements() const {
  std::vector<Fq> out;
  out.reserve(q_ - 1u);
  for (std::uint32_t v = 1; v < q_; ++v) out.emplace_back(v, q_);
  return out;
}

Message::Message(std::vector<Fq> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw ParamError("message must have extension degree l >= 1");
  for (const auto& c : coords_)
    if (c.modulus() != coords_.front().modulus())
      throw ModulusMismatch("message coordinates over different fields");
}

Message Message::zero(const PrimeField& field, std::size_t l) {
  return Message(std::vector<Fq>(l, field.zero()));
}

bool Message::is_zero() const noexcept {
  for (const auto& c : coords_)
    if (!c.is_zero()) return false;
  return true;
}

void Message::check_compatible(const Message& rhs) const {
  if (degree() != rhs.degree())
    throw ShapeMismatch("messages of different extension degree");
  if (modulus() != rhs.modulus())
    throw ModulusMismatch("messages over different fields");
}

Message& Message::operator+=(const Message& rhs) {
  check_compatible(rhs);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += rhs.coords_[i];
  return *this;
}

Message& Message::operator-=(const Message& rhs) {
  check_compatible(rhs);
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= rhs.coords_[i];
  return *this;
}

Message msg_scale(const Fq& c, const Message& x) {
  std::vector<Fq> out(x.coords().begin(), x.coords().end());
  for (auto& v : out) v = c * v;
  return Message(std::move(out));
}

std::ostream& operator<<(std::ostream& os, const Message& m) {
  os << '(';
  for (std::size_t i = 0; i < m.degree(); ++i) os << (i ? "," : "") << m[i];
  return os << ')';
}

Fq sample_nonzero(const PrimeField& field, Rng& rng) {
  return field(1 + rng.uniform(field.order() - 1u));
}

Fq sample_element(const PrimeField& field, Rng& rng) { return field(rng.uniform(field.order())); }

Message sample_message(const PrimeField& field, std::size_t l, Rng& rng) {
  std::vector<Fq> coords;
  coords.reserve(l);
  for (std::size_t i = 0; i < l; ++i) coords.push_back(sample_element(field, rng));
  return Message(std::move(coords));
}

}  // namespace pir
