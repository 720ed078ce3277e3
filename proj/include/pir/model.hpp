#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pir/field.hpp"

namespace pir {

class Rng;

/// Model I: the demand lies outside the side-information support.
/// Model II: the demand is one of the support indices.
enum class Model : std::uint8_t { I = 0, II = 1 };

/// θ = 1{W ∈ S} implied by a model.
constexpr std::uint8_t theta_of(Model m) noexcept { return static_cast<std::uint8_t>(m); }

struct ProblemParams {
  std::uint16_t K = 0;  ///< number of messages
  std::uint16_t M = 0;  ///< side-information support size
  Model model = Model::I;
  std::uint16_t q = 2;  ///< prime base field
  std::uint16_t l = 1;  ///< extension degree

  PrimeField field() const { return PrimeField(q); }

  /// Throws ParamError if the parameters violate the model's ranges.
  void validate() const;

  friend bool operator==(const ProblemParams&, const ProblemParams&) = default;
};

/// The user's private realization (W, S, C). Indices are 1-based; S is
/// sorted ascending and C is aligned with it.
struct Secret {
  std::uint16_t demand = 0;
  std::vector<std::uint16_t> support;
  std::vector<Fq> coeffs;

  bool demand_in_support() const;
  /// Coefficient c_j of support index j; throws IndexError if j ∉ S.
  const Fq& coeff_of(std::uint16_t j) const;
  std::size_t position_of(std::uint16_t j) const;

  friend bool operator==(const Secret&, const Secret&) = default;
  friend auto operator<=>(const Secret&, const Secret&) = default;
};

/// Checks the (W, S, C) invariants for the given parameters.
void validate_secret(const ProblemParams& p, const Secret& s);

using Database = std::vector<Message>;

/// Uniform database of K messages in F_{q^l}.
Database sample_database(const ProblemParams& p, Rng& rng);

/// Y = Σ_{i∈S} c_i X_i.
Message compute_side_info(const Database& db, const std::vector<std::uint16_t>& support,
                          const std::vector<Fq>& coeffs);

struct Instance {
  ProblemParams params;
  Database database;
  Secret secret;
  Message side_info;

  std::uint8_t theta() const { return secret.demand_in_support() ? 1 : 0; }
  const Message& demanded() const { return database.at(secret.demand - 1u); }
  /// Throws if any invariant (model membership, nonzero C, Y consistency) fails.
  void validate() const;
};

/// Draws S uniformly over M-subsets, C uniformly over (F_q^×)^M, then W
/// from K∖S (Model I) or S (Model II), and a uniform database.
Secret sample_secret(const ProblemParams& p, Rng& rng);
Instance sample_instance(const ProblemParams& p, Rng& rng);

/// All M-subsets of {1..K} in lexicographic order.
std::vector<std::vector<std::uint16_t>> subsets(std::uint16_t K, std::uint16_t M);

/// Every (W, S, C) admitted by the model, in lexicographic order.
std::vector<Secret> all_secrets(std::uint16_t K, std::uint16_t M, Model model, std::uint16_t q);

std::string to_string(Model m);

void to_json(nlohmann::json& j, const ProblemParams& p);
void from_json(const nlohmann::json& j, ProblemParams& p);
void to_json(nlohmann::json& j, const Secret& s);
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

}  // namespace pir
