#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pir/field.hpp"
#include "pir/linalg.hpp"
#include "pir/model.hpp"

namespace pir {

class Rng;

/// The four retrieval settings: privacy requirement × model.
///   PcsiI  - (W,S)-privacy, W ∉ S   (Specialized GRS Code)
///   PcsiII - (W,S)-privacy, W ∈ S   (Modified Specialized GRS Code)
///   CsiI   - W-privacy,     W ∉ S   (Modified Partition-and-Code)
///   CsiII  - W-privacy,     W ∈ S   (Randomized Selection-and-Code)
enum class Setting : std::uint8_t { PcsiI = 0, PcsiII = 1, CsiI = 2, CsiII = 3 };

enum class Privacy : std::uint8_t { W, WS };

Model model_of(Setting s) noexcept;
Privacy privacy_of(Setting s) noexcept;
std::string to_string(Setting s);
std::string to_string(Privacy p);
/// Accepts "pcsi1", "pcsi2", "csi1", "csi2" (case-insensitive).
std::optional<Setting> parse_setting(std::string_view name);
ProblemParams params_for(Setting s, std::uint16_t K, std::uint16_t M, std::uint16_t q,
                         std::uint16_t l = 1);

/// Coefficient matrix query of the GRS-based protocols: row i (0-based)
/// holds v_j ω_j^i for j = 1..K.
struct GrsQuery {
  FqMatrix coeffs;
  friend bool operator==(const GrsQuery&, const GrsQuery&) = default;
};

/// One (U, V) pair: the server returns Σ_k V_k X_{U_k}.
struct QueryPart {
  std::vector<std::uint16_t> indices;
  std::vector<Fq> coeffs;
  friend bool operator==(const QueryPart&, const QueryPart&) = default;
};

struct IndexCoeffQuery {
  std::vector<QueryPart> parts;
  friend bool operator==(const IndexCoeffQuery&, const IndexCoeffQuery&) = default;
};

using Query = std::variant<GrsQuery, IndexCoeffQuery>;

/// Client-only decoding state; never leaves the user.
/// X_W = (Σ_k weights[k]·A_k + side_info_coeff·Y) / divisor.
struct UserState {
  Setting setting;
  std::vector<Fq> weights;
  Fq side_info_coeff;
  Fq divisor;
  /// GRS: coefficients p_1.. of p(x); empty otherwise.
  std::vector<Fq> poly;
  /// MPC/RSC: transmitted position of the part used for decoding.
  std::size_t target_part = 0;
};

struct Answer {
  std::vector<Message> symbols;
  friend bool operator==(const Answer&, const Answer&) = default;
};

struct PreparedQuery {
  Query query;
  UserState state;
};

// ---------------------------------------------------------------------------
// Shared building blocks

/// Canonical evaluation points ω_j = j - 1.
Fq evaluation_point(std::uint16_t j, const PrimeField& field);

/// Coefficients (ascending powers) of the monic Π (x - r).
std::vector<Fq> poly_from_roots(std::span<const Fq> roots, const PrimeField& field);
Fq poly_eval(std::span<const Fq> coeffs, const Fq& x);

/// Number of answer symbols each setting downloads.
std::size_t expected_download(Setting s, std::uint16_t K, std::uint16_t M);

/// The answer's coefficient vectors over X_1..X_K, one row per symbol.
FqMatrix coefficient_rows(const Query& q, std::uint16_t K, const PrimeField& field);

/// Server side: A = coefficient_rows(query) · X. Depends only on the query
/// and the database.
Answer answer(const Query& q, const Database& db);

/// Client side: reconstructs X_W.
Message decode(const Answer& a, const UserState& st, const Message& side_info);

/// Structural checks a server applies before answering (shape, index range,
/// nonzero coefficients, download size for the setting).
void check_query_shape(Setting s, const ProblemParams& p, const Query& q);

// ---------------------------------------------------------------------------
// Specialized GRS Code (PCSI-I) and its modified form (PCSI-II)

struct GrsChoices {
  /// v_j for every j ∉ S, in ascending j.
  std::vector<Fq> free_multipliers;
};

struct MgrsChoices {
  /// Replacement coefficient c ∈ F_q^× ∖ {c_W}.
  Fq c;
  std::vector<Fq> free_multipliers;
};

PreparedQuery build_grs_query(const ProblemParams& p, const Secret& s, const GrsChoices& ch);
GrsChoices sample_grs_choices(const ProblemParams& p, const Secret& s, Rng& rng);
PreparedQuery grs_query(const ProblemParams& p, const Secret& s, Rng& rng);

PreparedQuery build_mgrs_query(const ProblemParams& p, const Secret& s, const MgrsChoices& ch);
MgrsChoices sample_mgrs_choices(const ProblemParams& p, const Secret& s, Rng& rng);
PreparedQuery mgrs_query(const ProblemParams& p, const Secret& s, Rng& rng);

// ---------------------------------------------------------------------------
// Modified Partition-and-Code (CSI-I)

/// Block I_i (1-based, listed order) of the MPC layout; the last block
/// wraps past K back to 1 when M+1 does not divide K.
std::vector<std::uint16_t> mpc_block(std::uint16_t K, std::uint16_t M, std::uint16_t i);
std::uint16_t mpc_block_count(std::uint16_t K, std::uint16_t M);

struct MpcChoices {
  std::uint16_t j_star;
  /// π over I_{i*}∖{j*} in block order: a permutation of S.
  std::vector<std::uint16_t> support_order;
  /// π over K∖I_{i*} in ascending position: a permutation of K∖(W ∪ S).
  std::vector<std::uint16_t> rest_order;
  /// Fresh c_W placed at position j*.
  Fq demand_coeff;
};

PreparedQuery build_mpc_query(const ProblemParams& p, const Secret& s, const MpcChoices& ch);
MpcChoices sample_mpc_choices(const ProblemParams& p, const Secret& s, Rng& rng);
PreparedQuery mpc_query(const ProblemParams& p, const Secret& s, Rng& rng);

// ---------------------------------------------------------------------------
// Randomized Selection-and-Code (CSI-II)

/// 1: M = 2. 2: 3 <= M <= K/2+1. 3: (K+1)/2 <= M <= K-1. 4: M = K.
/// Overlapping (K, M) resolve to case 2.
int rsc_case_of(std::uint16_t K, std::uint16_t M);

struct RscChoices {
  /// Case 1: the requested index (W or the other support index).
  std::uint16_t selected = 0;
  /// Case 2: r = M-2. Case 3: s = 2M-K-1. In both the demand joins U_2.
  bool include_demand = false;
  /// Case 2: picks from K∖S. Case 3: picks from S∖W. Ascending.
  std::vector<std::uint16_t> picked;
  /// Cases 2-3: σ swaps the transmitted order of the two parts.
  bool swapped = false;
  /// Cases 3-4: c ∈ F_q^× ∖ {c_W}.
  std::optional<Fq> c;
};

PreparedQuery build_rsc_query(const ProblemParams& p, const Secret& s, const RscChoices& ch);
RscChoices sample_rsc_choices(const ProblemParams& p, const Secret& s, Rng& rng);
PreparedQuery rsc_query(const ProblemParams& p, const Secret& s, Rng& rng);

// ---------------------------------------------------------------------------

/// Runs the setting's query generation.
PreparedQuery prepare_query(Setting setting, const ProblemParams& p, const Secret& s, Rng& rng);

}  // namespace pir
