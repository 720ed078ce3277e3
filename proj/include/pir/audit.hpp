#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pir/linalg.hpp"
#include "pir/model.hpp"
#include "pir/protocols.hpp"
#include "pir/rational.hpp"

namespace pir {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Calls `visit` once per random branch of the setting's query generation
/// for a fixed (W, S, C), with the branch's exact probability. The branch
/// tree is written out independently of the sample_* functions; only the
/// deterministic build_* step is shared.
void for_each_branch(Setting setting, const ProblemParams& p, const Secret& s,
                     const std::function<void(const PreparedQuery&, const Rational&)>& visit);

/// Number of branches for_each_branch will visit.
std::uint64_t branch_count(Setting setting, const ProblemParams& p, const Secret& s);

/// P(Q = query | W, S, C) for every query and every admissible (W, S, C).
/// Queries are keyed by their canonical wire encoding; secrets by their
/// position in `secrets`.
struct QueryDistribution {
  Setting setting;
  ProblemParams params;
  std::vector<Secret> secrets;
  std::map<std::string, std::map<std::uint32_t, Rational>> table;

  /// Σ over queries of P(query | secrets[i]); exactly 1 for a sound enumeration.
  Rational total_mass(std::uint32_t secret_index) const;
};

/// Walks every branch for every secret. l is forced to 1 since queries never
/// depend on message contents. Throws EnumerationTooLarge above `cap`
/// weighted branches. Work is split across `threads` (0 = hardware); the
/// result does not depend on the split.
QueryDistribution enumerate_distribution(Setting setting, ProblemParams p,
                                         std::uint64_t cap = kDefaultEnumerationCap,
                                         unsigned threads = 0);

/// Demand, plus the support when auditing (W, S)-privacy.
struct PosteriorKey {
  std::uint16_t demand = 0;
  std::vector<std::uint16_t> support;
  friend auto operator<=>(const PosteriorKey&, const PosteriorKey&) = default;
  friend bool operator==(const PosteriorKey&, const PosteriorKey&) = default;
};

using Posterior = std::map<PosteriorKey, Rational>;

/// Every key admissible under the model, so zero entries are explicit.
std::vector<PosteriorKey> posterior_keys(const ProblemParams& p, Privacy kind);

/// Bayes over the uniform prior on (W, S, C). Throws Error if the query
/// never occurs.
Posterior posterior(const QueryDistribution& dist, const std::string& query_key, Privacy kind);
Posterior posterior(const QueryDistribution& dist, const Query& query, Privacy kind);

/// The prior marginal of one key (uniform over the keys by symmetry).
Rational prior_of(const ProblemParams& p, Privacy kind);

struct PrivacyWitness {
  std::string query_key;
  Posterior posterior;
};

struct PrivacyReport {
  Setting setting;
  ProblemParams params;
  Privacy kind;
  bool holds = false;
  /// max over queries and keys of |posterior - prior|.
  Rational deviation;
  Rational prior;
  std::size_t queries = 0;
  std::optional<PrivacyWitness> witness;
};

PrivacyReport check_privacy(const QueryDistribution& dist, Privacy kind);
PrivacyReport check_privacy(Setting setting, const ProblemParams& p, Privacy kind,
                            std::uint64_t cap = kDefaultEnumerationCap);

nlohmann::json to_json(const PrivacyReport& r);

/// Branch probability that RSC puts the demand into U_2: (2M-2)/K in case
/// 2 and (2M-K)/K in case 3. Throws ParamError outside the case's range.
Rational rsc_include_probability(int rsc_case, std::uint16_t K, std::uint16_t M);

/// Per-realization weight of a given (U_1, U_2) pair on each of its two
/// generating routes (demand in U_2 or not). W-privacy of cases 2 and 3
/// rests on the two being equal. Throws ParamError where one route has
/// probability zero (case 2 at 2M = K+2), since there is nothing to balance.
struct BalanceTerms {
  Rational with_demand;
  Rational without_demand;
};
BalanceTerms rsc_balance(int rsc_case, std::uint16_t K, std::uint16_t M);

// ---------------------------------------------------------------------------
// Decodability from the answer's coefficient rows

/// λ·A + mu·Y = divisor·X_W with Y built from `side_coeffs` over S*.
struct DecodingWitness {
  FqVector lambda;
  Fq mu;
  Fq divisor;
  std::vector<Fq> side_coeffs;
};

/// Whether some coded side information over S* (with W ∈ S* iff θ = 1)
/// lets the user recover X_W from answers with these coefficient rows.
std::optional<DecodingWitness> decoding_witness(const FqMatrix& rows, std::uint16_t demand,
                                                const std::vector<std::uint16_t>& support);

struct CandidateResult {
  std::uint16_t demand;
  /// The candidate support (kind WS) or the first support that works (kind W).
  std::vector<std::uint16_t> support;
  bool passes;
  std::optional<DecodingWitness> witness;
};

struct NecessaryConditionReport {
  Privacy kind;
  std::uint8_t theta;
  bool passes;
  std::vector<CandidateResult> candidates;
};

/// kind WS: every (W*, S*) with 1{W* ∈ S*} = θ must be decodable.
/// kind W: every W* must be decodable for at least one such S*.
NecessaryConditionReport necessary_condition(const FqMatrix& rows, const ProblemParams& p,
                                             Privacy kind, std::uint8_t theta);

}  // namespace pir
