// Modified Partition-and-Code.

#include <algorithm>

#include "pir/protocols.hpp"
#include "pir/rng.hpp"

namespace pir {

std::uint16_t mpc_block_count(std::uint16_t K, std::uint16_t M) {
  const unsigned b = M + 1u;
  return static_cast<std::uint16_t>((K + b - 1) / b);
}

std::vector<std::uint16_t> mpc_block(std::uint16_t K, std::uint16_t M, std::uint16_t i) {
  const auto n = mpc_block_count(K, M);
  if (i < 1 || i > n) throw IndexError("MPC block index out of range");
  const unsigned b = M + 1u;
  std::vector<std::uint16_t> out;
  for (unsigned k = 0; k < b; ++k) {
    unsigned pos = (i - 1u) * b + k + 1;
    if (pos > K) pos -= K;  // only the last block wraps
    out.push_back(static_cast<std::uint16_t>(pos));
  }
  return out;
}

namespace {

void check_mpc_params(const ProblemParams& p, const Secret& s) {
  p.validate();
  if (p.model != Model::I) throw ModelViolation("Partition-and-Code requires Model I");
  validate_secret(p, s);
}

std::vector<std::uint16_t> rest_indices(const ProblemParams& p, const Secret& s) {
  std::vector<std::uint16_t> out;
  for (std::uint16_t j = 1; j <= p.K; ++j)
    if (j != s.demand && !std::binary_search(s.support.begin(), s.support.end(), j))
      out.push_back(j);
  return out;
}

bool is_permutation_of(std::vector<std::uint16_t> a, std::vector<std::uint16_t> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace

PreparedQuery build_mpc_query(const ProblemParams& p, const Secret& s, const MpcChoices& ch) {
  check_mpc_params(p, s);
  const auto field = p.field();
  if (ch.j_star < 1 || ch.j_star > p.K) throw IndexError("j* out of range");
  if (ch.demand_coeff.modulus() != p.q) throw ModulusMismatch("c_W outside GF(q)");
  if (ch.demand_coeff.is_zero()) throw InvalidCoefficient("c_W must be nonzero");
  if (!is_permutation_of(ch.support_order, s.support))
    throw ParamError("support_order must be a permutation of S");
  const auto rest = rest_indices(p, s);
  if (!is_permutation_of(ch.rest_order, rest))
    throw ParamError("rest_order must be a permutation of K minus (W and S)");

  const auto n = mpc_block_count(p.K, p.M);
  const auto i_star = static_cast<std::uint16_t>((ch.j_star + p.M) / (p.M + 1u));
  const auto target = mpc_block(p.K, p.M, i_star);

  // pi[j] = message placed at position j
  std::vector<std::uint16_t> pi(p.K + 1u, 0);
  pi[ch.j_star] = s.demand;
  std::size_t next = 0;
  for (auto j : target)
    if (j != ch.j_star) pi[j] = ch.support_order[next++];
  next = 0;
  for (std::uint16_t j = 1; j <= p.K; ++j)
    if (std::find(target.begin(), target.end(), j) == target.end()) pi[j] = ch.rest_order[next++];

  std::vector<Fq> v;
  for (auto j : target)
    v.push_back(j == ch.j_star ? ch.demand_coeff : s.coeff_of(pi[j]));

  IndexCoeffQuery q;
  for (std::uint16_t i = 1; i <= n; ++i) {
    QueryPart part;
    for (auto j : mpc_block(p.K, p.M, i)) part.indices.push_back(pi[j]);
    part.coeffs = v;
    q.parts.push_back(std::move(part));
  }

  std::vector<Fq> weights(n, field.zero());
  weights[i_star - 1u] = field.one();
  UserState st{Setting::CsiI, std::move(weights), -field.one(), ch.demand_coeff, {},
               static_cast<std::size_t>(i_star - 1u)};
  return {std::move(q), std::move(st)};
}

MpcChoices sample_mpc_choices(const ProblemParams& p, const Secret& s, Rng& rng) {
  check_mpc_params(p, s);
  const auto j_star = static_cast<std::uint16_t>(1 + rng.uniform(p.K));
  auto support = s.support;
  rng.shuffle(support.begin(), support.end());
  auto rest = rest_indices(p, s);
  rng.shuffle(rest.begin(), rest.end());
  return MpcChoices{j_star, std::move(support), std::move(rest), sample_nonzero(p.field(), rng)};
}

PreparedQuery mpc_query(const ProblemParams& p, const Secret& s, Rng& rng) {
  return build_mpc_query(p, s, sample_mpc_choices(p, s, rng));
}

}  // namespace pir
