// Randomized Selection-and-Code.

#include <algorithm>

#include "pir/protocols.hpp"
#include "pir/rng.hpp"

namespace pir {

int rsc_case_of(std::uint16_t K, std::uint16_t M) {
  if (M == 2) return 1;
  if (M == K) return 4;
  if (M >= 3 && 2u * M <= K + 2u) return 2;
  return 3;
}

namespace {

void check_rsc_params(const ProblemParams& p, const Secret& s) {
  p.validate();
  if (p.model != Model::II) throw ModelViolation("Randomized Selection-and-Code requires Model II");
  validate_secret(p, s);
  const int c = rsc_case_of(p.K, p.M);
  if ((c == 3 || c == 4) && p.q < 3)
    throw FieldTooSmall("coefficient replacement needs q >= 3");
}

std::vector<std::uint16_t> complement(const ProblemParams& p, const std::vector<std::uint16_t>& s) {
  std::vector<std::uint16_t> out;
  for (std::uint16_t j = 1; j <= p.K; ++j)
    if (!std::binary_search(s.begin(), s.end(), j)) out.push_back(j);
  return out;
}

std::vector<std::uint16_t> without(std::vector<std::uint16_t> v, std::uint16_t x) {
  v.erase(std::remove(v.begin(), v.end(), x), v.end());
  return v;
}

/// Checks that `picked` is a strictly ascending subset of `pool` of size n.
void check_picks(const std::vector<std::uint16_t>& picked, const std::vector<std::uint16_t>& pool,
                 std::size_t n) {
  if (picked.size() != n)
    throw ParamError("expected " + std::to_string(n) + " picked indices");
  if (!std::is_sorted(picked.begin(), picked.end()) ||
      std::adjacent_find(picked.begin(), picked.end()) != picked.end())
    throw ParamError("picked indices must be strictly ascending");
  for (auto i : picked)
    if (!std::binary_search(pool.begin(), pool.end(), i))
      throw ParamError("picked index " + std::to_string(i) + " outside its pool");
}

Fq checked_c(const std::optional<Fq>& c, const Fq& c_w, std::uint16_t q) {
  if (!c) throw ParamError("replacement coefficient c required");
  if (c->modulus() != q) throw ModulusMismatch("c outside GF(q)");
  if (c->is_zero() || *c == c_w) throw InvalidCoefficient("c must lie in F_q^x minus {c_W}");
  return *c;
}

std::vector<std::uint16_t> sorted_union(std::vector<std::uint16_t> a,
                                        const std::vector<std::uint16_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

std::vector<std::uint16_t> random_subset(std::vector<std::uint16_t> pool, std::size_t n, Rng& rng) {
  rng.shuffle(pool.begin(), pool.end());
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

PreparedQuery build_rsc_query(const ProblemParams& p, const Secret& s, const RscChoices& ch) {
  check_rsc_params(p, s);
  const auto field = p.field();
  const auto W = s.demand;
  const Fq c_w = s.coeff_of(W);
  const int kase = rsc_case_of(p.K, p.M);

  if (kase == 1) {
    if (!std::binary_search(s.support.begin(), s.support.end(), ch.selected))
      throw ParamError("case 1 selects an index of S");
    IndexCoeffQuery q{{QueryPart{{ch.selected}, {field.one()}}}};
    if (ch.selected == W)
      return {std::move(q), UserState{Setting::CsiII, {field.one()}, field.zero(), field.one(), {}, 0}};
    // Y - c_o·X_o = c_W·X_W
    const Fq c_o = s.coeff_of(ch.selected);
    return {std::move(q), UserState{Setting::CsiII, {-c_o}, field.one(), c_w, {}, 0}};
  }

  if (kase == 4) {
    const Fq c = checked_c(ch.c, c_w, p.q);
    QueryPart part;
    for (std::uint16_t j = 1; j <= p.K; ++j) part.indices.push_back(j);
    for (std::size_t k = 0; k < s.support.size(); ++k)
      part.coeffs.push_back(s.support[k] == W ? c : s.coeffs[k]);
    return {IndexCoeffQuery{{std::move(part)}},
            UserState{Setting::CsiII, {field.one()}, -field.one(), c - c_w, {}, 0}};
  }

  const auto outside = complement(p, s.support);
  const auto others = without(s.support, W);
  QueryPart first, second;
  UserState st{Setting::CsiII, {field.zero(), field.zero()}, field.zero(), field.one(), {}, 0};

  if (kase == 2) {
    check_picks(ch.picked, outside, ch.include_demand ? p.M - 2u : p.M - 1u);
    first.indices = others;
    for (auto j : others) first.coeffs.push_back(s.coeff_of(j));
    second.indices = ch.include_demand ? sorted_union(ch.picked, {W}) : ch.picked;
    second.coeffs = first.coeffs;
    // Y - A_{U_1} = c_W·X_W
    st.side_info_coeff = field.one();
    st.divisor = c_w;
    st.weights[ch.swapped ? 1 : 0] = -field.one();
  } else {
    const std::size_t s_size = ch.include_demand ? 2u * p.M - p.K - 1u : 2u * p.M - p.K;
    check_picks(ch.picked, others, s_size);
    const Fq c = checked_c(ch.c, c_w, p.q);
    first.indices = s.support;
    for (std::size_t k = 0; k < s.support.size(); ++k)
      first.coeffs.push_back(s.support[k] == W ? c : s.coeffs[k]);
    auto pool = sorted_union(ch.picked, outside);
    second.indices = ch.include_demand ? sorted_union(pool, {W}) : pool;
    second.coeffs = first.coeffs;
    // A_{U_1} - Y = (c - c_W)·X_W
    st.side_info_coeff = -field.one();
    st.divisor = c - c_w;
    st.weights[ch.swapped ? 1 : 0] = field.one();
  }
  st.target_part = ch.swapped ? 1 : 0;
  IndexCoeffQuery q;
  if (ch.swapped)
    q.parts = {std::move(second), std::move(first)};
  else
    q.parts = {std::move(first), std::move(second)};
  return {std::move(q), std::move(st)};
}

RscChoices sample_rsc_choices(const ProblemParams& p, const Secret& s, Rng& rng) {
  check_rsc_params(p, s);
  const auto W = s.demand;
  const int kase = rsc_case_of(p.K, p.M);
  RscChoices ch;

  auto draw_c = [&] {
    const auto c_w = s.coeff_of(W).value();
    auto v = 1 + rng.uniform(p.q - 2u);
    if (v >= c_w) ++v;
    ch.c = p.field()(v);
  };

  switch (kase) {
    case 1:
      ch.selected = rng.chance(1, p.K) ? W : without(s.support, W).front();
      break;
    case 2:
      ch.include_demand = rng.chance(2u * p.M - 2u, p.K);
      ch.picked = random_subset(complement(p, s.support),
                                ch.include_demand ? p.M - 2u : p.M - 1u, rng);
      ch.swapped = rng.chance(1, 2);
      break;
    case 3:
      ch.include_demand = rng.chance(2u * p.M - p.K, p.K);
      ch.picked = random_subset(without(s.support, W),
                                ch.include_demand ? 2u * p.M - p.K - 1u : 2u * p.M - p.K, rng);
      ch.swapped = rng.chance(1, 2);
      draw_c();
      break;
    default:
      draw_c();
      break;
  }
  return ch;
}

PreparedQuery rsc_query(const ProblemParams& p, const Secret& s, Rng& rng) {
  return build_rsc_query(p, s, sample_rsc_choices(p, s, rng));
}

}  // namespace pir
