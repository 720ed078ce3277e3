#include "pir/audit.hpp"

#include <algorithm>
#include <thread>

#include "pir/wire.hpp"

namespace pir {

namespace {

/// Visits every tuple in (F_q^×)^n.
void for_each_nonzero_tuple(std::size_t n, const PrimeField& field,
                            const std::function<void(const std::vector<Fq>&)>& visit) {
  const auto nz = field.nonzero_elements();
  std::vector<std::size_t> digit(n, 0);
  std::vector<Fq> tuple(n, nz.front());
  while (true) {
    visit(tuple);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++digit[i] < nz.size()) {
        tuple[i] = nz[digit[i]];
        break;
      }
      digit[i] = 0;
      tuple[i] = nz.front();
      if (i == 0) return;
    }
    if (n == 0) return;
  }
}

std::vector<std::uint16_t> complement_of(std::uint16_t K, const std::vector<std::uint16_t>& s,
                                         std::uint16_t also = 0) {
  std::vector<std::uint16_t> out;
  for (std::uint16_t j = 1; j <= K; ++j)
    if (j != also && !std::binary_search(s.begin(), s.end(), j)) out.push_back(j);
  return out;
}

/// k-subsets of `pool` (ascending) in lexicographic order.
std::vector<std::vector<std::uint16_t>> choose(const std::vector<std::uint16_t>& pool,
                                               std::size_t k) {
  std::vector<std::vector<std::uint16_t>> out;
  if (k > pool.size()) return out;
  if (pool.empty()) return {{}};
  for (const auto& idx : subsets(static_cast<std::uint16_t>(pool.size()),
                                 static_cast<std::uint16_t>(k))) {
    std::vector<std::uint16_t> pick;
    for (auto i : idx) pick.push_back(pool[i - 1u]);
    out.push_back(std::move(pick));
  }
  return out;
}

std::vector<Fq> replacement_coeffs(const PrimeField& field, const Fq& c_w) {
  std::vector<Fq> out;
  for (const auto& c : field.nonzero_elements())
    if (c != c_w) out.push_back(c);
  return out;
}

std::uint64_t ipow(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e--) r = r > UINT64_MAX / b ? UINT64_MAX : r * b;
  return r;
}

std::uint64_t ifact(std::uint64_t n) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 2; i <= n; ++i) r = r > UINT64_MAX / i ? UINT64_MAX : r * i;
  return r;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  return (b != 0 && a > UINT64_MAX / b) ? UINT64_MAX : a * b;
}

std::uint64_t ibinom(std::uint64_t n, std::uint64_t k) {
  return static_cast<std::uint64_t>(binomial(static_cast<unsigned>(n), static_cast<unsigned>(k)));
}

}  // namespace

void for_each_branch(Setting setting, const ProblemParams& p, const Secret& s,
                     const std::function<void(const PreparedQuery&, const Rational&)>& visit) {
  const auto field = p.field();
  const unsigned q1 = p.q - 1u;
  switch (setting) {
    case Setting::PcsiI: {
      const auto n = complement_of(p.K, s.support).size();
      const Rational w(1, BigInt(ipow(q1, n)));
      for_each_nonzero_tuple(n, field, [&](const std::vector<Fq>& v) {
        visit(build_grs_query(p, s, GrsChoices{v}), w);
      });
      return;
    }
    case Setting::PcsiII: {
      const auto n = complement_of(p.K, s.support).size();
      const auto cs = replacement_coeffs(field, s.coeff_of(s.demand));
      const Rational w(1, BigInt(ipow(q1, n)) * cs.size());
      for (const auto& c : cs)
        for_each_nonzero_tuple(n, field, [&](const std::vector<Fq>& v) {
          visit(build_mgrs_query(p, s, MgrsChoices{c, v}), w);
        });
      return;
    }
    case Setting::CsiI: {
      auto rest = complement_of(p.K, s.support, s.demand);
      const Rational w(1, BigInt(p.K) * factorial(p.M) * factorial(rest.size()) * q1);
      for (std::uint16_t j = 1; j <= p.K; ++j) {
        auto sup = s.support;
        do {
          auto r = rest;
          do {
            for (const auto& c : field.nonzero_elements())
              visit(build_mpc_query(p, s, MpcChoices{j, sup, r, c}), w);
          } while (std::next_permutation(r.begin(), r.end()));
        } while (std::next_permutation(sup.begin(), sup.end()));
      }
      return;
    }
    case Setting::CsiII:
      break;
  }

  const auto W = s.demand;
  const unsigned K = p.K, M = p.M;
  const auto outside = complement_of(p.K, s.support);
  std::vector<std::uint16_t> others;
  for (auto j : s.support)
    if (j != W) others.push_back(j);

  switch (rsc_case_of(p.K, p.M)) {
    case 1: {
      RscChoices ch;
      ch.selected = W;
      visit(build_rsc_query(p, s, ch), Rational(1, K));
      ch.selected = others.front();
      visit(build_rsc_query(p, s, ch), Rational(K - 1, K));
      return;
    }
    case 2: {
      // r = M-2 (demand joins U_2) with probability (2M-2)/K
      const Rational p_with = rsc_include_probability(2, p.K, p.M);
      for (bool with : {true, false}) {
        const Rational route = with ? p_with : Rational(1) - p_with;
        if (route == 0) continue;  // 2M = K+2: the demand always joins U_2
        const auto picks = choose(outside, with ? M - 2 : M - 1);
        const Rational w = route / picks.size() / 2;
        for (const auto& pick : picks)
          for (bool swapped : {false, true}) {
            RscChoices ch;
            ch.include_demand = with;
            ch.picked = pick;
            ch.swapped = swapped;
            visit(build_rsc_query(p, s, ch), w);
          }
      }
      return;
    }
    case 3: {
      // s = 2M-K drawn from S∖W with probability (2K-2M)/K, else W plus 2M-K-1
      const Rational p_without = 1 - rsc_include_probability(3, p.K, p.M);
      const auto cs = replacement_coeffs(field, s.coeff_of(W));
      for (bool with : {true, false}) {
        const auto picks = choose(others, with ? 2 * M - K - 1 : 2 * M - K);
        const Rational w =
            (with ? Rational(1) - p_without : p_without) / picks.size() / 2 / cs.size();
        for (const auto& pick : picks)
          for (bool swapped : {false, true})
            for (const auto& c : cs) {
              RscChoices ch;
              ch.include_demand = with;
              ch.picked = pick;
              ch.swapped = swapped;
              ch.c = c;
              visit(build_rsc_query(p, s, ch), w);
            }
      }
      return;
    }
    default: {
      const auto cs = replacement_coeffs(field, s.coeff_of(W));
      for (const auto& c : cs) {
        RscChoices ch;
        ch.c = c;
        visit(build_rsc_query(p, s, ch), Rational(1, cs.size()));
      }
      return;
    }
  }
}

Rational rsc_include_probability(int rsc_case, std::uint16_t K, std::uint16_t M) {
  if (rsc_case == 2 && M >= 3 && 2 * M <= K + 2) return Rational(2 * M - 2, K);
  if (rsc_case == 3 && M + 1 <= K && 2 * M >= K + 1) return Rational(2 * M - K, K);
  throw ParamError("(K, M) = (" + std::to_string(K) + ", " + std::to_string(M) +
                   ") is outside RSC case " + std::to_string(rsc_case));
}

BalanceTerms rsc_balance(int rsc_case, std::uint16_t K, std::uint16_t M) {
  const auto with = rsc_include_probability(rsc_case, K, M);
  if (with == 1) throw ParamError("RSC case " + std::to_string(rsc_case) + " never omits the demand here");
  if (rsc_case == 2)
    return {with / 2 / BigInt(binomial(K - M, M - 2)), (1 - with) / BigInt(binomial(K - M, M - 1))};
  return {with / BigInt(binomial(M - 1, 2 * M - K - 1)),
          (1 - with) / 2 / BigInt(binomial(M - 1, 2 * M - K))};
}

std::uint64_t branch_count(Setting setting, const ProblemParams& p, const Secret& s) {
  const std::uint64_t q1 = p.q - 1u, K = p.K, M = p.M;
  switch (setting) {
    case Setting::PcsiI: return ipow(q1, K - M);
    case Setting::PcsiII: return sat_mul(q1 - 1, ipow(q1, K - M));
    case Setting::CsiI:
      return sat_mul(sat_mul(sat_mul(K, ifact(M)), ifact(K - M - 1)), q1);
    case Setting::CsiII:
      switch (rsc_case_of(p.K, p.M)) {
        case 1: return 2;
        case 2: return 2 * (ibinom(K - M, M - 2) + ibinom(K - M, M - 1));
        case 3: return 2 * (q1 - 1) * (ibinom(M - 1, 2 * M - K - 1) + ibinom(M - 1, 2 * M - K));
        default: return q1 - 1;
      }
  }
  (void)s;
  return 0;
}

Rational QueryDistribution::total_mass(std::uint32_t secret_index) const {
  Rational sum = 0;
  for (const auto& [key, row] : table) {
    auto it = row.find(secret_index);
    if (it != row.end()) sum += it->second;
  }
  return sum;
}

QueryDistribution enumerate_distribution(Setting setting, ProblemParams p, std::uint64_t cap,
                                         unsigned threads) {
  p.l = 1;
  p.validate();
  if (p.model != model_of(setting))
    throw ModelViolation(to_string(setting) + " runs under Model " + to_string(model_of(setting)));

  QueryDistribution dist{setting, p, all_secrets(p.K, p.M, p.model, p.q), {}};
  std::uint64_t total = 0;
  for (const auto& s : dist.secrets) {
    total += branch_count(setting, p, s);
    if (total > cap) break;
  }
  if (total > cap) {
    std::uint64_t full = 0;
    for (const auto& s : dist.secrets) full = std::min<std::uint64_t>(UINT64_MAX / 2, full + branch_count(setting, p, s));
    throw EnumerationTooLarge("query enumeration exceeds cap of " + std::to_string(cap), full);
  }

  using Table = decltype(dist.table);
  const std::size_t n = dist.secrets.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));

  std::vector<Table> partial(threads);
  std::vector<std::exception_ptr> failures(threads);
  auto work = [&](unsigned t) {
    try {
      for (std::size_t i = t * n / threads; i < (t + 1) * n / threads; ++i) {
        const auto idx = static_cast<std::uint32_t>(i);
        for_each_branch(setting, p, dist.secrets[i], [&](const PreparedQuery& pq, const Rational& w) {
          const auto bytes = wire::encode_query(pq.query);
          partial[t][std::string(bytes.begin(), bytes.end())][idx] += w;
        });
      }
    } catch (...) {
      failures[t] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  // merge in chunk order; each secret lives in exactly one chunk
  for (auto& part : partial)
    for (auto& [key, row] : part) {
      auto& dst = dist.table[key];
      for (auto& [idx, w] : row) dst[idx] += w;
    }
  return dist;
}

std::vector<PosteriorKey> posterior_keys(const ProblemParams& p, Privacy kind) {
  std::vector<PosteriorKey> keys;
  if (kind == Privacy::W) {
    for (std::uint16_t w = 1; w <= p.K; ++w) keys.push_back({w, {}});
    return keys;
  }
  for (const auto& S : subsets(p.K, p.M))
    for (std::uint16_t w = 1; w <= p.K; ++w)
      if (std::binary_search(S.begin(), S.end(), w) == (p.model == Model::II))
        keys.push_back({w, S});
  std::sort(keys.begin(), keys.end());
  return keys;
}

Rational prior_of(const ProblemParams& p, Privacy kind) {
  return Rational(1, posterior_keys(p, kind).size());
}

Posterior posterior(const QueryDistribution& dist, const std::string& query_key, Privacy kind) {
  auto it = dist.table.find(query_key);
  if (it == dist.table.end()) throw Error("query never generated: " + wire::to_hex(query_key));
  Posterior post;
  for (auto& key : posterior_keys(dist.params, kind)) post.emplace(std::move(key), Rational(0));
  Rational total = 0;
  // the uniform prior over (W, S, C) cancels in Bayes' rule
  for (const auto& [idx, w] : it->second) {
    const auto& s = dist.secrets[idx];
    PosteriorKey key{s.demand, kind == Privacy::WS ? s.support : std::vector<std::uint16_t>{}};
    post.at(key) += w;
    total += w;
  }
  for (auto& [key, v] : post) v /= total;
  return post;
}

Posterior posterior(const QueryDistribution& dist, const Query& query, Privacy kind) {
  const auto bytes = wire::encode_query(query);
  return posterior(dist, std::string(bytes.begin(), bytes.end()), kind);
}

PrivacyReport check_privacy(const QueryDistribution& dist, Privacy kind) {
  PrivacyReport r{dist.setting, dist.params, kind};
  r.prior = prior_of(dist.params, kind);
  r.deviation = 0;
  r.queries = dist.table.size();
  for (const auto& [key, row] : dist.table) {
    auto post = posterior(dist, key, kind);
    Rational dev = 0;
    for (const auto& [k, v] : post) dev = std::max(dev, abs_diff(v, r.prior));
    if (dev > r.deviation) {
      r.deviation = dev;
      r.witness = PrivacyWitness{key, std::move(post)};
    }
  }
  r.holds = r.deviation == 0;
  return r;
}

PrivacyReport check_privacy(Setting setting, const ProblemParams& p, Privacy kind,
                            std::uint64_t cap) {
  return check_privacy(enumerate_distribution(setting, p, cap), kind);
}

nlohmann::json to_json(const PrivacyReport& r) {
  nlohmann::json j;
  j["setting"] = to_string(r.setting);
  j["params"] = r.params;
  j["privacy"] = to_string(r.kind);
  j["verdict"] = r.holds ? "holds" : "violated";
  j["deviation"] = to_fraction(r.deviation);
  j["prior"] = to_fraction(r.prior);
  j["queries"] = r.queries;
  if (r.witness) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& [key, v] : r.witness->posterior) {
      nlohmann::json row{{"W", key.demand}, {"p", to_fraction(v)}};
      if (r.kind == Privacy::WS) row["S"] = key.support;
      table.push_back(std::move(row));
    }
    j["witness"] = {{"query", wire::to_hex(r.witness->query_key)}, {"posterior", table}};
  }
  return j;
}

// ---------------------------------------------------------------------------

std::optional<DecodingWitness> decoding_witness(const FqMatrix& rows, std::uint16_t demand,
                                                const std::vector<std::uint16_t>& support) {
  const auto field = rows.field();
  const std::size_t K = rows.cols();
  if (demand < 1 || demand > K) throw IndexError("demand out of range");
  for (auto j : support)
    if (j < 1 || j > K) throw IndexError("support index out of range");
  const bool theta = std::binary_search(support.begin(), support.end(), demand);

  std::vector<std::uint16_t> inside = support;  // S* minus W*
  inside.erase(std::remove(inside.begin(), inside.end(), demand), inside.end());
  const auto outside = complement_of(static_cast<std::uint16_t>(K), support, demand);

  // λ with λ·rows vanishing outside {W*} ∪ S*
  AffineSolution space{FqVector(rows.rows(), field.zero()), {}};
  if (outside.empty()) {
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      FqVector e(rows.rows(), field.zero());
      e[r] = field.one();
      space.basis.push_back(std::move(e));
    }
  } else {
    FqMatrix restricted(rows.rows(), outside.size(), field);
    for (std::size_t r = 0; r < rows.rows(); ++r)
      for (std::size_t c = 0; c < outside.size(); ++c) restricted(r, c) = rows(r, outside[c] - 1u);
    space = *solution_space(restricted, FqVector(outside.size(), field.zero()));
  }

  std::optional<DecodingWitness> found;
  for_each_solution(space, field, [&](const FqVector& lambda) {
    const auto z = left_multiply(lambda, rows);
    const Fq zw = z[demand - 1u];
    std::size_t nonzero = 0;
    for (auto j : inside) nonzero += !z[j - 1u].is_zero();

    if (nonzero == 0) {
      if (zw.is_zero()) return true;
      // X_W sits in the span of the answers alone; any side information works
      found = DecodingWitness{lambda, field.zero(), zw,
                              std::vector<Fq>(support.size(), field.one())};
      return false;
    }
    if (nonzero != inside.size()) return true;

    // normalize so the first S*∖W* coordinate is 1, then λ'·A - Y = d·X_W
    const Fq scale = z[inside.front() - 1u].inv();
    FqVector lam;
    for (const auto& x : lambda) lam.push_back(x * scale);
    const Fq zw_n = zw * scale;
    std::vector<Fq> coeffs;
    Fq divisor = zw_n;
    if (!theta) {
      if (zw_n.is_zero()) return true;
      for (auto j : support) coeffs.push_back(z[j - 1u] * scale);
    } else {
      // c_W = z_W - d must stay nonzero, so d ∉ {0, z_W}
      std::optional<Fq> d;
      for (const auto& cand : field.nonzero_elements())
        if (cand != zw_n) {
          d = cand;
          break;
        }
      if (!d) return true;
      divisor = *d;
      for (auto j : support)
        coeffs.push_back(j == demand ? zw_n - divisor : z[j - 1u] * scale);
    }
    found = DecodingWitness{std::move(lam), -field.one(), divisor, std::move(coeffs)};
    return false;
  });
  return found;
}

NecessaryConditionReport necessary_condition(const FqMatrix& rows, const ProblemParams& p,
                                             Privacy kind, std::uint8_t theta) {
  if (rows.cols() != p.K) throw ShapeMismatch("coefficient rows must have K columns");
  if (rows.field().order() != p.q) throw ModulusMismatch("coefficient rows over another field");
  if (theta > 1) throw ParamError("theta must be 0 or 1");
  NecessaryConditionReport rep{kind, theta, true, {}};
  const auto supports = subsets(p.K, p.M);
  for (std::uint16_t w = 1; w <= p.K; ++w) {
    bool any = false;
    for (const auto& S : supports) {
      if (std::binary_search(S.begin(), S.end(), w) != (theta == 1)) continue;
      auto wit = decoding_witness(rows, w, S);
      if (kind == Privacy::WS) {
        rep.passes = rep.passes && wit.has_value();
        rep.candidates.push_back({w, S, wit.has_value(), std::move(wit)});
      } else if (wit) {
        rep.candidates.push_back({w, S, true, std::move(wit)});
        any = true;
        break;
      }
    }
    if (kind == Privacy::W && !any) {
      rep.passes = false;
      rep.candidates.push_back({w, {}, false, std::nullopt});
    }
  }
  return rep;
}

}  // namespace pir
