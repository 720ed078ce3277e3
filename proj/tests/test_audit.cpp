#include <doctest.h>

#include <algorithm>
#include <map>

#include "pir/audit.hpp"
#include "pir/rng.hpp"
#include "pir/wire.hpp"
#include "support.hpp"

using namespace pir;
using pir::testing::mat;

namespace {

std::string key_of(const Query& q) {
  const auto b = wire::encode_query(q);
  return std::string(b.begin(), b.end());
}

/// Decodability by exhaustion: some C* puts e_W in span(rows, Y*).
bool brute_decodable(const FqMatrix& rows, std::uint16_t W, const std::vector<std::uint16_t>& S) {
  const auto& f = rows.field();
  bool found = false;
  testing::for_each_vector(S.size(), f, [&](const FqVector& c) {
    if (found || std::any_of(c.begin(), c.end(), [](const Fq& x) { return x.is_zero(); })) return;
    std::vector<FqVector> all;
    for (std::size_t r = 0; r < rows.rows(); ++r) all.emplace_back(rows.row(r).begin(), rows.row(r).end());
    FqVector y(rows.cols(), f.zero());
    for (std::size_t k = 0; k < S.size(); ++k) y[S[k] - 1u] = c[k];
    all.push_back(y);
    FqVector e(rows.cols(), f.zero());
    e[W - 1u] = f.one();
    const auto span = testing::brute_span(FqMatrix::from_rows(all));
    found = std::find(span.begin(), span.end(), e) != span.end();
  });
  return found;
}

void check_witness(const FqMatrix& rows, std::uint16_t W, const std::vector<std::uint16_t>& S,
                   const DecodingWitness& w) {
  auto z = left_multiply(w.lambda, rows);
  REQUIRE(w.side_coeffs.size() == S.size());
  for (std::size_t k = 0; k < S.size(); ++k) {
    CHECK_FALSE(w.side_coeffs[k].is_zero());
    z[S[k] - 1u] += w.mu * w.side_coeffs[k];
  }
  CHECK_FALSE(w.divisor.is_zero());
  for (std::uint16_t j = 1; j <= rows.cols(); ++j)
    CHECK(z[j - 1u] == (j == W ? w.divisor : rows.field().zero()));
}

Rational mpc_closed_form(unsigned K, unsigned M, unsigned q) {
  return Rational(1, BigInt(K) * factorial(M) * factorial(K - M - 1) * (q - 1));
}

}  // namespace

TEST_CASE("RSC case 1 branch probabilities") {
  const auto p = params_for(Setting::CsiII, 3, 2, 2);
  const auto dist = enumerate_distribution(Setting::CsiII, p);
  const Secret s{1, {1, 2}, {Fq(1, 2), Fq(1, 2)}};
  const auto idx = static_cast<std::uint32_t>(
      std::find(dist.secrets.begin(), dist.secrets.end(), s) - dist.secrets.begin());
  REQUIRE(idx < dist.secrets.size());
  const auto ask = [&](std::uint16_t j) {
    IndexCoeffQuery q{{QueryPart{{j}, {Fq(1, 2)}}}};
    return dist.table.at(key_of(q)).at(idx);
  };
  CHECK(ask(1) == Rational(1, 3));
  CHECK(ask(2) == Rational(2, 3));
}

TEST_CASE("every secret's query law sums to one") {
  for (auto [setting, K, M, q] :
       {std::tuple{Setting::CsiI, 4, 1, 2}, std::tuple{Setting::CsiI, 5, 2, 3},
        std::tuple{Setting::PcsiI, 4, 2, 5}, std::tuple{Setting::PcsiII, 4, 3, 5},
        std::tuple{Setting::CsiII, 6, 3, 3}, std::tuple{Setting::CsiII, 6, 5, 3},
        std::tuple{Setting::CsiII, 4, 4, 3}}) {
    const auto dist = enumerate_distribution(setting, params_for(setting, K, M, q));
    for (std::uint32_t i = 0; i < dist.secrets.size(); ++i) CHECK(dist.total_mass(i) == 1);
  }
}

TEST_CASE("MPC query probabilities match the closed form") {
  const auto dist = enumerate_distribution(Setting::CsiI, params_for(Setting::CsiI, 5, 2, 3));
  const auto expect = mpc_closed_form(5, 2, 3);
  for (const auto& [key, row] : dist.table) {
    // each query is generated by exactly one compliant (W, S, C) per demand
    std::map<std::uint16_t, int> per_demand;
    for (const auto& [idx, w] : row) {
      CHECK(w == expect);
      ++per_demand[dist.secrets[idx].demand];
    }
    CHECK(per_demand.size() == 5);
    for (auto [w, n] : per_demand) CHECK(n == 1);
  }
}

TEST_CASE("posteriors are uniform for the private settings") {
  SUBCASE("MPC demand posterior is 1/5") {
    const auto dist = enumerate_distribution(Setting::CsiI, params_for(Setting::CsiI, 5, 2, 3));
    for (const auto& [key, row] : dist.table) {
      const auto post = posterior(dist, key, Privacy::W);
      CHECK(post.size() == 5);
      for (const auto& [k, v] : post) CHECK(v == Rational(1, 5));
    }
  }
  SUBCASE("specialized GRS (W, S) posterior is 1/12") {
    const auto dist = enumerate_distribution(Setting::PcsiI, params_for(Setting::PcsiI, 4, 2, 5));
    for (const auto& [key, row] : dist.table) {
      const auto post = posterior(dist, key, Privacy::WS);
      CHECK(post.size() == 12);
      Rational sum = 0;
      for (const auto& [k, v] : post) {
        CHECK(v == Rational(1, 12));
        sum += v;
      }
      CHECK(sum == 1);
    }
  }
  SUBCASE("a single message is trivially private") {
    QueryDistribution d{Setting::CsiI, ProblemParams{1, 0, Model::I, 2, 1},
                        {Secret{1, {}, {}}}, {{"q", {{0u, Rational(1)}}}}};
    const auto post = posterior(d, "q", Privacy::W);
    REQUIRE(post.size() == 1);
    CHECK(post.begin()->second == 1);
    CHECK_THROWS_AS(posterior(d, "other", Privacy::W), Error);
  }
}

TEST_CASE("privacy verdicts") {
  CHECK(check_privacy(Setting::PcsiI, params_for(Setting::PcsiI, 4, 2, 5), Privacy::WS).holds);
  CHECK(check_privacy(Setting::PcsiII, params_for(Setting::PcsiII, 4, 2, 5), Privacy::WS).holds);
  CHECK(check_privacy(Setting::PcsiII, params_for(Setting::PcsiII, 4, 4, 5), Privacy::WS).holds);

  const auto mpc = params_for(Setting::CsiI, 5, 2, 3);
  const auto w = check_privacy(Setting::CsiI, mpc, Privacy::W);
  CHECK(w.holds);
  CHECK(w.deviation == 0);
  CHECK(w.prior == Rational(1, 5));
  CHECK_FALSE(w.witness);

  const auto ws = check_privacy(Setting::CsiI, mpc, Privacy::WS);
  CHECK_FALSE(ws.holds);
  CHECK(ws.deviation > 0);
  REQUIRE(ws.witness);
  Rational worst = 0;
  for (const auto& [k, v] : ws.witness->posterior) worst = std::max(worst, abs_diff(v, ws.prior));
  CHECK(worst == ws.deviation);
  const auto j = to_json(ws);
  CHECK(j["verdict"] == "violated");
  CHECK(j.contains("witness"));
  CHECK(to_json(w)["verdict"] == "holds");
  CHECK(to_json(w)["deviation"] == "0/1");

  // includes the case-2 boundary 2M = K+2 at (4, 3) and (6, 4)
  for (auto [K, M] : {std::pair{6, 2}, std::pair{6, 3}, std::pair{6, 5}, std::pair{4, 4},
                      std::pair{4, 3}, std::pair{6, 4}}) {
    const auto r = check_privacy(Setting::CsiII, params_for(Setting::CsiII, K, M, 3), Privacy::W);
    CHECK(r.holds);
    CHECK(r.prior == Rational(1, K));
  }
}

TEST_CASE("enumeration respects its cap and is schedule independent") {
  const auto p = params_for(Setting::CsiI, 6, 2, 5);
  CHECK_THROWS_AS(enumerate_distribution(Setting::CsiI, p, 1000), EnumerationTooLarge);
  CHECK_THROWS_AS(enumerate_distribution(Setting::CsiII, params_for(Setting::CsiI, 5, 2, 3)),
                  ModelViolation);
  const auto small = params_for(Setting::CsiII, 6, 3, 3);
  const auto a = enumerate_distribution(Setting::CsiII, small, kDefaultEnumerationCap, 1);
  const auto b = enumerate_distribution(Setting::CsiII, small, kDefaultEnumerationCap, 7);
  CHECK(a.table == b.table);
}

TEST_CASE("sampled queries follow the enumerated law") {
  Rng rng(77);
  for (auto [setting, K, M, q] :
       {std::tuple{Setting::PcsiI, 4, 2, 5}, std::tuple{Setting::PcsiII, 4, 2, 5},
        std::tuple{Setting::CsiI, 5, 2, 3}, std::tuple{Setting::CsiII, 6, 3, 3},
        std::tuple{Setting::CsiII, 6, 5, 3}, std::tuple{Setting::CsiII, 6, 2, 3}}) {
    CAPTURE(to_string(setting));
    const auto p = params_for(setting, K, M, q);
    const auto dist = enumerate_distribution(setting, p);
    const auto idx = static_cast<std::uint32_t>(rng.uniform(dist.secrets.size()));
    const auto& s = dist.secrets[idx];
    std::map<std::string, std::size_t> cell;
    std::vector<double> probs;
    for (const auto& [key, row] : dist.table) {
      auto it = row.find(idx);
      if (it == row.end()) continue;
      cell[key] = probs.size();
      probs.push_back(it->second.convert_to<double>());
    }
    std::vector<std::uint64_t> counts(probs.size(), 0);
    for (int t = 0; t < 100'000; ++t) {
      const auto key = key_of(prepare_query(setting, p, s, rng).query);
      auto it = cell.find(key);
      REQUIRE(it != cell.end());
      ++counts[it->second];
    }
    CHECK(testing::chi_square_ok(counts, probs));
  }
}

TEST_CASE("RSC balance identities") {
  for (std::uint16_t K = 2; K <= 20; ++K)
    for (std::uint16_t M = 2; M <= K; ++M) {
      if (M >= 3 && 2 * M <= K + 2) {
        const auto pr = rsc_include_probability(2, K, M);
        CHECK(pr >= 0);
        CHECK(pr <= 1);
        if (2 * M == K + 2) {
          // the demand always joins U_2; no second route to balance
          CHECK(pr == 1);
          CHECK_THROWS_AS(rsc_balance(2, K, M), ParamError);
        } else {
          const auto b = rsc_balance(2, K, M);
          CHECK(b.with_demand == b.without_demand);
          CHECK(b.with_demand == Rational(M - 1, K) / BigInt(binomial(K - M, M - 2)));
        }
      }
      if (M + 1 <= K && 2 * M >= K + 1) {
        const auto b = rsc_balance(3, K, M);
        CHECK(b.with_demand == b.without_demand);
        CHECK(b.without_demand == Rational(K - M, K) / BigInt(binomial(M - 1, 2 * M - K)));
      }
    }
  CHECK_THROWS_AS(rsc_include_probability(2, 6, 5), ParamError);
  CHECK_THROWS_AS(rsc_include_probability(3, 6, 3), ParamError);
}

TEST_CASE("necessary condition: worked example witness") {
  const auto rows = mat({{1, 2, 4, 2}, {0, 2, 3, 1}}, 5);
  const auto p = params_for(Setting::PcsiI, 4, 2, 5);
  const auto r = necessary_condition(rows, p, Privacy::WS, 0);
  CHECK(r.passes);
  CHECK(r.candidates.size() == 12);
  for (const auto& c : r.candidates) {
    CHECK(c.passes);
    REQUIRE(c.witness);
    check_witness(rows, c.demand, c.support, *c.witness);
    if (c.demand == 1 && c.support == std::vector<std::uint16_t>{2, 3}) {
      CHECK(c.witness->lambda == FqVector{Fq(2, 5), Fq(1, 5)});
      CHECK(c.witness->mu == Fq(4, 5));
      CHECK(c.witness->divisor == Fq(2, 5));
      CHECK(c.witness->side_coeffs == std::vector<Fq>{Fq(1, 5), Fq(1, 5)});
    }
  }
}

TEST_CASE("necessary condition: identity and single-row extremes") {
  for (std::uint8_t theta : {0, 1}) {
    const auto p = params_for(theta ? Setting::PcsiII : Setting::PcsiI, 4, 2, 3);
    CHECK(necessary_condition(FqMatrix::identity(4, PrimeField(3)), p, Privacy::WS, theta).passes);
  }
  const auto e1 = mat({{1, 0, 0}}, 3);
  const auto p = params_for(Setting::CsiI, 3, 1, 3);
  for (auto kind : {Privacy::W, Privacy::WS}) {
    const auto r = necessary_condition(e1, p, kind, 0);
    CHECK_FALSE(r.passes);
    for (const auto& c : r.candidates) {
      if (c.demand == 2) CHECK_FALSE(c.passes);
      if (c.demand == 2) CHECK(!brute_decodable(e1, 2, {1}));
      if (c.demand == 2) CHECK(!brute_decodable(e1, 2, {3}));
    }
  }
}

TEST_CASE("necessary condition agrees with exhaustive search") {
  Rng rng(5);
  for (std::uint16_t q : {2, 3}) {
    const PrimeField f(q);
    for (int t = 0; t < 40; ++t) {
      const std::uint16_t K = 3 + static_cast<std::uint16_t>(rng.uniform(2));
      FqMatrix rows(1 + rng.uniform(2), K, f);
      for (std::size_t i = 0; i < rows.rows(); ++i)
        for (std::size_t j = 0; j < K; ++j) rows(i, j) = sample_element(f, rng);
      for (std::uint8_t theta : {0, 1}) {
        const std::uint16_t M = theta ? 2 : 1;
        const auto p = params_for(theta ? Setting::PcsiII : Setting::PcsiI, K, M, q);
        const auto r = necessary_condition(rows, p, Privacy::WS, theta);
        bool all = true;
        for (const auto& c : r.candidates) {
          const bool brute = brute_decodable(rows, c.demand, c.support);
          CHECK(c.passes == brute);
          if (c.witness) check_witness(rows, c.demand, c.support, *c.witness);
          all = all && brute;
        }
        CHECK(r.passes == all);
        const auto rw = necessary_condition(rows, p, Privacy::W, theta);
        bool all_w = true;
        for (std::uint16_t w = 1; w <= K; ++w) {
          bool some = false;
          for (const auto& S : subsets(K, M))
            if (std::binary_search(S.begin(), S.end(), w) == (theta == 1))
              some = some || brute_decodable(rows, w, S);
          all_w = all_w && some;
        }
        CHECK(rw.passes == all_w);
      }
    }
  }
}

TEST_CASE("every generated query satisfies the necessary condition") {
  Rng rng(31);
  for (auto [setting, K, M, q] :
       {std::tuple{Setting::PcsiI, 4, 2, 5}, std::tuple{Setting::PcsiII, 4, 2, 5},
        std::tuple{Setting::CsiI, 5, 2, 3}, std::tuple{Setting::CsiII, 6, 2, 3},
        std::tuple{Setting::CsiII, 6, 3, 3}, std::tuple{Setting::CsiII, 4, 4, 3}}) {
    const auto p = params_for(setting, K, M, q);
    const auto kind = privacy_of(setting);
    for (int t = 0; t < 20; ++t) {
      const auto pq = prepare_query(setting, p, sample_secret(p, rng), rng);
      const auto rows = coefficient_rows(pq.query, K, p.field());
      CHECK(necessary_condition(rows, p, kind, theta_of(p.model)).passes);
    }
  }
}

TEST_CASE("every branch of every secret decodes on small parameters") {
  Rng rng(404);
  for (auto [setting, K, M, q] :
       {std::tuple{Setting::PcsiI, 4, 1, 5}, std::tuple{Setting::PcsiI, 4, 3, 5},
        std::tuple{Setting::PcsiII, 4, 2, 5}, std::tuple{Setting::PcsiII, 3, 3, 3},
        std::tuple{Setting::CsiI, 4, 1, 3}, std::tuple{Setting::CsiI, 4, 2, 5},
        std::tuple{Setting::CsiII, 4, 2, 3}, std::tuple{Setting::CsiII, 4, 3, 5},
        std::tuple{Setting::CsiII, 4, 4, 5}}) {
    CAPTURE(to_string(setting));
    const auto p = params_for(setting, K, M, q);
    const auto db = sample_database(p, rng);
    std::size_t branches = 0;
    for (const auto& s : all_secrets(K, M, p.model, q)) {
      const auto y = compute_side_info(db, s.support, s.coeffs);
      Rational mass = 0;
      for_each_branch(setting, p, s, [&](const PreparedQuery& pq, const Rational& w) {
        REQUIRE(decode(answer(pq.query, db), pq.state, y) == db[s.demand - 1u]);
        mass += w;
        ++branches;
      });
      CHECK(mass == 1);
      CHECK(branch_count(setting, p, s) > 0);
    }
    CHECK(branches > 0);
  }
}
