#include <doctest.h>

#include <map>

#include "pir/model.hpp"
#include "pir/rational.hpp"
#include "pir/rng.hpp"
#include "support.hpp"

using namespace pir;

TEST_CASE("parameter ranges per model") {
  CHECK_NOTHROW((ProblemParams{4, 1, Model::I, 5, 1}).validate());
  CHECK_NOTHROW((ProblemParams{4, 3, Model::I, 5, 1}).validate());
  CHECK_THROWS_AS((ProblemParams{4, 4, Model::I, 5, 1}).validate(), ParamError);
  CHECK_THROWS_AS((ProblemParams{4, 0, Model::I, 5, 1}).validate(), ParamError);
  CHECK_NOTHROW((ProblemParams{4, 4, Model::II, 5, 1}).validate());
  CHECK_THROWS_AS((ProblemParams{4, 1, Model::II, 5, 1}).validate(), ParamError);
  CHECK_THROWS_AS((ProblemParams{4, 2, Model::I, 6, 1}).validate(), ParamError);
  CHECK_THROWS_AS((ProblemParams{4, 2, Model::I, 5, 0}).validate(), ParamError);
  CHECK(theta_of(Model::I) == 0);
  CHECK(theta_of(Model::II) == 1);
}

TEST_CASE("secret validation") {
  const ProblemParams p{5, 2, Model::I, 3, 1};
  const PrimeField f(3);
  CHECK_NOTHROW(validate_secret(p, Secret{1, {2, 3}, {f(1), f(2)}}));
  CHECK_THROWS_AS(validate_secret(p, Secret{2, {2, 3}, {f(1), f(2)}}), ModelViolation);
  CHECK_THROWS_AS(validate_secret(p, Secret{1, {3, 2}, {f(1), f(2)}}), ParamError);
  CHECK_THROWS_AS(validate_secret(p, Secret{1, {2, 2}, {f(1), f(2)}}), ParamError);
  CHECK_THROWS_AS(validate_secret(p, Secret{1, {2, 3}, {f(0), f(2)}}), InvalidCoefficient);
  CHECK_THROWS_AS(validate_secret(p, Secret{1, {2, 6}, {f(1), f(2)}}), IndexError);
  CHECK_THROWS_AS(validate_secret(p, Secret{1, {2, 3}, {f(1)}}), ParamError);
  CHECK_THROWS_AS(validate_secret(p, Secret{1, {2, 3}, {Fq(1, 5), Fq(1, 5)}}), ModulusMismatch);
  const ProblemParams p2{5, 2, Model::II, 3, 1};
  CHECK_THROWS_AS(validate_secret(p2, Secret{1, {2, 3}, {f(1), f(2)}}), ModelViolation);
  CHECK_NOTHROW(validate_secret(p2, Secret{3, {2, 3}, {f(1), f(2)}}));
}

TEST_CASE("subsets are lexicographic and complete") {
  const auto s = subsets(5, 2);
  CHECK(s.size() == 10);
  CHECK(s.front() == std::vector<std::uint16_t>{1, 2});
  CHECK(s.back() == std::vector<std::uint16_t>{4, 5});
  CHECK(std::is_sorted(s.begin(), s.end()));
  for (unsigned K = 1; K <= 8; ++K)
    for (unsigned M = 0; M <= K; ++M)
      CHECK(BigInt(subsets(K, M).size()) == binomial(K, M));
}

TEST_CASE("all_secrets counts every admissible triple") {
  for (std::uint16_t q : {2, 3, 5})
    for (std::uint16_t K = 2; K <= 5; ++K)
      for (std::uint16_t M = 1; M <= K; ++M) {
        const auto qm = static_cast<unsigned long>(std::pow(q - 1, M));
        if (M <= K - 1)
          CHECK(BigInt(all_secrets(K, M, Model::I, q).size()) == binomial(K, M) * (K - M) * qm);
        if (M >= 2)
          CHECK(BigInt(all_secrets(K, M, Model::II, q).size()) == binomial(K, M) * M * qm);
      }
  const auto all = all_secrets(4, 2, Model::I, 3);
  CHECK(std::is_sorted(all.begin(), all.end(), [](const Secret& a, const Secret& b) {
    return std::tie(a.support, a.demand, a.coeffs) < std::tie(b.support, b.demand, b.coeffs);
  }));
}

TEST_CASE("sampled secrets follow the uniform model law") {
  for (auto model : {Model::I, Model::II}) {
    const ProblemParams p{4, 2, model, 3, 1};
    const auto all = all_secrets(4, 2, model, 3);
    std::map<Secret, std::size_t> index;
    for (std::size_t i = 0; i < all.size(); ++i) index[all[i]] = i;
    std::vector<std::uint64_t> counts(all.size(), 0);
    Rng rng(17);
    for (int t = 0; t < 60'000; ++t) {
      auto s = sample_secret(p, rng);
      REQUIRE(index.count(s) == 1);
      ++counts[index[s]];
    }
    CHECK(testing::chi_square_ok(counts, std::vector<double>(all.size(), 1.0 / all.size())));
  }
}

TEST_CASE("side information and instance invariants") {
  const PrimeField f(5);
  Database db{Message({f(1), f(2)}), Message({f(3), f(4)}), Message({f(0), f(1)})};
  const auto y = compute_side_info(db, {1, 3}, {f(2), f(3)});
  CHECK(y == Message({f(2), f(2 * 2 + 3)}));
  CHECK_THROWS_AS(compute_side_info(db, {1, 4}, {f(2), f(3)}), IndexError);
  CHECK_THROWS_AS(compute_side_info(db, {1, 3}, {f(0), f(3)}), InvalidCoefficient);

  Rng rng(1);
  const ProblemParams p{6, 3, Model::II, 7, 4};
  auto inst = sample_instance(p, rng);
  CHECK_NOTHROW(inst.validate());
  CHECK(inst.theta() == 1);
  CHECK(inst.demanded() == inst.database[inst.secret.demand - 1u]);

  const auto j = instance_to_json(inst);
  CHECK(instance_from_json(j).database == inst.database);
  CHECK(instance_from_json(j).secret == inst.secret);

  inst.side_info = inst.side_info + Message::zero(p.field(), 4) + inst.database[0];
  CHECK_THROWS_AS(inst.validate(), ParamError);
}
