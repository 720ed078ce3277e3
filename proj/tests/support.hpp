#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "pir/field.hpp"
#include "pir/linalg.hpp"

namespace pir::testing {

/// Pearson statistic against expected probabilities; true when it stays
/// below the 0.999 quantile. Cells with no expected mass must stay empty.
inline bool chi_square_ok(const std::vector<std::uint64_t>& observed,
                          const std::vector<double>& expected_prob) {
  std::uint64_t n = 0;
  for (auto o : observed) n += o;
  double stat = 0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected_prob[i] * static_cast<double>(n);
    if (e == 0) {
      if (observed[i] != 0) return false;
      continue;
    }
    stat += (observed[i] - e) * (observed[i] - e) / e;
    ++cells;
  }
  if (cells < 2) return true;
  boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return stat < boost::math::quantile(dist, 0.999);
}

/// Every vector of GF(q)^n.
inline void for_each_vector(std::size_t n, const PrimeField& f,
                            const std::function<void(const FqVector&)>& visit) {
  FqVector v(n, f.zero());
  while (true) {
    visit(v);
    std::size_t i = 0;
    while (i < n) {
      v[i] += f.one();
      if (!v[i].is_zero()) break;
      ++i;
    }
    if (i == n) return;
  }
}

/// Row span by exhaustive combination; the size gives q^rank.
inline std::vector<FqVector> brute_span(const FqMatrix& m) {
  std::map<std::vector<std::uint16_t>, FqVector> seen;
  for_each_vector(m.rows(), m.field(), [&](const FqVector& lambda) {
    auto z = left_multiply(lambda, m);
    std::vector<std::uint16_t> key;
    for (const auto& x : z) key.push_back(x.value());
    seen.emplace(key, z);
  });
  std::vector<FqVector> out;
  for (auto& [k, v] : seen) out.push_back(v);
  return out;
}

inline FqMatrix mat(const std::vector<std::vector<std::uint32_t>>& rows, std::uint16_t q) {
  return FqMatrix::from_values(rows, PrimeField(q));
}

}  // namespace pir::testing
