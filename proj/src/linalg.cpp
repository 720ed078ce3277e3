#include "pir/linalg.hpp"

#include <algorithm>
#include <ostream>

namespace pir {

FqMatrix::FqMatrix(std::size_t rows, std::size_t cols, const PrimeField& field)
    : rows_(rows), cols_(cols), field_(field), data_(rows * cols, field.zero()) {
  if (rows == 0 || cols == 0) throw ShapeMismatch("matrix dimensions must be positive");
}

FqMatrix FqMatrix::from_rows(const std::vector<FqVector>& rows) {
  if (rows.empty() || rows.front().empty()) throw ShapeMismatch("empty matrix");
  PrimeField field(rows.front().front().modulus());
  FqMatrix m(rows.size(), rows.front().size(), field);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols_) throw ShapeMismatch("ragged rows");
    for (std::size_t c = 0; c < m.cols_; ++c) {
      if (rows[r][c].modulus() != field.order())
        throw ModulusMismatch("matrix entries over different fields");
      m(r, c) = rows[r][c];
    }
  }
  return m;
}

FqMatrix FqMatrix::from_values(const std::vector<std::vector<std::uint32_t>>& rows,
                               const PrimeField& field) {
  std::vector<FqVector> conv;
  for (const auto& r : rows) {
    FqVector v;
    for (auto x : r) v.push_back(field(x));
    conv.push_back(std::move(v));
  }
  return from_rows(conv);
}

FqMatrix FqMatrix::identity(std::size_t n, const PrimeField& field) {
  FqMatrix m(n, n, field);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = field.one();
  return m;
}

FqVector FqMatrix::row_vector(std::size_t r) const {
  auto s = row(r);
  return FqVector(s.begin(), s.end());
}

FqMatrix FqMatrix::transpose() const {
  FqMatrix t(cols_, rows_, field_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::ostream& operator<<(std::ostream& os, const FqMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    os << '[';
    for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? " " : "") << m(r, c);
    os << "]\n";
  }
  return os;
}

FqVector left_multiply(std::span<const Fq> lambda, const FqMatrix& m) {
  if (lambda.size() != m.rows()) throw ShapeMismatch("left_multiply: length != row count");
  FqVector out(m.cols(), m.field().zero());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (lambda[r].is_zero()) continue;
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += lambda[r] * m(r, c);
  }
  return out;
}

RowEchelon rref(FqMatrix m) {
  std::vector<std::size_t> pivots;
  std::size_t lead = 0;
  for (std::size_t c = 0; c < m.cols() && lead < m.rows(); ++c) {
    std::size_t p = lead;
    while (p < m.rows() && m(p, c).is_zero()) ++p;
    if (p == m.rows()) continue;
    if (p != lead)
      for (std::size_t k = 0; k < m.cols(); ++k) std::swap(m(p, k), m(lead, k));
    const Fq scale = m(lead, c).inv();
    for (std::size_t k = 0; k < m.cols(); ++k) m(lead, k) *= scale;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == lead || m(r, c).is_zero()) continue;
      const Fq f = m(r, c);
      for (std::size_t k = 0; k < m.cols(); ++k) m(r, k) -= f * m(lead, k);
    }
    pivots.push_back(c);
    ++lead;
  }
  return {std::move(m), std::move(pivots)};
}

std::size_t rank(const FqMatrix& m) { return rref(m).pivot_cols.size(); }

std::optional<AffineSolution> solution_space(const FqMatrix& m, std::span<const Fq> b) {
  if (b.size() != m.cols()) throw ShapeMismatch("solution_space: rhs length != column count");
  const auto field = m.field();
  // x·m = b  <=>  mᵀ xᵀ = bᵀ ; unknowns are the m.rows() entries of x.
  const std::size_t n = m.rows();
  FqMatrix aug(m.cols(), n + 1, field);
  for (std::size_t r = 0; r < m.cols(); ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = m(c, r);
    if (b[r].modulus() != field.order()) throw ModulusMismatch("rhs over a different field");
    aug(r, n) = b[r];
  }
  auto [red, pivots] = rref(std::move(aug));
  if (!pivots.empty() && pivots.back() == n) return std::nullopt;

  std::vector<bool> is_pivot(n, false);
  for (auto p : pivots) is_pivot[p] = true;

  AffineSolution sol{FqVector(n, field.zero()), {}};
  for (std::size_t i = 0; i < pivots.size(); ++i) sol.particular[pivots[i]] = red(i, n);

  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    FqVector v(n, field.zero());
    v[f] = field.one();
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -red(i, f);
    sol.basis.push_back(std::move(v));
  }
  return sol;
}

std::optional<FqVector> in_span(std::span<const Fq> v, const FqMatrix& m) {
  auto sol = solution_space(m, v);
  if (!sol) return std::nullopt;
  auto check = left_multiply(sol->particular, m);
  if (!std::equal(check.begin(), check.end(), v.begin(), v.end()))
    throw InternalError("in_span: solution failed re-multiplication");
  return std::move(sol->particular);
}

void for_each_solution(const AffineSolution& sol, const PrimeField& field,
                       const std::function<bool(const FqVector&)>& visit, std::uint64_t cap) {
  const std::size_t k = sol.basis.size();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    total *= field.order();
    if (total > cap) throw EnumerationTooLarge("solution space exceeds enumeration cap", total);
  }
  std::vector<std::uint32_t> digits(k, 0);
  for (std::uint64_t step = 0; step < total; ++step) {
    FqVector x = sol.particular;
    for (std::size_t i = 0; i < k; ++i) {
      if (digits[i] == 0) continue;
      const Fq a = field(digits[i]);
      for (std::size_t j = 0; j < x.size(); ++j) x[j] += a * sol.basis[i][j];
    }
    if (!visit(x)) return;
    for (std::size_t i = 0; i < k; ++i) {
      if (++digits[i] < field.order()) break;
      digits[i] = 0;
    }
  }
}

}  // namespace pir
