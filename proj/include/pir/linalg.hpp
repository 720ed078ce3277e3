#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pir/field.hpp"

namespace pir {

using FqVector = std::vector<Fq>;

/// Dense row-major matrix over GF(q).
class FqMatrix {
 public:
  /// rows x cols zero matrix.
  FqMatrix(std::size_t rows, std::size_t cols, const PrimeField& field);
  /// Builds from rows of equal length; throws ShapeMismatch otherwise.
  static FqMatrix from_rows(const std::vector<FqVector>& rows);
  static FqMatrix from_values(const std::vector<std::vector<std::uint32_t>>& rows,
                              const PrimeField& field);
  static FqMatrix identity(std::size_t n, const PrimeField& field);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  PrimeField field() const { return field_; }

  Fq& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Fq& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Fq> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  FqVector row_vector(std::size_t r) const;
  FqMatrix transpose() const;

  friend bool operator==(const FqMatrix&, const FqMatrix&) = default;

 private:
  std::size_t rows_, cols_;
  PrimeField field_;
  std::vector<Fq> data_;
};

std::ostream& operator<<(std::ostream& os, const FqMatrix& m);

/// Row vector times matrix, λ·m.
FqVector left_multiply(std::span<const Fq> lambda, const FqMatrix& m);

/// Reduced row echelon form. Pivots are the first nonzero entry scanning
/// columns left to right, so the result is deterministic.
struct RowEchelon {
  FqMatrix reduced;
  std::vector<std::size_t> pivot_cols;
};
RowEchelon rref(FqMatrix m);

std::size_t rank(const FqMatrix& m);

/// The affine set {x : x·m = b}: particular + span(basis).
struct AffineSolution {
  FqVector particular;
  std::vector<FqVector> basis;

  std::size_t nullity() const noexcept { return basis.size(); }
};

/// Default ceiling on q^nullity for solution enumeration.
inline constexpr std::uint64_t kMaxEnumeratedSolutions = 1'000'000;

std::optional<AffineSolution> solution_space(const FqMatrix& m, std::span<const Fq> b);

/// Coefficients λ with λ·m = v, if v lies in the row span of m.
std::optional<FqVector> in_span(std::span<const Fq> v, const FqMatrix& m);

/// Calls `visit` on every element of the affine set. Throws
/// EnumerationTooLarge when q^nullity exceeds `cap`. Returning false from
/// `visit` stops the walk early.
void for_each_solution(const AffineSolution& sol, const PrimeField& field,
                       const std::function<bool(const FqVector&)>& visit,
                       std::uint64_t cap = kMaxEnumeratedSolutions);

}  // namespace pir
