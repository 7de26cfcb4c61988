#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tnconf/rational.hpp"

namespace tnconf {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of exact rationals.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(std::size_t rows, std::size_t cols);
  RatMatrix(std::initializer_list<std::initializer_list<Rat>> rows);

  static RatMatrix identity(std::size_t n);
  static RatMatrix zero(std::size_t rows, std::size_t cols) { return RatMatrix(rows, cols); }
  static RatMatrix column(const RatVector& v);
  /// u ⊗ v, i.e. the n×m matrix with entries u_i v_j.
  static RatMatrix outer(const RatVector& u, const RatVector& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool same_shape(const RatMatrix& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }
  bool is_zero() const;

  Rat& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rat& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<Rat>& entries() const { return data_; }

  RatVector row(std::size_t i) const;
  RatVector col(std::size_t j) const;
  RatMatrix transpose() const;
  RatVector apply(const RatVector& v) const;

  RatMatrix& operator+=(const RatMatrix& other);
  RatMatrix& operator-=(const RatMatrix& other);
  RatMatrix& operator*=(const Rat& s);

  friend bool operator==(const RatMatrix& a, const RatMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rat> data_;
};

RatMatrix operator+(RatMatrix a, const RatMatrix& b);
RatMatrix operator-(RatMatrix a, const RatMatrix& b);
RatMatrix operator-(const RatMatrix& a);
RatMatrix operator*(const Rat& s, RatMatrix a);
RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);

/// Hilbert-Schmidt product tr(AᵀB).
Rat dot(const RatMatrix& a, const RatMatrix& b);
Rat trace(const RatMatrix& a);
Rat frobenius_sq(const RatMatrix& a);

Rat det(const RatMatrix& m);
/// cof(M)_{ij} = (-1)^{i+j} det(M with row j and column i removed), so that
/// M·cof(M) = cof(M)·M = det(M)·id.
RatMatrix cof(const RatMatrix& m);
std::size_t rank(const RatMatrix& m);
/// Throws ShapeError when m is not square and std::domain_error when singular.
RatMatrix inverse(const RatMatrix& m);

/// Reduced row echelon form; `pivots` receives the pivot column of each nonzero row.
RatMatrix rref(const RatMatrix& m, std::vector<std::size_t>* pivots = nullptr);
/// Basis of the right kernel, one vector per free column (in column order).
std::vector<RatVector> nullspace(const RatMatrix& m);
/// Some exact solution of A x = b, or nullopt when the system is inconsistent.
std::optional<RatVector> solve(const RatMatrix& a, const RatVector& b);

/// A pair (I, J) of strictly increasing 0-based row and column index lists
/// of equal length r >= 1.
struct MultiIndex {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;

  std::size_t order() const { return rows.size(); }
  /// Lexicographic on (r, I, J).
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b);
  friend bool operator==(const MultiIndex& a, const MultiIndex& b) = default;

  /// "I:J" with 1-based comma-separated indices, e.g. "1,2:1,2".
  std::string key() const;
  static MultiIndex parse_key(const std::string& key);
};

void validate(const MultiIndex& z, std::size_t rows, std::size_t cols);

/// All multi-indices of order r for an n×m matrix, lexicographic in (I, J).
std::vector<MultiIndex> multi_indices(std::size_t n, std::size_t m, std::size_t r);
/// Orders 2..min(n,m), in the fixed (r, I, J) lexicographic order used for Φ.
std::vector<MultiIndex> all_minor_indices(std::size_t n, std::size_t m);

RatMatrix minor_extract(const RatMatrix& m, const MultiIndex& z);
/// n×m matrix holding cof(M^Z)ᵀ on rows I / columns J and zero elsewhere.
RatMatrix embed_cof_bar(const RatMatrix& m, const MultiIndex& z);

struct RankOneFactors {
  bool zero = false;  ///< M = 0; u and v are then zero vectors
  RatVector u;
  RatVector v;
};

/// M = u ⊗ v when rank(M) <= 1. u is the first nonzero column and v holds
/// the coefficients of every column against it. nullopt when rank(M) >= 2.
std::optional<RankOneFactors> rank_one_decompose(const RatMatrix& m);

}  // namespace tnconf
