#include "tnconf/matrix.hpp"

#include <algorithm>
#include <sstream>

namespace tnconf {

RatMatrix::RatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Rat(0)) {}

RatMatrix::RatMatrix(std::initializer_list<std::initializer_list<Rat>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

RatMatrix RatMatrix::identity(std::size_t n) {
  RatMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RatMatrix RatMatrix::column(const RatVector& v) {
  RatMatrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

RatMatrix RatMatrix::outer(const RatVector& u, const RatVector& v) {
  RatMatrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  }
  return m;
}

bool RatMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Rat& x) { return x == 0; });
}

RatVector RatMatrix::row(std::size_t i) const {
  return RatVector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                   data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

RatVector RatMatrix::col(std::size_t j) const {
  RatVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

RatMatrix RatMatrix::transpose() const {
  RatMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

RatVector RatMatrix::apply(const RatVector& v) const {
  if (v.size() != cols_) throw ShapeError("apply: vector length mismatch");
  RatVector out(rows_, Rat(0));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
  }
  return out;
}

RatMatrix& RatMatrix::operator+=(const RatMatrix& other) {
  if (!same_shape(other)) throw ShapeError("matrix add: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

RatMatrix& RatMatrix::operator-=(const RatMatrix& other) {
  if (!same_shape(other)) throw ShapeError("matrix sub: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

RatMatrix& RatMatrix::operator*=(const Rat& s) {
  for (auto& x : data_) x *= s;
  return *this;
}

RatMatrix operator+(RatMatrix a, const RatMatrix& b) { return a += b; }
RatMatrix operator-(RatMatrix a, const RatMatrix& b) { return a -= b; }
RatMatrix operator-(const RatMatrix& a) { return Rat(-1) * a; }
RatMatrix operator*(const Rat& s, RatMatrix a) { return a *= s; }

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matrix product: inner dimension mismatch");
  RatMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Rat& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Rat dot(const RatMatrix& a, const RatMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("Hilbert-Schmidt product: shape mismatch");
  Rat s = 0;
  for (std::size_t k = 0; k < a.entries().size(); ++k) s += a.entries()[k] * b.entries()[k];
  return s;
}

Rat trace(const RatMatrix& a) {
  if (!a.is_square()) throw ShapeError("trace: non-square matrix");
  Rat s = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

Rat frobenius_sq(const RatMatrix& a) { return dot(a, a); }

Rat det(const RatMatrix& m) {
  if (!m.is_square()) throw ShapeError("det: non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return Rat(1);
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  RatMatrix a = m;
  Rat result = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a(p, k) == 0) ++p;
    if (p == n) return Rat(0);
    if (p != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(a(p, j), a(k, j));
      result = -result;
    }
    result *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k) == 0) continue;
      Rat f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return result;
}

RatMatrix cof(const RatMatrix& m) {
  if (!m.is_square()) throw ShapeError("cof: non-square matrix");
  const std::size_t n = m.rows();
  RatMatrix c(n, n);
  if (n == 0) return c;
  if (n == 1) {
    c(0, 0) = 1;
    return c;
  }
  RatMatrix sub(n - 1, n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // delete row j and column i
      for (std::size_t r = 0, rr = 0; r < n; ++r) {
        if (r == j) continue;
        for (std::size_t s = 0, ss = 0; s < n; ++s) {
          if (s == i) continue;
          sub(rr, ss) = m(r, s);
          ++ss;
        }
        ++rr;
      }
      Rat d = det(sub);
      c(i, j) = ((i + j) % 2 == 0) ? d : Rat(-d);
    }
  }
  return c;
}

RatMatrix rref(const RatMatrix& m, std::vector<std::size_t>* pivots) {
  RatMatrix a = m;
  std::vector<std::size_t> piv;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t p = row;
    while (p < a.rows() && a(p, col) == 0) ++p;
    if (p == a.rows()) continue;
    if (p != row) {
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(row, j));
    }
    Rat inv = 1 / a(row, col);
    for (std::size_t j = col; j < a.cols(); ++j) a(row, j) *= inv;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == row || a(i, col) == 0) continue;
      Rat f = a(i, col);
      for (std::size_t j = col; j < a.cols(); ++j) a(i, j) -= f * a(row, j);
    }
    piv.push_back(col);
    ++row;
  }
  if (pivots) *pivots = std::move(piv);
  return a;
}

std::size_t rank(const RatMatrix& m) {
  std::vector<std::size_t> piv;
  rref(m, &piv);
  return piv.size();
}

RatMatrix inverse(const RatMatrix& m) {
  if (!m.is_square()) throw ShapeError("inverse: non-square matrix");
  const std::size_t n = m.rows();
  RatMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  std::vector<std::size_t> piv;
  RatMatrix r = rref(aug, &piv);
  if (piv.size() < n || piv[n - 1] != n - 1) throw std::domain_error("inverse: singular matrix");
  RatMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = r(i, n + j);
  }
  return inv;
}

std::vector<RatVector> nullspace(const RatMatrix& m) {
  std::vector<std::size_t> piv;
  RatMatrix r = rref(m, &piv);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : piv) is_pivot[c] = true;
  std::vector<RatVector> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    RatVector v(m.cols(), Rat(0));
    v[f] = 1;
    for (std::size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -r(k, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<RatVector> solve(const RatMatrix& a, const RatVector& b) {
  if (b.size() != a.rows()) throw ShapeError("solve: right-hand side length mismatch");
  RatMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  std::vector<std::size_t> piv;
  RatMatrix r = rref(aug, &piv);
  if (!piv.empty() && piv.back() == a.cols()) return std::nullopt;
  RatVector x(a.cols(), Rat(0));
  for (std::size_t k = 0; k < piv.size(); ++k) x[piv[k]] = r(k, a.cols());
  return x;
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
  if (auto c = a.order() <=> b.order(); c != 0) return c;
  if (auto c = a.rows <=> b.rows; c != 0) return c;
  return a.cols <=> b.cols;
}

std::string MultiIndex::key() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < rows.size(); ++k) os << (k ? "," : "") << rows[k] + 1;
  os << ':';
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k] + 1;
  return os.str();
}

MultiIndex MultiIndex::parse_key(const std::string& key) {
  auto colon = key.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("multi-index key lacks ':': " + key);
  auto parse_list = [&](const std::string& part) {
    std::vector<std::size_t> out;
    std::stringstream ss(part);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) throw std::invalid_argument("bad multi-index key: " + key);
      std::size_t pos = 0;
      long v = std::stol(item, &pos);
      if (pos != item.size() || v < 1) throw std::invalid_argument("bad multi-index key: " + key);
      out.push_back(static_cast<std::size_t>(v - 1));
    }
    return out;
  };
  MultiIndex z{parse_list(key.substr(0, colon)), parse_list(key.substr(colon + 1))};
  if (z.rows.size() != z.cols.size() || z.rows.empty()) throw std::invalid_argument("bad multi-index key: " + key);
  return z;
}

void validate(const MultiIndex& z, std::size_t rows, std::size_t cols) {
  if (z.rows.size() != z.cols.size() || z.rows.empty()) throw std::out_of_range("multi-index: |I| != |J| or empty");
  for (std::size_t k = 0; k < z.rows.size(); ++k) {
    if (z.rows[k] >= rows || z.cols[k] >= cols) throw std::out_of_range("multi-index " + z.key() + " out of range");
    if (k > 0 && (z.rows[k] <= z.rows[k - 1] || z.cols[k] <= z.cols[k - 1])) {
      throw std::out_of_range("multi-index " + z.key() + " not strictly increasing");
    }
  }
}

namespace {

void combinations(std::size_t n, std::size_t r, std::size_t start, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == r) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, r, i + 1, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t r) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  combinations(n, r, 0, cur, out);
  return out;
}

}  // namespace

std::vector<MultiIndex> multi_indices(std::size_t n, std::size_t m, std::size_t r) {
  std::vector<MultiIndex> out;
  if (r == 0 || r > n || r > m) return out;
  auto rs = combinations(n, r);
  auto cs = combinations(m, r);
  for (const auto& i : rs) {
    for (const auto& j : cs) out.push_back({i, j});
  }
  return out;
}

std::vector<MultiIndex> all_minor_indices(std::size_t n, std::size_t m) {
  std::vector<MultiIndex> out;
  for (std::size_t r = 2; r <= std::min(n, m); ++r) {
    auto level = multi_indices(n, m, r);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

RatMatrix minor_extract(const RatMatrix& m, const MultiIndex& z) {
  validate(z, m.rows(), m.cols());
  const std::size_t r = z.order();
  RatMatrix sub(r, r);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = 0; b < r; ++b) sub(a, b) = m(z.rows[a], z.cols[b]);
  }
  return sub;
}

RatMatrix embed_cof_bar(const RatMatrix& m, const MultiIndex& z) {
  RatMatrix c = cof(minor_extract(m, z)).transpose();
  RatMatrix out(m.rows(), m.cols());
  for (std::size_t a = 0; a < z.order(); ++a) {
    for (std::size_t b = 0; b < z.order(); ++b) out(z.rows[a], z.cols[b]) = c(a, b);
  }
  return out;
}

std::optional<RankOneFactors> rank_one_decompose(const RatMatrix& m) {
  std::size_t lead = m.cols();
  for (std::size_t j = 0; j < m.cols() && lead == m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (m(i, j) != 0) {
        lead = j;
        break;
      }
    }
  }
  if (lead == m.cols()) return RankOneFactors{true, RatVector(m.rows(), Rat(0)), RatVector(m.cols(), Rat(0))};

  RankOneFactors f;
  f.u = m.col(lead);
  std::size_t pivot = 0;
  while (f.u[pivot] == 0) ++pivot;
  f.v.assign(m.cols(), Rat(0));
  for (std::size_t j = 0; j < m.cols(); ++j) {
    f.v[j] = m(pivot, j) / f.u[pivot];
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (m(i, j) != f.u[i] * f.v[j]) return std::nullopt;
    }
  }
  return f;
}

}  // namespace tnconf
