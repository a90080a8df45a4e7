#pragma once

#include <map>
#include <string>
#include <vector>

#include "deltaforge/diffpoly.hpp"

namespace deltaforge {

/// Quotient num/den of differential polynomials. Only light normalization is
/// applied (constant denominators are absorbed, common monomial factors of a
/// monomial denominator cancel); equality is decided by cross-multiplication.
class RatExpr {
 public:
  RatExpr() : den_(lift(1)) {}
  explicit RatExpr(DiffPoly num) : num_(std::move(num)), den_(lift(1)) {}
  explicit RatExpr(const BaseElem& c) : num_(c), den_(lift(1)) {}
  RatExpr(DiffPoly num, DiffPoly den);

  const DiffPoly& num() const { return num_; }
  const DiffPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  RatExpr operator-() const { return RatExpr(-num_, den_); }
  RatExpr& operator+=(const RatExpr& o);
  RatExpr& operator-=(const RatExpr& o) { return *this += -o; }
  RatExpr& operator*=(const RatExpr& o);
  friend RatExpr operator+(RatExpr a, const RatExpr& b) { return a += b; }
  friend RatExpr operator-(RatExpr a, const RatExpr& b) { return a -= b; }
  friend RatExpr operator*(RatExpr a, const RatExpr& b) { return a *= b; }

  /// Throws Error when the numerator is zero.
  RatExpr inverse() const;
  RatExpr pow(std::uint32_t e) const;

  /// Cross-multiplication equality.
  friend bool operator==(const RatExpr& a, const RatExpr& b) { return a.num_ * b.den_ == b.num_ * a.den_; }
  friend bool operator!=(const RatExpr& a, const RatExpr& b) { return !(a == b); }

 private:
  void normalize();

  DiffPoly num_;
  DiffPoly den_;
};

inline bool is_zero(const RatExpr& r) { return r.is_zero(); }

/// Quotient rule.
RatExpr apply_delta(const DiffRing& ring, unsigned j, const RatExpr& r);
RatExpr partial(const RatExpr& r, const AlgInd& v);

/// theta x_k -> theta(images[k]) for the listed variables.
RatExpr substitute_rat(const DiffRing& ring, const DiffPoly& f, const std::map<std::uint32_t, RatExpr>& images);
RatExpr substitute_rat(const DiffRing& ring, const RatExpr& r, const std::map<std::uint32_t, RatExpr>& images);

/// Replaces individual indeterminates (no extension to derivatives).
DiffPoly substitute_indeterminates(const DiffPoly& f, const std::map<AlgInd, DiffPoly>& images);
RatExpr substitute_indeterminates(const RatExpr& r, const std::map<AlgInd, DiffPoly>& images);

/// `num` when the denominator is 1; term-wise quotients over a monomial
/// denominator; `(num)/(den)` otherwise.
std::string format(const DiffRing& ring, const RatExpr& r);

/// Dense matrix over a commutative ring type.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static Matrix identity(std::size_t n, const T& one) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  const std::vector<T>& data() const { return a_; }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    check_same(a, b);
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] += b.a_[k];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix& b) {
    check_same(a, b);
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] -= b.a_[k];
    return a;
  }
  friend Matrix operator-(const Matrix& a) { return a.map([](const T& x) { return -x; }); }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw Error("matrix size mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k)
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

  template <class F>
  Matrix map(F&& f) const {
    Matrix m(rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) m.a_[k] = f(a_[k]);
    return m;
  }

 private:
  static void check_same(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error("matrix size mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> a_;
};

/// Determinant by cofactor expansion (sizes up to 3 in practice).
template <class T>
T determinant(const Matrix<T>& m, const T& one) {
  if (!m.square()) throw Error("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return one;
  if (n == 1) return m(0, 0);
  T det{};
  for (std::size_t j = 0; j < n; ++j) {
    Matrix<T> minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t k = 0, c = 0; k < n; ++k)
        if (k != j) minor(i - 1, c++) = m(i, k);
    T term = m(0, j) * determinant(minor, one);
    if (j % 2)
      det -= term;
    else
      det += term;
  }
  return det;
}

/// Adjugate: adj(m) * m = det(m) * I.
template <class T>
Matrix<T> adjugate(const Matrix<T>& m, const T& one) {
  const std::size_t n = m.rows();
  Matrix<T> adj(n, n);
  if (n == 1) {
    adj(0, 0) = one;
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Matrix<T> minor(n - 1, n - 1);
      for (std::size_t a = 0, r = 0; a < n; ++a) {
        if (a == i) continue;
        for (std::size_t b = 0, c = 0; b < n; ++b)
          if (b != j) minor(r, c++) = m(a, b);
        ++r;
      }
      T cof = determinant(minor, one);
      adj(j, i) = (i + j) % 2 ? -cof : cof;
    }
  }
  return adj;
}

}  // namespace deltaforge
