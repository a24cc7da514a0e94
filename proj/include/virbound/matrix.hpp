#pragma once

// Small dense row-major matrix used for both exact (Rational, ExactComplex)
// and floating-point blocks, plus the exact elimination routines the
// representation builder needs. Floating-point spectral work is delegated
// to Eigen through to_eigen().

#include "virbound/scalar.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace virbound {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  T& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  const T& operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  const std::vector<T>& data() const { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Conjugate transpose.
  Matrix adjoint() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = scalar_traits<T>::conj((*this)(i, j));
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
    Matrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (scalar_traits<T>::is_zero(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& x) { return scalar_traits<T>::is_zero(x); });
  }

  /// Largest entry magnitude, as a double.
  double max_abs() const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, scalar_traits<T>::magnitude(x));
    return m;
  }

  template <class U, class F>
  Matrix<U> map(F&& f) const {
    Matrix<U> r(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(i, j) = f((*this)(i, j));
    return r;
  }

  std::vector<T> column(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  std::vector<T> apply(const std::vector<T>& x) const {
    if (x.size() != cols_) throw std::invalid_argument("matrix-vector shape mismatch");
    std::vector<T> y(rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
Matrix<complex_of<T>> complexify(const Matrix<T>& m) {
  return m.template map<complex_of<T>>([](const T& x) { return to_complex(x); });
}

template <class T>
Eigen::MatrixXd to_eigen(const Matrix<T>& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<T, double>)
        e(i, j) = m(i, j);
      else
        e(i, j) = m(i, j).get_d();
    }
  return e;
}

inline Eigen::MatrixXcd to_eigen_complex(const Matrix<std::complex<double>>& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Matrix<double> from_eigen(const Eigen::MatrixXd& e) {
  Matrix<double> m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

/// Largest singular value (spectral norm) of a real block; 0 for empty blocks.
inline double spectral_norm(const Matrix<double>& m) {
  if (m.empty()) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  return svd.singularValues()(0);
}

inline double spectral_norm(const Matrix<std::complex<double>>& m) {
  if (m.empty()) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen_complex(m));
  return svd.singularValues()(0);
}

/// Exact reduced row echelon form; returns rank, pivot columns and a
/// basis of the right kernel.
struct ExactReduction {
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
  std::vector<std::vector<Rational>> kernel;
};

inline ExactReduction reduce_exact(Matrix<Rational> a) {
  ExactReduction out;
  const std::size_t rows = a.rows(), cols = a.cols();
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows; ++col) {
    std::size_t p = r;
    while (p < rows && sgn(a(p, col)) == 0) ++p;
    if (p == rows) continue;
    if (p != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(a(r, j), a(p, j));
    const Rational inv = 1 / a(r, col);
    for (std::size_t j = col; j < cols; ++j) a(r, j) *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || sgn(a(i, col)) == 0) continue;
      const Rational f = a(i, col);
      for (std::size_t j = col; j < cols; ++j) a(i, j) -= f * a(r, j);
    }
    out.pivots.push_back(col);
    ++r;
  }
  out.rank = r;

  std::vector<bool> is_pivot(cols, false);
  for (auto p : out.pivots) is_pivot[p] = true;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t i = 0; i < out.pivots.size(); ++i) v[out.pivots[i]] = -a(i, free);
    out.kernel.push_back(std::move(v));
  }
  return out;
}

/// Thrown when a Gram matrix that should be positive semidefinite is not.
struct IndefiniteForm : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Result of orthogonalizing a spanning set from its Gram matrix S:
/// columns of `combination` give the new basis vectors as combinations of
/// the spanning set, `norms` their squared lengths (1 in float mode).
template <class T>
struct Orthogonalization {
  Matrix<T> combination;
  std::vector<T> norms;
};

/// Exact symmetric elimination with diagonal pivoting (Gram-Schmidt on the
/// form). Pivots are taken in spanning-set order. A negative pivot, or a
/// leftover nonzero off-diagonal once every diagonal is zero, means the form
/// is indefinite; with allow_indefinite the elimination carries on and the
/// returned norms may be negative.
inline Orthogonalization<Rational> orthogonalize_exact(Matrix<Rational> s, bool allow_indefinite = false) {
  const std::size_t n = s.rows();
  if (s.cols() != n) throw std::invalid_argument("Gram matrix must be square");
  Matrix<Rational> comb = Matrix<Rational>::identity(n);
  std::vector<bool> used(n, false);
  std::vector<std::size_t> order;
  std::vector<Rational> norms;

  auto find_pivot = [&]() -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && sgn(s(i, i)) != 0) return i;
    return std::nullopt;
  };

  for (;;) {
    std::optional<std::size_t> pivot = find_pivot();
    if (!pivot) {
      // Only isotropic vectors left; a nonzero coupling between two of them
      // gives a vector of nonzero norm (u + w has norm 2<u, w>).
      std::optional<std::pair<std::size_t, std::size_t>> pair;
      for (std::size_t i = 0; i < n && !pair; ++i)
        for (std::size_t j = i + 1; j < n && !pair; ++j)
          if (!used[i] && !used[j] && sgn(s(i, j)) != 0) pair = {i, j};
      if (!pair) break;
      if (!allow_indefinite) throw IndefiniteForm("zero diagonal with nonzero coupling in Gram elimination");
      const auto [i, j] = *pair;
      for (std::size_t r = 0; r < n; ++r) comb(r, i) += comb(r, j);
      for (std::size_t c = 0; c < n; ++c) s(i, c) += s(j, c);
      for (std::size_t r = 0; r < n; ++r) s(r, i) += s(r, j);
      pivot = i;
    }
    const std::size_t p = *pivot;
    if (sgn(s(p, p)) < 0 && !allow_indefinite) throw IndefiniteForm("negative norm in Gram elimination");
    used[p] = true;
    order.push_back(p);
    norms.push_back(s(p, p));
    for (std::size_t q = 0; q < n; ++q) {
      if (used[q] || sgn(s(q, p)) == 0) continue;
      const Rational t = s(q, p) / s(p, p);
      for (std::size_t i = 0; i < n; ++i) comb(i, q) -= t * comb(i, p);
      for (std::size_t j = 0; j < n; ++j) s(q, j) -= t * s(p, j);
      for (std::size_t j = 0; j < n; ++j) s(j, q) -= t * s(j, p);
    }
  }

  Orthogonalization<Rational> out;
  out.combination = Matrix<Rational>(n, order.size());
  for (std::size_t c = 0; c < order.size(); ++c)
    for (std::size_t i = 0; i < n; ++i) out.combination(i, c) = comb(i, order[c]);
  out.norms = std::move(norms);
  return out;
}

/// Spectral orthonormalization of a real symmetric Gram matrix. Eigenvalues
/// with magnitude below `cutoff * max(1, |lambda|_max)` are treated as null
/// directions; a more negative one throws IndefiniteForm unless
/// allow_indefinite, in which case its basis vector gets norm -1.
inline Orthogonalization<double> orthonormalize_spectral(const Matrix<double>& s, double cutoff,
                                                         bool allow_indefinite = false) {
  const std::size_t n = s.rows();
  Orthogonalization<double> out;
  if (n == 0) {
    out.combination = Matrix<double>(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(to_eigen(s));
  const auto& vals = eig.eigenvalues();
  const auto& vecs = eig.eigenvectors();
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  const double tol = cutoff * scale;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < -tol && !allow_indefinite) throw IndefiniteForm("negative eigenvalue in Gram matrix");
    if (std::abs(vals(i)) > tol) keep.push_back(i);
  }
  // Largest eigenvalue first so the basis order is stable under tiny perturbations.
  std::reverse(keep.begin(), keep.end());
  out.combination = Matrix<double>(n, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const double inv = 1.0 / std::sqrt(std::abs(vals(keep[c])));
    for (std::size_t i = 0; i < n; ++i) out.combination(i, c) = vecs(i, keep[c]) * inv;
    out.norms.push_back(vals(keep[c]) > 0 ? 1.0 : -1.0);
  }
  return out;
}

}  // namespace virbound
