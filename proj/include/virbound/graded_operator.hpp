#pragma once

// Operators on a truncated representation, stored as blocks between levels.
//
// Every operator remembers the range of level shifts it would have without
// the cut, and its peak: the largest upward excursion any intermediate factor
// of a product makes. A source level k is safe when k + peak <= N: no factor
// ever needed a level above the cut. Shifts below level 0 are genuine
// annihilation and never unsafe.

#include "virbound/matrix.hpp"
#include "virbound/scalar.hpp"
#include "virbound/truncated_rep.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace virbound {

template <class S>
class GradedOperator {
 public:
  using Real = real_of<S>;
  using Key = std::pair<int, int>;  // (source level, target level)

  GradedOperator() = default;

  /// Zero operator on the levels of rep.
  template <class R>
  static GradedOperator on(const TruncatedRep<R>& rep) {
    GradedOperator op;
    op.n_max_ = rep.truncation();
    for (int k = 0; k <= rep.truncation(); ++k) {
      op.dims_.push_back(rep.dim(k));
      std::vector<Real> m;
      for (const auto& d : rep.metric(k)) m.push_back(Real(d));
      op.metric_.push_back(std::move(m));
    }
    return op;
  }

  /// L_n of the rep, scaled.
  template <class R>
  static GradedOperator mode(const TruncatedRep<R>& rep, int n, const S& scale = S(1)) {
    GradedOperator op = on(rep);
    op.min_shift_ = op.max_shift_ = -n;
    op.peak_ = std::max(0, -n);
    for (int k = 0; k <= rep.truncation(); ++k) {
      const int t = k - n;
      if (t < 0 || t > rep.truncation() || rep.dim(k) == 0 || rep.dim(t) == 0) continue;
      op.add_block(k, t, scaled(rep.block(n, k), scale));
    }
    return op;
  }

  int truncation() const { return n_max_; }
  int dim(int k) const { return dims_.at(k); }
  int min_shift() const { return min_shift_; }
  int max_shift() const { return max_shift_; }
  int peak() const { return peak_; }
  const std::map<Key, Matrix<S>>& blocks() const { return blocks_; }

  bool safe(int k) const { return k >= 0 && k <= n_max_ && k + peak_ <= n_max_; }

  std::vector<int> safe_levels() const {
    std::vector<int> out;
    for (int k = 0; k <= n_max_; ++k)
      if (safe(k)) out.push_back(k);
    return out;
  }

  void add_block(int src, int tgt, const Matrix<S>& m) {
    auto [it, inserted] = blocks_.emplace(Key{src, tgt}, m);
    if (!inserted) it->second += m;
  }

  GradedOperator& operator+=(const GradedOperator& o) {
    check_compatible(o);
    for (const auto& [key, m] : o.blocks_) add_block(key.first, key.second, m);
    merge_shifts(o.min_shift_, o.max_shift_);
    peak_ = std::max(peak_, o.peak_);
    return *this;
  }
  GradedOperator& operator-=(const GradedOperator& o) {
    check_compatible(o);
    for (const auto& [key, m] : o.blocks_) add_block(key.first, key.second, m * S(-1));
    merge_shifts(o.min_shift_, o.max_shift_);
    peak_ = std::max(peak_, o.peak_);
    return *this;
  }
  GradedOperator& operator*=(const S& s) {
    for (auto& [key, m] : blocks_) m *= s;
    return *this;
  }
  friend GradedOperator operator+(GradedOperator a, const GradedOperator& b) { return a += b; }
  friend GradedOperator operator-(GradedOperator a, const GradedOperator& b) { return a -= b; }
  friend GradedOperator operator*(const S& s, GradedOperator a) { return a *= s; }

  /// Composition a * b (b acts first).
  friend GradedOperator operator*(const GradedOperator& a, const GradedOperator& b) {
    a.check_compatible(b);
    GradedOperator out = a.empty_like();
    if (a.is_empty_range() || b.is_empty_range()) return out;
    out.min_shift_ = a.min_shift_ + b.min_shift_;
    out.max_shift_ = a.max_shift_ + b.max_shift_;
    out.peak_ = std::max(b.peak_, b.max_shift_ + a.peak_);
    for (const auto& [kb, mb] : b.blocks_)
      for (auto it = a.blocks_.lower_bound({kb.second, std::numeric_limits<int>::min()});
           it != a.blocks_.end() && it->first.first == kb.second; ++it)
        out.add_block(kb.first, it->first.second, it->second * mb);
    return out;
  }

  /// Adjoint with respect to the level metrics:
  /// A^dagger(t -> k) = D_k^{-1} A(k -> t)^H D_t.
  GradedOperator adjoint() const {
    GradedOperator out = empty_like();
    out.min_shift_ = -max_shift_;
    out.max_shift_ = -min_shift_;
    // reversing a product turns partial sums P_j into P_j - P_total
    out.peak_ = is_empty_range() ? 0 : peak_ - min_shift_;
    for (const auto& [key, m] : blocks_) {
      const auto [k, t] = key;
      Matrix<S> a = m.adjoint();
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = a(i, j) * S(Real(metric_[t][j] / metric_[k][i]));
      out.add_block(t, k, a);
    }
    return out;
  }

  /// Adds s times the identity on every level.
  GradedOperator& add_identity(const S& s) {
    for (int k = 0; k <= n_max_; ++k) {
      if (dims_[k] == 0) continue;
      Matrix<S> id(dims_[k], dims_[k]);
      for (int i = 0; i < dims_[k]; ++i) id(i, i) = s;
      add_block(k, k, id);
    }
    merge_shifts(0, 0);
    return *this;
  }

  /// Largest entry magnitude over blocks whose source level is safe.
  double max_abs_on_safe() const {
    double worst = 0.0;
    for (const auto& [key, m] : blocks_)
      if (safe(key.first)) worst = std::max(worst, m.max_abs());
    return worst;
  }

  bool is_zero_on_safe() const {
    for (const auto& [key, m] : blocks_)
      if (safe(key.first) && !m.is_zero()) return false;
    return true;
  }

  /// Graded vector: one coordinate vector per level.
  using Vector = std::vector<std::vector<S>>;

  Vector zero_vector() const {
    Vector v;
    for (int d : dims_) v.emplace_back(d, S(0));
    return v;
  }

  Vector apply(const Vector& v) const {
    Vector out = zero_vector();
    for (const auto& [key, m] : blocks_) {
      const auto y = m.apply(v[key.first]);
      for (std::size_t i = 0; i < y.size(); ++i) out[key.second][i] += y[i];
    }
    return out;
  }

  /// <x, y> with the level metrics (antilinear in x).
  S inner(const Vector& x, const Vector& y) const {
    S total(0);
    for (std::size_t k = 0; k < x.size(); ++k)
      for (std::size_t i = 0; i < x[k].size(); ++i)
        total += scalar_traits<S>::conj(x[k][i]) * S(metric_[k][i]) * y[k][i];
    return total;
  }

 private:
  static Matrix<S> scaled(const Matrix<real_of<S>>& m, const S& s) {
    Matrix<S> out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = S(m(i, j)) * s;
    return out;
  }

  GradedOperator empty_like() const {
    GradedOperator out;
    out.n_max_ = n_max_;
    out.dims_ = dims_;
    out.metric_ = metric_;
    return out;
  }

  bool is_empty_range() const { return min_shift_ > max_shift_; }

  void merge_shifts(int lo, int hi) {
    if (lo > hi) return;
    if (is_empty_range()) {
      min_shift_ = lo;
      max_shift_ = hi;
    } else {
      min_shift_ = std::min(min_shift_, lo);
      max_shift_ = std::max(max_shift_, hi);
    }
  }

  void check_compatible(const GradedOperator& o) const {
    if (n_max_ != o.n_max_ || dims_ != o.dims_) throw std::invalid_argument("operators live on different truncations");
  }

  int n_max_ = 0;
  std::vector<int> dims_;
  std::vector<std::vector<Real>> metric_;
  std::map<Key, Matrix<S>> blocks_;
  // empty range (min > max) for the zero operator
  int min_shift_ = 1;
  int max_shift_ = 0;
  int peak_ = 0;
};

}  // namespace virbound
