#pragma once

// Verma modules of the Virasoro algebra in the partition (PBW) basis.
//
// A monomial indexed by the partition (a1 >= a2 >= ... >= ak) is the vector
// L_{-a1} L_{-a2} ... L_{-ak} Phi, where Phi is the lowest-weight vector:
// L_n Phi = 0 for n > 0 and L_0 Phi = h Phi. The action of L_n is computed by
// commuting it to the right with
//   [L_n, L_m] = (n - m) L_{n+m} + (c/12)(n^3 - n) delta_{n+m,0}.
// The inner product is induced by L_n^* = L_{-n} with <Phi, Phi> = 1.

#include "virbound/matrix.hpp"
#include "virbound/partition.hpp"
#include "virbound/scalar.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace virbound {

template <class S>
struct CentralCharge {
  S value;
  explicit CentralCharge(S v) : value(std::move(v)) {
    if (!(value > 0)) throw std::invalid_argument("central charge must be positive");
  }
};

template <class S>
struct LowestWeight {
  S value;
  explicit LowestWeight(S v) : value(std::move(v)) {
    if (value < 0) throw std::invalid_argument("lowest weight must be nonnegative");
  }
};

/// True when c >= 1 or c = 1 - 6/((m+2)(m+3)) for some integer m >= 1.
inline bool admissible_central_charge(const Rational& c) {
  if (c >= 1) return true;
  if (c <= 0) return false;
  const Rational q = Rational(6) / (1 - c);  // must equal (m+2)(m+3)
  if (q.get_den() != 1) return false;
  for (long m = 1;; ++m) {
    const long v = (m + 2) * (m + 3);
    if (q == v) return true;
    if (q < v) return false;
  }
}

template <class S>
class VermaVector {
 public:
  VermaVector() = default;
  explicit VermaVector(int level) : level_(level) {}
  VermaVector(int level, const Partition& p, S coeff = S(1)) : level_(level) {
    if (p.weight() != level) throw std::invalid_argument("partition weight must equal level");
    if (!scalar_traits<S>::is_zero(coeff)) terms_.emplace(p, std::move(coeff));
  }

  static VermaVector lowest_weight() { return VermaVector(0, Partition{}); }

  int level() const { return level_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Partition, S>& terms() const { return terms_; }

  S coefficient(const Partition& p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? S(0) : it->second;
  }

  void add_term(const Partition& p, const S& coeff) {
    if (scalar_traits<S>::is_zero(coeff)) return;
    if (p.weight() != level_) throw std::invalid_argument("mixed levels in Verma vector");
    auto [it, inserted] = terms_.emplace(p, coeff);
    if (!inserted) {
      it->second += coeff;
      if (scalar_traits<S>::is_zero(it->second)) terms_.erase(it);
    }
  }

  /// this += s * other
  void axpy(const S& s, const VermaVector& other) {
    if (scalar_traits<S>::is_zero(s) || other.is_zero()) return;
    if (is_zero()) level_ = other.level_;
    if (other.level_ != level_) throw std::invalid_argument("mixed levels in Verma vector");
    for (const auto& [p, x] : other.terms_) add_term(p, S(s * x));
  }

  VermaVector& operator+=(const VermaVector& o) {
    axpy(S(1), o);
    return *this;
  }
  VermaVector& operator-=(const VermaVector& o) {
    axpy(S(-1), o);
    return *this;
  }
  VermaVector& operator*=(const S& s) {
    if (scalar_traits<S>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [p, x] : terms_) x *= s;
    return *this;
  }
  friend VermaVector operator+(VermaVector a, const VermaVector& b) { return a += b; }
  friend VermaVector operator-(VermaVector a, const VermaVector& b) { return a -= b; }
  friend VermaVector operator*(const S& s, VermaVector a) { return a *= s; }

  friend bool operator==(const VermaVector& a, const VermaVector& b) {
    if (a.is_zero() && b.is_zero()) return true;
    return a.level_ == b.level_ && a.terms_ == b.terms_;
  }

  /// Coordinates in the enumerate_partitions(level) order.
  std::vector<S> coordinates(const PartitionIndex& idx) const {
    std::vector<S> x(idx.size(), S(0));
    for (const auto& [p, c] : terms_) x[idx.index_of(p)] = c;
    return x;
  }

  static VermaVector from_coordinates(const PartitionIndex& idx, const std::vector<S>& x) {
    VermaVector v(idx.level());
    for (std::size_t i = 0; i < x.size(); ++i) v.add_term(idx[i], x[i]);
    return v;
  }

 private:
  int level_ = 0;
  std::map<Partition, S> terms_;
};

/// Exact or floating Shapovalov form at one level.
template <class S>
struct GramMatrix {
  int level = 0;
  S c{};
  S h{};
  std::vector<Partition> basis;
  Matrix<S> entries;
};

/// Verma module V(c, h). Monomial actions are memoized; a module instance is
/// therefore not safe to share between threads while it is being queried.
template <class S>
class VermaModule {
 public:
  VermaModule(CentralCharge<S> c, LowestWeight<S> h) : c_(std::move(c.value)), h_(std::move(h.value)) {}

  const S& c() const { return c_; }
  const S& h() const { return h_; }

  /// (c/12)(n^3 - n)
  S central_term(int n) const {
    const long n3 = static_cast<long>(n) * n * n - n;
    return S(c_ * S(n3) / S(12));
  }

  /// L_n applied to a single monomial; the zero vector when the level would
  /// drop below zero.
  const VermaVector<S>& act_monomial(int n, const Partition& p) const {
    auto key = std::make_pair(n, p);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    VermaVector<S> result = compute_monomial(n, p);
    return cache_.emplace(std::move(key), std::move(result)).first->second;
  }

  VermaVector<S> act(int n, const VermaVector<S>& v) const {
    VermaVector<S> out(v.level() - n);
    for (const auto& [p, coeff] : v.terms()) out.axpy(coeff, act_monomial(n, p));
    return out;
  }

  /// Applies the word L_{w[0]} L_{w[1]} ... L_{w[last]} (rightmost first).
  VermaVector<S> act_word(const std::vector<int>& word, VermaVector<S> v) const {
    for (auto it = word.rbegin(); it != word.rend(); ++it) v = act(*it, v);
    return v;
  }

  /// Matrix of L_n from level k to level k - n in the monomial bases.
  Matrix<S> mode_matrix(int n, int k) const {
    const PartitionIndex& src = index(k);
    if (k - n < 0) return Matrix<S>(0, src.size());
    const PartitionIndex& dst = index(k - n);
    Matrix<S> m(dst.size(), src.size());
    for (std::size_t j = 0; j < src.size(); ++j)
      for (const auto& [p, coeff] : act_monomial(n, src[j]).terms()) m(dst.index_of(p), j) = coeff;
    return m;
  }

  /// Shapovalov matrix at level k. Entry (lambda, mu) is the Phi-component
  /// of L_{lambda_k} ... L_{lambda_1} applied to the monomial mu.
  GramMatrix<S> gram_matrix(int k) const {
    const PartitionIndex& idx = index(k);
    GramMatrix<S> g;
    g.level = k;
    g.c = c_;
    g.h = h_;
    g.basis = idx.partitions();
    g.entries = Matrix<S>(idx.size(), idx.size());
    const Partition vacuum{};
    for (std::size_t i = 0; i < idx.size(); ++i) {
      std::vector<int> word(idx[i].parts().rbegin(), idx[i].parts().rend());
      for (std::size_t j = 0; j < idx.size(); ++j) {
        VermaVector<S> v = act_word(word, VermaVector<S>(k, idx[j]));
        g.entries(i, j) = v.coefficient(vacuum);
      }
    }
    return g;
  }

  /// Inner product of two vectors of the same level.
  S inner(const VermaVector<S>& a, const VermaVector<S>& b) const {
    if (a.is_zero() || b.is_zero()) return S(0);
    if (a.level() != b.level()) return S(0);
    const PartitionIndex& idx = index(a.level());
    const Matrix<S>& g = cached_gram(a.level());
    const auto x = a.coordinates(idx);
    const auto y = b.coordinates(idx);
    S total(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (scalar_traits<S>::is_zero(x[i])) continue;
      for (std::size_t j = 0; j < y.size(); ++j) total += x[i] * g(i, j) * y[j];
    }
    return total;
  }

  const PartitionIndex& index(int k) const {
    auto it = indices_.find(k);
    if (it == indices_.end()) it = indices_.emplace(k, std::make_unique<PartitionIndex>(k)).first;
    return *it->second;
  }

 private:
  const Matrix<S>& cached_gram(int k) const {
    auto it = grams_.find(k);
    if (it == grams_.end()) it = grams_.emplace(k, gram_matrix(k).entries).first;
    return it->second;
  }

  VermaVector<S> compute_monomial(int n, const Partition& p) const {
    const int level = p.weight();
    VermaVector<S> out(level - n);
    if (level - n < 0) return out;
    if (n == 0) {
      out.add_term(p, S(h_ + S(level)));
      return out;
    }
    if (p.empty()) {
      if (n < 0) out.add_term(Partition({-n}), S(1));
      return out;
    }
    const int a = p.largest();
    if (n < 0 && -n >= a) {
      out.add_term(p.with_leading(-n), S(1));
      return out;
    }
    // L_n L_{-a} T = L_{-a} (L_n T) + (n + a) L_{n-a} T + delta_{n,a} (c/12)(n^3 - n) T
    const Partition tail = p.tail();
    out.axpy(S(1), act(-a, act_monomial(n, tail)));
    if (n + a != 0) out.axpy(S(n + a), act_monomial(n - a, tail));
    if (n == a) out.axpy(central_term(n), VermaVector<S>(tail.weight(), tail));
    return out;
  }

  S c_;
  S h_;
  mutable std::map<std::pair<int, Partition>, VermaVector<S>> cache_;
  mutable std::map<int, std::unique_ptr<PartitionIndex>> indices_;
  mutable std::map<int, Matrix<S>> grams_;
};

/// Rank of a Gram matrix and a basis of its kernel (the null vectors).
template <class S>
struct LevelRank {
  int level = 0;
  std::size_t rank = 0;
  std::vector<VermaVector<S>> null_basis;
  /// Singular-value cutoff used in float mode; 0 for exact rank.
  double tolerance = 0.0;
};

/// Exact rank over the rationals by Gaussian elimination.
inline LevelRank<Rational> level_rank(const VermaModule<Rational>& module, int k) {
  const auto g = module.gram_matrix(k);
  const auto red = reduce_exact(g.entries);
  LevelRank<Rational> out;
  out.level = k;
  out.rank = red.rank;
  const PartitionIndex& idx = module.index(k);
  for (const auto& v : red.kernel) out.null_basis.push_back(VermaVector<Rational>::from_coordinates(idx, v));
  return out;
}

/// Floating rank: singular values at or below tolerance * sigma_max are
/// counted as zero. The kernel is spanned by the matching right singular vectors.
inline LevelRank<double> level_rank(const VermaModule<double>& module, int k, double tolerance = 1e-10) {
  const auto g = module.gram_matrix(k);
  LevelRank<double> out;
  out.level = k;
  out.tolerance = tolerance;
  const Eigen::MatrixXd e = to_eigen(g.entries);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = tolerance * (sv.size() ? std::max(sv(0), 1.0) : 1.0);
  const PartitionIndex& idx = module.index(k);
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      ++out.rank;
      continue;
    }
    std::vector<double> x(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) x[r] = svd.matrixV()(r, i);
    out.null_basis.push_back(VermaVector<double>::from_coordinates(idx, x));
  }
  return out;
}

}  // namespace virbound
