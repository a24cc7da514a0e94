#pragma once

// Lowest-weight Virasoro representations cut at energy level N.
//
// Level k of the irreducible quotient is spanned by L_{-1}(level k-1) and
// L_{-2}(level k-2), since L_{-1} and L_{-2} generate all L_{-n}. The builder
// walks up the levels: for each spanning vector w = L_{-j} u it computes
// L_n w (n >= 1) by one commutation,
//   L_n L_{-j} u = L_{-j} L_n u + (n + j) L_{n-j} u + delta_{n,j} (c/12)(n^3 - n) u,
// where every term on the right only involves levels below k. The Gram
// matrix of the spanning set follows from <L_{-j} u, w> = <u, L_j w>, and
// orthogonalizing it drops the null vectors.
//
// Exact mode (Rational) keeps an orthogonal basis with rational squared
// norms ("metric"); float mode (double) keeps an orthonormal basis obtained
// by spectral decomposition. Raising blocks are the metric adjoints of the
// lowering blocks.

#include "virbound/matrix.hpp"
#include "virbound/scalar.hpp"
#include "virbound/verma.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace virbound {

struct NonUnitary : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class R>
class TruncatedRep {
 public:
  TruncatedRep() = default;
  TruncatedRep(R c, R h, int n_max) : c_(std::move(c)), h_(std::move(h)), n_max_(n_max) {}

  int truncation() const { return n_max_; }
  const R& c() const { return c_; }
  const R& h() const { return h_; }

  /// L_0 eigenvalue on level k.
  R energy(int k) const { return R(h_ + R(k)); }

  const std::vector<int>& level_dims() const { return dims_; }
  int dim(int k) const { return (k < 0 || k > n_max_) ? 0 : dims_[k]; }
  std::size_t total_dim() const {
    std::size_t t = 0;
    for (int d : dims_) t += static_cast<std::size_t>(d);
    return t;
  }

  /// Squared norms of the level-k basis vectors (all 1 in float mode unless
  /// the rep was built through an indefinite form).
  const std::vector<R>& metric(int k) const { return metric_.at(k); }

  bool has_block(int n, int k) const { return blocks_.count({n, k}) != 0; }

  /// Matrix of L_n from level k to level k - n; throws when either level is
  /// outside [0, N] or |n| exceeds the stored mode range.
  const Matrix<R>& block(int n, int k) const {
    auto it = blocks_.find({n, k});
    if (it == blocks_.end())
      throw std::out_of_range("no block for L_" + std::to_string(n) + " on level " + std::to_string(k));
    return it->second;
  }

  const std::map<std::pair<int, int>, Matrix<R>>& blocks() const { return blocks_; }

  /// Monomial expansion of the level-k basis (columns), when requested at build time.
  const std::optional<std::vector<Matrix<R>>>& monomial_basis() const { return monomial_basis_; }

  /// Metric inner product of two level-k coordinate vectors (real scalars).
  R inner(int k, const std::vector<R>& x, const std::vector<R>& y) const {
    R total(0);
    const auto& d = metric(k);
    for (std::size_t i = 0; i < x.size(); ++i) total += x[i] * d[i] * y[i];
    return total;
  }

  // Assembly interface used by the builders and by tensor_rep / deserialization.
  void set_level(int k, int dim, std::vector<R> metric) {
    if (static_cast<int>(dims_.size()) <= k) {
      dims_.resize(k + 1, 0);
      metric_.resize(k + 1);
    }
    dims_[k] = dim;
    metric_[k] = std::move(metric);
  }
  void set_block(int n, int k, Matrix<R> m) { blocks_[{n, k}] = std::move(m); }
  void set_monomial_basis(std::vector<Matrix<R>> b) { monomial_basis_ = std::move(b); }

 private:
  R c_{};
  R h_{};
  int n_max_ = 0;
  std::vector<int> dims_;
  std::vector<std::vector<R>> metric_;
  std::map<std::pair<int, int>, Matrix<R>> blocks_;
  std::optional<std::vector<Matrix<R>>> monomial_basis_;
};

struct RepOptions {
  /// Null-space cutoff for float-mode spectral orthonormalization.
  double spectral_cutoff = 1e-10;
  /// Also record each basis vector as a combination of Verma monomials (exact mode).
  bool keep_monomial_basis = false;
  /// Keep building through an indefinite form; the metric then carries signs.
  bool allow_indefinite = false;
};

namespace detail {

template <class R>
Orthogonalization<R> orthogonalize(const Matrix<R>& gram, const RepOptions& opts) {
  if constexpr (is_exact_v<R>) {
    return orthogonalize_exact(gram, opts.allow_indefinite);
  } else {
    return orthonormalize_spectral(gram, opts.spectral_cutoff, opts.allow_indefinite);
  }
}

/// Metric adjoint of a lowering block: level k -> k-n becomes k-n -> k.
template <class R>
Matrix<R> metric_adjoint(const Matrix<R>& lower, const std::vector<R>& src_metric,
                         const std::vector<R>& dst_metric) {
  Matrix<R> up(lower.cols(), lower.rows());
  for (std::size_t i = 0; i < lower.rows(); ++i)
    for (std::size_t j = 0; j < lower.cols(); ++j) up(j, i) = lower(i, j) * dst_metric[i] / src_metric[j];
  return up;
}

template <class R>
Matrix<R> scaled_identity(std::size_t n, const R& s) {
  Matrix<R> m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = s;
  return m;
}

}  // namespace detail

/// Builds the truncated irreducible lowest-weight representation with
/// central charge c and lowest weight h, levels 0..N, all modes |n| <= N.
/// Throws NonUnitary when a Gram matrix on the way is indefinite.
template <class R>
TruncatedRep<R> build_rep(CentralCharge<R> cc, LowestWeight<R> hh, int n_max, const RepOptions& opts = {}) {
  if (n_max < 2) throw std::invalid_argument("truncation level must be at least 2");
  const R c = cc.value;
  const R h = hh.value;
  TruncatedRep<R> rep(c, h, n_max);
  auto central = [&](int n) {
    const long n3 = static_cast<long>(n) * n * n - n;
    return R(c * R(n3) / R(12));
  };

  std::optional<VermaModule<Rational>> module;
  std::vector<Matrix<R>> monomials;
  if constexpr (is_exact_v<R>) {
    if (opts.keep_monomial_basis) module.emplace(CentralCharge<Rational>(c), LowestWeight<Rational>(h));
  }

  rep.set_level(0, 1, {R(1)});
  rep.set_block(0, 0, detail::scaled_identity<R>(1, h));
  if (module) monomials.push_back(Matrix<R>::identity(1));

  for (int k = 1; k <= n_max; ++k) {
    // Spanning set: (j, i) for w = L_{-j} u_i^{(k-j)}.
    std::vector<std::pair<int, std::size_t>> span;
    for (int j = 1; j <= 2; ++j)
      if (k - j >= 0)
        for (int i = 0; i < rep.dim(k - j); ++i) span.emplace_back(j, static_cast<std::size_t>(i));
    const std::size_t s = span.size();

    // lowered[n] : coordinates of L_n w at level k - n, for n = 1..k.
    std::vector<Matrix<R>> lowered(k + 1);
    for (int n = 1; n <= k; ++n) {
      Matrix<R> y(rep.dim(k - n), s);
      for (std::size_t col = 0; col < s; ++col) {
        const auto [j, i] = span[col];
        const int src = k - j;  // level of u
        std::vector<R> e(rep.dim(src), R(0));
        e[i] = R(1);
        std::vector<R> acc(rep.dim(k - n), R(0));
        // L_{-j} L_n u
        if (src - n >= 0) {
          const auto lnu = rep.block(n, src).apply(e);
          const auto term = rep.block(-j, src - n).apply(lnu);
          for (std::size_t r = 0; r < acc.size(); ++r) acc[r] += term[r];
        }
        // (n + j) L_{n-j} u
        {
          const auto term = rep.block(n - j, src).apply(e);
          const R f(n + j);
          for (std::size_t r = 0; r < acc.size(); ++r) acc[r] += f * term[r];
        }
        if (n == j) acc[i] += central(n);
        for (std::size_t r = 0; r < acc.size(); ++r) y(r, col) = acc[r];
      }
      lowered[n] = std::move(y);
    }

    // Gram of the spanning set: <L_{-j} u_i, w> = metric_i * (L_j w)_i.
    Matrix<R> gram(s, s);
    for (std::size_t row = 0; row < s; ++row) {
      const auto [j, i] = span[row];
      const R& d = rep.metric(k - j)[i];
      for (std::size_t col = 0; col < s; ++col) gram(row, col) = d * lowered[j](i, col);
    }
    if constexpr (is_exact_v<R>) {
      if (!(gram == gram.transpose()))
        throw std::logic_error("spanning-set Gram matrix not symmetric at level " + std::to_string(k));
    } else {
      gram = (gram + gram.transpose()) * 0.5;
    }

    Orthogonalization<R> orth;
    try {
      orth = detail::orthogonalize(gram, opts);
    } catch (const IndefiniteForm& e) {
      throw NonUnitary("indefinite Gram matrix at level " + std::to_string(k) + ": " + e.what());
    }
    const auto dk = static_cast<int>(orth.norms.size());
    rep.set_level(k, dk, orth.norms);

    for (int n = 1; n <= k; ++n) {
      Matrix<R> lower = lowered[n] * orth.combination;
      Matrix<R> upper = detail::metric_adjoint(lower, rep.metric(k), rep.metric(k - n));
      rep.set_block(n, k, std::move(lower));
      rep.set_block(-n, k - n, std::move(upper));
    }
    rep.set_block(0, k, detail::scaled_identity<R>(dk, rep.energy(k)));

    if constexpr (is_exact_v<R>) {
      if (module) {
        // Basis vectors as Verma vectors: sum over spanning set of coefficient * L_{-j} u.
        const PartitionIndex& idx = module->index(k);
        Matrix<R> basis(idx.size(), dk);
        for (std::size_t col = 0; col < s; ++col) {
          const auto [j, i] = span[col];
          const PartitionIndex& sidx = module->index(k - j);
          const auto u = VermaVector<Rational>::from_coordinates(sidx, monomials[k - j].column(i));
          const auto w = module->act(-j, u).coordinates(idx);
          for (int b = 0; b < dk; ++b) {
            const R& coeff = orth.combination(col, b);
            if (sgn(coeff) == 0) continue;
            for (std::size_t r = 0; r < idx.size(); ++r) basis(r, b) += coeff * w[r];
          }
        }
        monomials.push_back(std::move(basis));
      }
    }
  }

  if (module) rep.set_monomial_basis(std::move(monomials));
  return rep;
}

/// True when every basis vector has positive norm.
template <class R>
bool is_positive(const TruncatedRep<R>& rep) {
  for (int k = 0; k <= rep.truncation(); ++k)
    for (const auto& d : rep.metric(k))
      if (!(d > 0)) return false;
  return true;
}

/// Float copy of an exact representation in the orthonormal basis
/// e_i = u_i / sqrt(metric_i). Only square roots are inexact.
inline TruncatedRep<double> normalize(const TruncatedRep<Rational>& exact) {
  if (!is_positive(exact)) throw NonUnitary("cannot normalize an indefinite representation");
  TruncatedRep<double> out(exact.c().get_d(), exact.h().get_d(), exact.truncation());
  for (int k = 0; k <= exact.truncation(); ++k) out.set_level(k, exact.dim(k), std::vector<double>(exact.dim(k), 1.0));
  for (const auto& [key, m] : exact.blocks()) {
    const auto [n, k] = key;
    const auto& ds = exact.metric(k);
    const auto& dt = exact.metric(k - n);
    Matrix<double> f(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (sgn(m(i, j)) == 0) continue;
        const Rational sq = m(i, j) * m(i, j) * dt[i] / ds[j];
        f(i, j) = (sgn(m(i, j)) > 0 ? 1.0 : -1.0) * std::sqrt(sq.get_d());
      }
    out.set_block(n, k, std::move(f));
  }
  return out;
}

/// Guard for operator words on a truncated representation. The word
/// L_{w[0]} ... L_{w[last]} acts rightmost first; a source level is admissible
/// when every intermediate level stays inside [0, N].
class SafeWindow {
 public:
  SafeWindow(int n_max, std::vector<int> word) : n_max_(n_max), word_(std::move(word)) {}

  bool admissible(int k) const {
    if (k < 0 || k > n_max_) return false;
    int level = k;
    for (auto it = word_.rbegin(); it != word_.rend(); ++it) {
      level -= *it;
      if (level < 0 || level > n_max_) return false;
    }
    return true;
  }

  std::vector<int> levels() const {
    std::vector<int> out;
    for (int k = 0; k <= n_max_; ++k)
      if (admissible(k)) out.push_back(k);
    return out;
  }

  const std::vector<int>& word() const { return word_; }

 private:
  int n_max_;
  std::vector<int> word_;
};

/// Matrix of a word on a source level, or nullopt when the level is not admissible.
template <class R>
std::optional<Matrix<R>> word_block(const TruncatedRep<R>& rep, const std::vector<int>& word, int k) {
  if (!SafeWindow(rep.truncation(), word).admissible(k)) return std::nullopt;
  Matrix<R> acc = Matrix<R>::identity(rep.dim(k));
  int level = k;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    acc = rep.block(*it, level) * acc;
    level -= *it;
  }
  return acc;
}

struct RelationCheck {
  int m = 0;
  int n = 0;
  int level = 0;
  double residual = 0.0;
  bool exact_zero = false;
};

struct RelationReport {
  std::vector<RelationCheck> checks;
  double max_residual = 0.0;
  bool all_exact_zero = true;
  std::size_t windows_checked() const { return checks.size(); }
};

/// Residual of [L_m, L_n] - (m - n) L_{m+n} - (c/d)(m^3 - m) delta_{m+n,0}
/// on every safe window with |m|, |n| <= max_mode. d = 12 for the Virasoro
/// algebra; other values exist only to exercise the checker.
template <class R>
RelationReport check_virasoro_relations(const TruncatedRep<R>& rep, int max_mode, int central_denominator = 12) {
  RelationReport report;
  const int N = rep.truncation();
  for (int m = -max_mode; m <= max_mode; ++m)
    for (int n = -max_mode; n <= max_mode; ++n) {
      if (std::abs(m + n) > N) continue;
      for (int k = 0; k <= N; ++k) {
        auto mn = word_block(rep, {m, n}, k);
        auto nm = word_block(rep, {n, m}, k);
        auto single = word_block(rep, {m + n}, k);
        if (!mn || !nm || !single) continue;
        Matrix<R> res = *mn - *nm - (*single) * R(m - n);
        if (m + n == 0) {
          const long m3 = static_cast<long>(m) * m * m - m;
          const R z = R(rep.c() * R(m3) / R(central_denominator));
          for (std::size_t i = 0; i < res.rows(); ++i) res(i, i) -= z;
        }
        RelationCheck chk{m, n, k, res.max_abs(), res.is_zero()};
        report.max_residual = std::max(report.max_residual, chk.residual);
        report.all_exact_zero = report.all_exact_zero && chk.exact_zero;
        report.checks.push_back(chk);
      }
    }
  return report;
}

/// max over blocks of |L_{-n} - metric adjoint of L_n| (0 for a correct rep).
template <class R>
double hermiticity_residual(const TruncatedRep<R>& rep) {
  double worst = 0.0;
  for (const auto& [key, lower] : rep.blocks()) {
    const auto [n, k] = key;
    if (n <= 0) continue;
    const auto& upper = rep.block(-n, k - n);
    for (std::size_t i = 0; i < lower.rows(); ++i)
      for (std::size_t j = 0; j < lower.cols(); ++j) {
        // <e_i, L_n e_j> = <L_{-n} e_i, e_j>
        const R lhs = R(rep.metric(k - n)[i] * lower(i, j));
        const R rhs = R(upper(j, i) * rep.metric(k)[j]);
        worst = std::max(worst, scalar_traits<R>::magnitude(R(lhs - rhs)));
      }
  }
  return worst;
}

/// 2 (<Omega, [L_2, L_{-2}] Omega> / <Omega, Omega> - 4h), using the level-0 vector.
template <class R>
R measure_central_charge(const TruncatedRep<R>& rep) {
  if (rep.truncation() < 2 || rep.dim(0) != 1) throw std::invalid_argument("need N >= 2 and a one-dimensional level 0");
  const std::vector<R> omega{R(1)};
  const auto up = rep.block(-2, 0).apply(omega);
  const auto back = rep.block(2, 2).apply(up);
  // L_2 Omega = 0 (no level -2), so the commutator reduces to L_2 L_{-2}.
  const R expectation = R(rep.inner(0, omega, back) / rep.inner(0, omega, omega));
  return R(R(2) * (expectation - R(4) * rep.h()));
}

/// Tensor product a (x) b with L_n = L_n (x) 1 + 1 (x) L_n, cut at total level N.
/// Level K has basis pairs (ka, i; kb, j), ordered by ka then i then j.
template <class R>
TruncatedRep<R> tensor_rep(const TruncatedRep<R>& a, const TruncatedRep<R>& b, int n_max,
                           std::size_t dimension_cap = 20000) {
  if (a.truncation() < n_max || b.truncation() < n_max)
    throw std::invalid_argument("tensor factors must be truncated at least at N");
  if (n_max < 2) throw std::invalid_argument("truncation level must be at least 2");

  struct Slot {
    int ka, kb;
    std::size_t offset;
  };
  std::vector<std::vector<Slot>> slots(n_max + 1);
  std::size_t total = 0;
  TruncatedRep<R> out(R(a.c() + b.c()), R(a.h() + b.h()), n_max);
  for (int K = 0; K <= n_max; ++K) {
    std::size_t off = 0;
    std::vector<R> metric;
    for (int ka = 0; ka <= K; ++ka) {
      const int kb = K - ka;
      slots[K].push_back({ka, kb, off});
      for (int i = 0; i < a.dim(ka); ++i)
        for (int j = 0; j < b.dim(kb); ++j) metric.push_back(R(a.metric(ka)[i] * b.metric(kb)[j]));
      off += static_cast<std::size_t>(a.dim(ka)) * b.dim(kb);
    }
    total += off;
    if (total > dimension_cap)
      throw std::length_error("tensor product dimension exceeds cap " + std::to_string(dimension_cap));
    out.set_level(K, static_cast<int>(off), std::move(metric));
  }

  auto find_slot = [&](int K, int ka) -> const Slot& { return slots[K][ka]; };
  for (int n = -n_max; n <= n_max; ++n)
    for (int K = 0; K <= n_max; ++K) {
      const int T = K - n;
      if (T < 0 || T > n_max) continue;
      Matrix<R> m(out.dim(T), out.dim(K));
      for (const Slot& s : slots[K]) {
        const int db = b.dim(s.kb);
        // L_n (x) 1
        if (s.ka - n >= 0) {
          const auto& blk = a.block(n, s.ka);
          const Slot& t = find_slot(T, s.ka - n);
          for (std::size_t r = 0; r < blk.rows(); ++r)
            for (std::size_t c = 0; c < blk.cols(); ++c) {
              if (scalar_traits<R>::is_zero(blk(r, c))) continue;
              for (int j = 0; j < db; ++j) m(t.offset + r * db + j, s.offset + c * db + j) += blk(r, c);
            }
        }
        // 1 (x) L_n
        if (s.kb - n >= 0) {
          const auto& blk = b.block(n, s.kb);
          const Slot& t = find_slot(T, s.ka);
          const std::size_t db_t = blk.rows();
          for (int i = 0; i < a.dim(s.ka); ++i)
            for (std::size_t r = 0; r < blk.rows(); ++r)
              for (std::size_t c = 0; c < blk.cols(); ++c) {
                if (scalar_traits<R>::is_zero(blk(r, c))) continue;
                m(t.offset + i * db_t + r, s.offset + i * db + c) += blk(r, c);
              }
        }
      }
      out.set_block(n, K, std::move(m));
    }
  return out;
}

}  // namespace virbound
