#pragma once

// Smeared stress-energy operators T(f) = sum_n fhat_n L_n on a truncated
// representation, the heat commutator [L_n, e^{-eps L_0}], and the
// identities built from them.

#include "virbound/fields.hpp"
#include "virbound/graded_operator.hpp"
#include "virbound/matrix.hpp"
#include "virbound/truncated_rep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace virbound {

struct TruncationBias {
  int cutoff = 0;
  /// Bound on the ||.||_{3/2} mass of the coefficients beyond the cutoff.
  double discarded = 0.0;
  double tolerance = 0.0;
  bool warn = false;
};

template <class S>
struct SmearedOperator {
  GradedOperator<S> op;
  int cutoff = 0;
  TruncationBias bias;
};

/// T(f) restricted to modes |n| <= cutoff (cutoff <= N, default N).
template <class R>
SmearedOperator<complex_of<R>> smear(const TruncatedRep<R>& rep, const FourierField<complex_of<R>>& f,
                                     int cutoff = -1, double bias_tolerance = 1e-8) {
  using S = complex_of<R>;
  if (cutoff < 0) cutoff = rep.truncation();
  if (cutoff > rep.truncation()) throw std::invalid_argument("smearing cutoff exceeds truncation");
  SmearedOperator<S> out;
  out.cutoff = cutoff;
  out.op = GradedOperator<S>::on(rep);
  for (const auto& [n, a] : f.coefficients())
    if (std::abs(n) <= cutoff) out.op += GradedOperator<S>::mode(rep, n, a);
  out.bias.cutoff = cutoff;
  out.bias.tolerance = bias_tolerance;
  out.bias.discarded = cutoff >= 1 ? norm_three_halves(f, cutoff).tail_bound : 0.0;
  out.bias.warn = out.bias.discarded > bias_tolerance;
  return out;
}

/// ||T(f) Omega||^2 = (c/12) sum_{n=2}^{cutoff} |fhat_{-n}|^2 (n^3 - n).
template <class C>
real_of<C> vacuum_norm(const FourierField<C>& f, const real_of<C>& c, int cutoff) {
  using Real = real_of<C>;
  Real total(0);
  for (int n = 2; n <= cutoff; ++n) {
    const long n3 = static_cast<long>(n) * n * n - n;
    total += scalar_traits<C>::abs2(f.coefficient(-n)) * Real(n3);
  }
  return Real(total * c / Real(12));
}

/// The same quantity from the matrices of the representation.
template <class R>
R vacuum_norm_from_matrices(const TruncatedRep<R>& rep, const FourierField<complex_of<R>>& f, int cutoff = -1) {
  using S = complex_of<R>;
  if (rep.dim(0) != 1) throw std::invalid_argument("need a one-dimensional lowest level");
  const auto t = smear(rep, f, cutoff);
  auto omega = t.op.zero_vector();
  omega[0][0] = S(1);
  const auto v = t.op.apply(omega);
  const S nrm = t.op.inner(v, v);
  if constexpr (is_exact_v<R>)
    return nrm.re;
  else
    return nrm.real();
}

// ---------------------------------------------------------------------------
// Heat commutator.

/// e^{-eps k} - e^{-eps (k+m)} = e^{-eps k} (1 - e^{-eps m}).
inline long double fm_value(long double k, long double m, long double eps) {
  return std::exp(-eps * k) * -std::expm1(-eps * m);
}

struct FmSup {
  double eps_max = 0.0;  // +infinity when k = 0
  double sup_squared = 0.0;
};

/// Maximizer and maximum of f_m(eps)^2 over eps > 0.
inline FmSup fm_sup(double k, int m) {
  if (m < 1 || k < 0) throw std::invalid_argument("need m >= 1 and k >= 0");
  FmSup r;
  if (k == 0) {
    r.eps_max = std::numeric_limits<double>::infinity();
    r.sup_squared = 1.0;
    return r;
  }
  r.eps_max = std::log1p(m / k) / m;
  const double ratio = k / (k + m);
  r.sup_squared = std::pow(ratio, 2 * k / m) * (m / (k + m)) * (m / (k + m));
  return r;
}

/// Brute-force maximum of f_m^2 on a log grid, refined around the best point.
inline FmSup fm_grid_search(double k, int m, int points = 2000, int rounds = 6) {
  double lo = std::log(1e-8), hi = std::log(1e4);
  FmSup best;
  for (int round = 0; round < rounds; ++round) {
    int best_i = 0;
    double best_v = -1;
    for (int i = 0; i < points; ++i) {
      const double e = std::exp(lo + (hi - lo) * i / (points - 1));
      const double v = static_cast<double>(fm_value(k, m, e));
      if (v * v > best_v) {
        best_v = v * v;
        best_i = i;
        best.eps_max = e;
      }
    }
    best.sup_squared = best_v;
    const double step = (hi - lo) / (points - 1);
    const double center = lo + step * best_i;
    lo = center - step;
    hi = center + step;
  }
  return best;
}

/// Scalar by which [L_n, e^{-eps L_0}] multiplies L_n on a source vector of
/// L_0-eigenvalue K: e^{-eps K} - e^{-eps (K - n)}, evaluated without cancellation.
inline long double heat_factor(long double K, int n, long double eps) {
  if (n == 0) return 0.0L;
  if (n < 0) return fm_value(K, -n, eps);
  return -fm_value(K - n, n, eps);
}

struct HeatLevel {
  int level = 0;
  long double factor = 0;
  double block_norm = 0.0;
  /// max |explicit commutator - factor * L_n| / max |factor * L_n|
  double relative_residual = 0.0;
};

struct HeatCommutator {
  int n = 0;
  double eps = 0.0;
  std::vector<HeatLevel> levels;
  double norm = 0.0;
  double max_relative_residual = 0.0;
};

/// R_{n,eps} = [L_n, e^{-eps L_0}] level by level. The explicit commutator
/// L_n E_k - E_{k-n} L_n is formed in long double and compared with the
/// factorized form.
inline HeatCommutator heat_commutator(const TruncatedRep<double>& rep, int n, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  if (std::abs(n) > rep.truncation()) throw std::invalid_argument("mode exceeds truncation");
  HeatCommutator hc;
  hc.n = n;
  hc.eps = eps;
  const long double h = rep.h();
  for (int k = 0; k <= rep.truncation(); ++k) {
    const int t = k - n;
    if (t < 0 || t > rep.truncation() || rep.dim(k) == 0 || rep.dim(t) == 0) continue;
    const auto& m = rep.block(n, k);
    HeatLevel lv;
    lv.level = k;
    lv.factor = heat_factor(h + k, n, eps);
    lv.block_norm = spectral_norm(m);
    const long double e_src = std::exp(-static_cast<long double>(eps) * (h + k));
    const long double e_tgt = std::exp(-static_cast<long double>(eps) * (h + t));
    long double worst = 0, scale = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) {
        const long double x = m(i, j);
        const long double explicit_entry = x * e_src - e_tgt * x;
        const long double factored = lv.factor * x;
        worst = std::max(worst, std::fabs(explicit_entry - factored));
        scale = std::max(scale, std::fabs(factored));
      }
    lv.relative_residual = scale > 0 ? static_cast<double>(worst / scale) : static_cast<double>(worst);
    hc.norm = std::max(hc.norm, static_cast<double>(std::fabs(lv.factor)) * lv.block_norm);
    hc.max_relative_residual = std::max(hc.max_relative_residual, lv.relative_residual);
    hc.levels.push_back(lv);
  }
  return hc;
}

// ---------------------------------------------------------------------------
// Identities.

/// Largest entry of T(f) - T(f - g_p) - T(g_p) for the piecewise field at the
/// given cutoff; exactly zero because the supports of f and g_p are disjoint.
inline double decomposition_check(const TruncatedRep<double>& rep, Corner p, int cutoff = -1) {
  if (cutoff < 0) cutoff = rep.truncation();
  const Field f = PiecewiseMobiusField::truncated(cutoff);
  const Field g = PiecewiseMobiusField::piece(p.index);
  auto residual = smear(rep, f, cutoff).op;
  residual -= smear(rep, f - g, cutoff).op;
  residual -= smear(rep, g, cutoff).op;
  double worst = 0.0;
  for (const auto& [key, m] : residual.blocks()) worst = std::max(worst, m.max_abs());
  return worst;
}

/// Largest |f - g_p| over `samples` points inside the arc from p to ip.
inline double arc_difference(Corner p, int samples = 1000) {
  const PiecewiseMobiusField f;
  const Field g = PiecewiseMobiusField::piece(p.index);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = p.angle() + (std::numbers::pi / 2) * (s + 0.5) / samples;
    worst = std::max(worst, std::abs(f.evaluate(t) - evaluate_series(g, t).real()));
  }
  return worst;
}

template <class R>
struct VacuumRecursionReport {
  int level2_dim = 0;
  /// L_{-2} Omega is nonzero (so it spans level 2 when level2_dim == 1).
  bool level2_spanned = false;
  /// (n, holds) for L_{-1} L_{-n} Omega = (n-1) L_{-(n+1)} Omega
  std::vector<std::pair<int, bool>> induction;
  double max_induction_residual = 0.0;

  bool all_induction() const {
    for (const auto& [n, ok] : induction)
      if (!ok) return false;
    return true;
  }
};

namespace detail {
template <class R>
std::vector<R> raise_vacuum(const TruncatedRep<R>& rep, int n) {
  return rep.block(-n, 0).apply({R(1)});
}

template <class R>
double vector_distance(const std::vector<R>& a, const std::vector<R>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, scalar_traits<R>::magnitude(R(a[i] - b[i])));
  return worst;
}
}  // namespace detail

/// On a vacuum representation: level 2 is spanned by L_{-2} Omega, and
/// L_{-1} L_{-n} Omega = (n-1) L_{-(n+1)} Omega for 2 <= n < N. Exact comparison in
/// rational mode, `tolerance` in float mode.
template <class R>
VacuumRecursionReport<R> vacuum_recursion_checks(const TruncatedRep<R>& rep, double tolerance = 1e-10) {
  if (rep.truncation() < 3) throw std::invalid_argument("need N >= 3");
  if (!scalar_traits<R>::is_zero(rep.h())) throw std::invalid_argument("need the vacuum module (h = 0)");
  VacuumRecursionReport<R> out;
  out.level2_dim = rep.dim(2);
  const auto l2 = detail::raise_vacuum(rep, 2);
  out.level2_spanned = std::any_of(l2.begin(), l2.end(), [](const R& x) { return !scalar_traits<R>::is_zero(x); });
  for (int n = 2; n <= rep.truncation() - 1; ++n) {
    const auto lhs = rep.block(-1, n).apply(detail::raise_vacuum(rep, n));
    auto rhs = detail::raise_vacuum(rep, n + 1);
    for (auto& x : rhs) x *= R(n - 1);
    const double dist = detail::vector_distance(lhs, rhs);
    out.max_induction_residual = std::max(out.max_induction_residual, dist);
    const bool ok = is_exact_v<R> ? (lhs == rhs) : dist <= tolerance;
    out.induction.emplace_back(n, ok);
  }
  return out;
}

template <class R>
struct PropagationReport {
  bool same_mobius_blocks = false;
  bool proportional_at_level2 = false;
  R zeta{};
  /// largest deviation of Ltilde_{-n} Omega from zeta L_{-n} Omega, n <= N
  double max_deviation = 0.0;
  bool holds = false;
};

/// Proportionality propagation: `other` shares the L_{-1}, L_0, L_1 blocks of `rep` and satisfies
/// Ltilde_{-2} Omega = zeta L_{-2} Omega. Walks the recursion
/// Ltilde_{-(n+1)} Omega = L_{-1} Ltilde_{-n} Omega / (n-1) and compares each
/// step with zeta L_{-(n+1)} Omega and with other's own matrices.
template <class R>
PropagationReport<R> propagate_proportionality(const TruncatedRep<R>& rep, const TruncatedRep<R>& other,
                                               double tolerance = 1e-10) {
  PropagationReport<R> out;
  const int N = rep.truncation();
  if (other.truncation() != N || other.level_dims() != rep.level_dims())
    throw std::invalid_argument("representations must share the truncation and level dimensions");
  auto close = [&](const Matrix<R>& a, const Matrix<R>& b) {
    if constexpr (is_exact_v<R>)
      return a == b;
    else
      return (a - b).max_abs() <= tolerance;
  };
  out.same_mobius_blocks = true;
  for (const auto& [key, m] : rep.blocks())
    if (std::abs(key.first) <= 1 && !close(m, other.block(key.first, key.second))) out.same_mobius_blocks = false;

  const auto base = detail::raise_vacuum(rep, 2);
  const auto tilde = detail::raise_vacuum(other, 2);
  std::size_t pivot = 0;
  while (pivot < base.size() && scalar_traits<R>::is_zero(base[pivot])) ++pivot;
  if (pivot == base.size()) return out;
  out.zeta = R(tilde[pivot] / base[pivot]);
  auto scaled = base;
  for (auto& x : scaled) x *= out.zeta;
  out.proportional_at_level2 = detail::vector_distance(scaled, tilde) <= (is_exact_v<R> ? 0.0 : tolerance);
  if (!out.same_mobius_blocks || !out.proportional_at_level2) return out;

  std::vector<R> current = tilde;
  for (int n = 2; n < N; ++n) {
    std::vector<R> next = rep.block(-1, n).apply(current);
    for (auto& x : next) x = R(x / R(n - 1));
    auto expected = detail::raise_vacuum(rep, n + 1);
    for (auto& x : expected) x *= out.zeta;
    const auto own = detail::raise_vacuum(other, n + 1);
    out.max_deviation = std::max({out.max_deviation, detail::vector_distance(next, expected),
                                  detail::vector_distance(own, expected)});
    current = std::move(next);
  }
  out.holds = is_exact_v<R> ? out.max_deviation == 0.0 : out.max_deviation <= tolerance;
  return out;
}

struct EnergyBoundCheck {
  int samples = 0;
  /// max over samples of ||T(f) v|| / (r ||f||_{3/2} ||(1 + L_0) v||)
  double worst_ratio = 0.0;
  bool pass = false;
};

/// ||T(f) v|| <= r ||f||_{3/2} ||(1 + L_0) v|| for random v supported on the
/// safe levels of T(f); coordinates are independent standard normals.
inline EnergyBoundCheck energy_bound_check(const TruncatedRep<double>& rep, const Field& f, double r,
                                           int samples, std::uint64_t seed, int cutoff = -1) {
  using C = std::complex<double>;
  if (cutoff < 0) cutoff = rep.truncation();
  const auto t = smear(rep, f, cutoff);
  double norm = 0.0;
  for (const auto& [n, a] : f.coefficients())
    if (std::abs(n) <= cutoff) norm += std::abs(a) * mode_weight(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  EnergyBoundCheck out;
  out.samples = samples;
  const auto safe = t.op.safe_levels();
  for (int s = 0; s < samples; ++s) {
    auto v = t.op.zero_vector();
    for (int k : safe)
      for (auto& x : v[k]) x = C(normal(rng), 0.0);
    auto w = v;
    for (int k = 0; k <= rep.truncation(); ++k)
      for (auto& x : w[k]) x *= (1.0 + rep.h() + k);
    const double lhs = std::sqrt(std::abs(t.op.inner(t.op.apply(v), t.op.apply(v))));
    const double rhs = r * norm * std::sqrt(std::abs(t.op.inner(w, w)));
    if (rhs > 0) out.worst_ratio = std::max(out.worst_ratio, lhs / rhs);
  }
  out.pass = out.worst_ratio <= 1.0;
  return out;
}

}  // namespace virbound
