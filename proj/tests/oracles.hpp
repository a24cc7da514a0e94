#pragma once

// Independent reference computations used by the tests. None of these call
// into the library.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

/// p(0..n) from the generating function prod 1/(1 - q^j).
inline std::vector<std::int64_t> partition_counts(int n) {
  std::vector<std::int64_t> p(n + 1, 0);
  p[0] = 1;
  for (int part = 1; part <= n; ++part)
    for (int k = part; k <= n; ++k) p[k] += p[k - part];
  return p;
}

/// Weakly decreasing sequences summing to n, counted by exhaustive search.
inline std::int64_t brute_force_count(int n, int max_part) {
  if (n == 0) return 1;
  std::int64_t total = 0;
  for (int first = std::min(n, max_part); first >= 1; --first) total += brute_force_count(n - first, first);
  return total;
}

/// Level dimensions of the irreducible minimal-model module (p, p') with
/// Kac labels (r, s), from the alternating-sum character formula
/// chi = (1/prod(1-q^n)) sum_k (q^{A_k} - q^{B_k}).
inline std::vector<std::int64_t> minimal_model_dims(int p, int pp, int r, int s, int n) {
  std::vector<std::int64_t> numerator(n + 1, 0);
  const long four = 4L * p * pp;
  const long a0 = static_cast<long>(p) * r - static_cast<long>(pp) * s;
  for (long k = -20; k <= 20; ++k) {
    const long a = 2L * p * pp * k + a0;
    const long b = 2L * p * pp * k + static_cast<long>(p) * r + static_cast<long>(pp) * s;
    // exponents relative to the lowest weight; both differences are divisible by 4 p p'
    const long ea = (a * a - a0 * a0) / four;
    const long eb = (b * b - a0 * a0) / four;
    if (ea >= 0 && ea <= n) numerator[ea] += 1;
    if (eb >= 0 && eb <= n) numerator[eb] -= 1;
  }
  const auto part = partition_counts(n);
  std::vector<std::int64_t> dims(n + 1, 0);
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= k; ++j) dims[k] += numerator[j] * part[k - j];
  return dims;
}

/// Level-2 Gram determinant of the Verma module, expanded by hand:
/// (4h + c/2)(8h^2 + 4h) - 36 h^2.
inline double level2_determinant(double c, double h) { return (4 * h + c / 2) * (8 * h * h + 4 * h) - 36 * h * h; }

/// sup over eps > 0 of (e^{-eps k} - e^{-eps (k+m)})^2 by calculus:
/// eps* = log(1 + m/k) / m.
inline double fm_sup_squared(double k, double m) {
  if (k == 0) return 1.0;
  const double e = std::log(1 + m / k) / m;
  const double v = std::exp(-e * k) - std::exp(-e * (k + m));
  return v * v;
}

}  // namespace oracle
