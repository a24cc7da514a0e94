#pragma once

// Empirical constants for the energy bounds:
//   r^2 >= ||L_n v_k||^2 / ((K^2 + K n^2 + |n|^3) ||v_k||^2),  K = h + k
//   q   >= ||[L_n, e^{-eps L_0}]||^2 / |n|^3
//   M   >= |fhat_n| |n|^3
// and the Fourier-multiplier mollifier error. Reports keep every cell so the
// maximum can be traced back to its witness.

#include "virbound/fields.hpp"
#include "virbound/matrix.hpp"
#include "virbound/smear.hpp"
#include "virbound/truncated_rep.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace virbound {

struct BoundCell {
  int k = 0;
  int n = 0;
  std::optional<double> eps;
  double value = 0.0;
  bool skipped = false;
  std::string note;
};

struct BoundReport {
  std::string experiment;
  std::map<std::string, std::string> parameters;
  double constant = 0.0;
  std::optional<std::size_t> witness;
  std::vector<BoundCell> cells;
  double tolerance = 0.0;
  bool pass = true;
  std::vector<std::string> notes;

  const BoundCell* witness_cell() const { return witness ? &cells[*witness] : nullptr; }

  void add(BoundCell cell) {
    if (!cell.skipped && (!witness || cell.value > constant)) {
      constant = cell.value;
      witness = cells.size();
    }
    cells.push_back(std::move(cell));
  }
};

/// Fixed-precision decimal string used in every report.
inline std::string decimal(double x, int precision = 17) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

inline constexpr int report_precision = 17;

/// Squared ratio for one (k, n) cell of the r estimate. Shared with the
/// witness re-evaluation so both go through identical arithmetic.
inline double r_cell_value(const TruncatedRep<double>& rep, int n, int k) {
  const double K = rep.h() + k;
  const double an = std::abs(static_cast<double>(n));
  const double denom = K * K + K * an * an + an * an * an;
  const double s = spectral_norm(rep.block(n, k));
  return s * s / denom;
}

/// r^2 estimate over every level k <= N and mode |n| <= N whose block exists.
/// The (K = 0, n = 0) cell has a zero denominator and is skipped.
inline BoundReport estimate_r(const TruncatedRep<double>& rep) {
  BoundReport r;
  r.experiment = "estimate_r";
  r.parameters = {{"c", decimal(rep.c())}, {"h", decimal(rep.h())}, {"N", std::to_string(rep.truncation())}};
  const int N = rep.truncation();
  for (int k = 0; k <= N; ++k)
    for (int n = -N; n <= N; ++n) {
      const int t = k - n;
      if (t < 0 || t > N) continue;
      BoundCell cell{k, n, std::nullopt, 0.0, false, ""};
      const double K = rep.h() + k;
      if (rep.dim(k) == 0) {
        cell.skipped = true;
        cell.note = "empty level";
      } else if (K == 0 && n == 0) {
        cell.skipped = true;
        cell.note = "zero denominator";
      } else if (rep.dim(t) == 0) {
        cell.value = 0.0;
        cell.note = "empty target";
      } else {
        cell.value = r_cell_value(rep, n, k);
      }
      r.add(cell);
    }
  r.notes.push_back("constant is r^2; r = " + decimal(std::sqrt(r.constant)));
  return r;
}

/// Default grid: `points` log-spaced values in [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int points) {
  if (points < 1 || !(lo > 0) || !(hi >= lo)) throw std::invalid_argument("bad grid specification");
  std::vector<double> g;
  for (int i = 0; i < points; ++i)
    g.push_back(points == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1)));
  return g;
}

inline double q_cell_value(double sigma, double K, int n, double eps) {
  const double f = static_cast<double>(std::fabs(heat_factor(K, n, eps)));
  const double an = std::abs(static_cast<double>(n));
  return (f * sigma) * (f * sigma) / (an * an * an);
}

inline double q_cell_value(const TruncatedRep<double>& rep, int n, int k, double eps) {
  return q_cell_value(spectral_norm(rep.block(n, k)), rep.h() + k, n, eps);
}

/// q estimate: for every n != 0 and level k, the maximum over eps in the grid
/// (plus the analytic maximizer of that cell) of |factor|^2 sigma_max^2 / |n|^3.
/// Also checks q <= 3 r^2 and the per-cell bound |f_m|^2 <= (m/(K'+m))^2 with
/// K' the lower of the two L_0-eigenvalues.
inline BoundReport estimate_q(const TruncatedRep<double>& rep, const std::vector<double>& eps_grid,
                              const BoundReport& r_report) {
  if (eps_grid.empty()) throw std::invalid_argument("empty eps grid");
  for (double e : eps_grid)
    if (!(e > 0)) throw std::invalid_argument("eps grid must be positive");
  BoundReport q;
  q.experiment = "estimate_q";
  const int N = rep.truncation();
  q.parameters = {{"c", decimal(rep.c())},
                  {"h", decimal(rep.h())},
                  {"N", std::to_string(N)},
                  {"eps_points", std::to_string(eps_grid.size())},
                  {"eps_min", decimal(*std::min_element(eps_grid.begin(), eps_grid.end()))},
                  {"eps_max", decimal(*std::max_element(eps_grid.begin(), eps_grid.end()))}};
  const double three_r2 = 3.0 * r_report.constant;
  bool fm_bound_ok = true;
  const double gmin = *std::min_element(eps_grid.begin(), eps_grid.end());
  const double gmax = *std::max_element(eps_grid.begin(), eps_grid.end());
  for (int n = -N; n <= N; ++n) {
    if (n == 0) continue;
    const int m = std::abs(n);
    for (int k = 0; k <= N; ++k) {
      const int t = k - n;
      if (t < 0 || t > N || rep.dim(k) == 0 || rep.dim(t) == 0) continue;
      const double lower = rep.h() + std::min(k, t);
      std::vector<double> grid = eps_grid;
      if (lower > 0) grid.push_back(fm_sup(lower, m).eps_max);
      BoundCell best{k, n, std::nullopt, -1.0, false, ""};
      const double sigma = spectral_norm(rep.block(n, k));
      for (double e : grid) {
        const double f = static_cast<double>(heat_factor(rep.h() + k, n, e));
        const double bound = (m / (lower + m)) * (m / (lower + m));
        if (f * f > bound * (1 + 1e-12)) fm_bound_ok = false;
        const double v = q_cell_value(sigma, rep.h() + k, n, e);
        if (v > best.value) {
          best.value = v;
          best.eps = e;
        }
      }
      if (best.eps && (*best.eps == gmin || *best.eps == gmax) && lower > 0)
        best.note = "maximizer on grid boundary";
      q.add(best);
    }
  }
  for (const auto& cell : q.cells)
    if (cell.note == "maximizer on grid boundary") {
      q.notes.push_back("warning: grid too coarse for some cells (maximizer on grid boundary)");
      break;
    }
  q.parameters["three_r_squared"] = decimal(three_r2);
  q.tolerance = three_r2;
  q.pass = q.constant <= three_r2 && fm_bound_ok;
  q.notes.push_back(std::string("chain q <= 3 r^2: ") + (q.constant <= three_r2 ? "holds" : "violated"));
  q.notes.push_back(std::string("per-cell f_m bound: ") + (fm_bound_ok ? "holds" : "violated"));
  return q;
}

/// M estimate: max over 2 <= |n| <= n_max of |fhat_n| |n|^3, with the maximum
/// over the last decade (|n| > n_max / 10) as a stabilization diagnostic.
inline BoundReport decay_report(const std::function<std::complex<double>(int)>& coefficient, int n_max,
                                const std::string& field_id = "field") {
  BoundReport r;
  r.experiment = "decay_report";
  r.parameters = {{"field", field_id}, {"n_max", std::to_string(n_max)}};
  double decade = 0.0;
  for (int n = -n_max; n <= n_max; ++n) {
    if (std::abs(n) < 2) continue;
    const double an = std::abs(static_cast<double>(n));
    const double v = std::abs(coefficient(n)) * an * an * an;
    r.add({0, n, std::nullopt, v, false, ""});
    if (std::abs(n) * 10 > n_max) decade = std::max(decade, v);
  }
  if (!r.witness) r.constant = 0.0;
  r.parameters["last_decade_max"] = decimal(decade);
  r.notes.push_back("last decade max / global max = " + decimal(r.constant > 0 ? decade / r.constant : 0.0));
  return r;
}

/// Coefficient magnitudes for the mollifier sweep: |fhat_n| on |n| <= limit
/// (only n = offset mod stride are visited) plus a bound for the rest.
struct MagnitudeSeries {
  std::function<double(int)> magnitude;
  int limit = 0;
  int stride = 1;
  int offset = 0;
  double tail = 0.0;
  std::string id = "field";
};

inline MagnitudeSeries magnitudes_of(const Field& f, std::string id = "field") {
  MagnitudeSeries s;
  s.id = std::move(id);
  s.limit = f.max_abs_mode();
  s.magnitude = [f](int n) { return std::abs(f.coefficient(n)); };
  return s;
}

/// The piecewise field, with |fhat_n| = 8 / (pi |n^3 - n|) on n = 2 (mod 4).
inline MagnitudeSeries piecewise_magnitudes(int limit) {
  MagnitudeSeries s;
  s.id = "piecewise-mobius";
  s.limit = limit;
  s.stride = 4;
  s.offset = 2;
  s.magnitude = [](int n) {
    const double x = std::abs(static_cast<double>(n));
    return 8.0 / (std::numbers::pi * (x * x * x - x));
  };
  s.tail = decay_tail_bound({limit, PiecewiseMobiusField::decay_constant_beyond(limit + 1), 4, 2}, limit);
  return s;
}

/// ||phi_k * f - f||_{3/2} = sum_n |1 - m_k(n)| |fhat_n| (1 + |n|^{3/2}) for
/// each k in ks. Terms with |n| > limit are replaced by the series' tail bound,
/// the same for every k, so the reported values are upper bounds.
inline BoundReport mollifier_report(const MagnitudeSeries& series, const MollifierFamily& family,
                                    const std::vector<int>& ks, double target = 1e-3) {
  BoundReport r;
  r.experiment = "mollifier_report";
  r.parameters = {{"field", series.id},
                  {"family", family.name()},
                  {"summation_limit", std::to_string(series.limit)},
                  {"tail_bound", decimal(series.tail)}};
  auto visit = [&](auto&& fn) {
    for (int sign : {1, -1}) {
      long start = sign > 0 ? 0 : 1;
      while ((((sign * start - series.offset) % series.stride) + series.stride) % series.stride != 0) ++start;
      for (long a = start; a <= series.limit; a += series.stride) fn(static_cast<int>(sign * a));
    }
  };
  std::vector<double> values(ks.size(), 0.0);
  if (family.kind == MollifierKind::Fejer) {
    // value_k = sum_{|n|<=k} |n|/(k+1) a_n + sum_{k<|n|<=limit} a_n + tail, a_n = |fhat_n|(1+|n|^{3/2})
    // bucket each term by the first k that covers it, then accumulate
    if (!std::is_sorted(ks.begin(), ks.end())) throw std::invalid_argument("k values must be ascending");
    std::vector<long double> weighted(ks.size() + 1, 0), plain(ks.size() + 1, 0);
    long double total = 0;
    visit([&](int n) {
      const long double a = static_cast<long double>(series.magnitude(n)) * mode_weight(n);
      total += a;
      const auto b = static_cast<std::size_t>(std::lower_bound(ks.begin(), ks.end(), std::abs(n)) - ks.begin());
      weighted[b] += a * std::abs(n);
      plain[b] += a;
    });
    long double w = 0, p = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      w += weighted[i];
      p += plain[i];
      values[i] = static_cast<double>(w / (ks[i] + 1.0L) + (total - p) + series.tail);
    }
  } else {
    for (std::size_t i = 0; i < ks.size(); ++i) {
      long double s = 0;
      visit([&](int n) { s += (1.0L - family.multiplier(ks[i], n)) * series.magnitude(n) * mode_weight(n); });
      values[i] = static_cast<double>(s + series.tail);
    }
  }
  bool monotone = true;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    r.cells.push_back({ks[i], 0, std::nullopt, values[i], false, ""});
    if (i > 0 && values[i] > values[i - 1]) monotone = false;
  }
  // The report's constant is the final (largest-k) error.
  if (!ks.empty()) {
    r.constant = values.back();
    r.witness = ks.size() - 1;
  }
  r.tolerance = target;
  r.pass = !ks.empty() && values.back() < target;
  r.parameters["monotone_nonincreasing"] = monotone ? "true" : "false";
  std::optional<int> first_below;
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (values[i] < target) {
      first_below = ks[i];
      break;
    }
  r.parameters["first_k_below_target"] = first_below ? std::to_string(*first_below) : "none";
  return r;
}

inline std::vector<int> doubling(int k_max) {
  std::vector<int> ks;
  for (long k = 1; k <= k_max; k *= 2) ks.push_back(static_cast<int>(k));
  return ks;
}

// ---------------------------------------------------------------------------
// Serialization.

inline nlohmann::ordered_json to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  j["precision"] = report_precision;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.parameters) params[k] = v;
  j["parameters"] = params;
  j["constant"] = decimal(r.constant);
  if (const auto* w = r.witness_cell()) {
    nlohmann::ordered_json wj;
    wj["k"] = w->k;
    wj["n"] = w->n;
    wj["eps"] = w->eps ? decimal(*w->eps) : "";
    wj["value"] = decimal(w->value);
    j["witness"] = wj;
  }
  j["tolerance"] = decimal(r.tolerance);
  j["pass"] = r.pass;
  j["notes"] = r.notes;
  j["cells"] = r.cells.size();
  return j;
}

inline void write_cells_csv(std::ostream& os, const BoundReport& r) {
  os << "k,n,eps,value,skipped,note\n";
  for (const auto& c : r.cells)
    os << c.k << ',' << c.n << ',' << (c.eps ? decimal(*c.eps) : "") << ',' << decimal(c.value) << ','
       << (c.skipped ? 1 : 0) << ',' << c.note << '\n';
}

}  // namespace virbound
