#pragma once

// The ten acceptance criteria as callable checks. Used by the acceptance
// test binary and by the `check-all` subcommand.

#include "virbound/bounds.hpp"
#include "virbound/fields.hpp"
#include "virbound/graded_operator.hpp"
#include "virbound/smear.hpp"
#include "virbound/truncated_rep.hpp"
#include "virbound/verma.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace virbound {

enum class Arithmetic { Exact, Float };

struct AcceptanceOptions {
  Arithmetic mode = Arithmetic::Exact;
  std::uint64_t seed = 0;
  /// Denominator of the central term used by the relation checker. Anything
  /// other than 12 is a deliberately broken checker for fault injection.
  int central_denominator = 12;
  double float_tolerance = 1e-10;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace acceptance {

inline const std::vector<Rational>& relation_charges() {
  static const std::vector<Rational> cs{Rational(1, 2), Rational(7, 10), Rational(1), Rational(2)};
  return cs;
}

inline std::string str(const Rational& x) { return format_rational(x); }

inline CriterionResult relations(const AcceptanceOptions& opt) {
  CriterionResult r{1, "Virasoro relations on safe windows, N=8, |m|,|n|<=3", true, "", 0};
  std::ostringstream d;
  RepOptions ro;
  ro.allow_indefinite = true;
  std::size_t windows = 0;
  double worst_float = 0.0;
  for (const auto& c : relation_charges())
    for (const Rational h : {Rational(0), Rational(1, 2)}) {
      const auto exact = build_rep<Rational>(CentralCharge<Rational>(c), LowestWeight<Rational>(h), 8, ro);
      const auto rep = check_virasoro_relations(exact, 3, opt.central_denominator);
      windows += rep.windows_checked();
      if (!rep.all_exact_zero) {
        r.pass = false;
        d << "exact residual at c=" << str(c) << " h=" << str(h) << "; ";
      }
      if (!is_positive(exact)) d << "(c=" << str(c) << ", h=" << str(h) << " is outside the unitary region; signed metric) ";
      const auto fl = build_rep<double>(CentralCharge<double>(c.get_d()), LowestWeight<double>(h.get_d()), 8, ro);
      const auto frep = check_virasoro_relations(fl, 3, opt.central_denominator);
      worst_float = std::max(worst_float, frep.max_residual);
    }
  if (worst_float > opt.float_tolerance) r.pass = false;
  d << "windows=" << windows << " max float residual=" << decimal(worst_float, 3);
  r.detail = d.str();
  return r;
}

inline CriterionResult vacuum_spectrum(const AcceptanceOptions&) {
  CriterionResult r{2, "Vacuum spectrum: level 1 empty, level 2 one-dimensional", true, "", 0};
  std::ostringstream d;
  const std::vector<Rational> cs{Rational(1, 2), Rational(7, 10), Rational(4, 5), Rational(1), Rational(2), Rational(26)};
  for (const auto& c : cs) {
    VermaModule<Rational> v(CentralCharge<Rational>(c), LowestWeight<Rational>(0));
    const auto r1 = level_rank(v, 1);
    const auto r2 = level_rank(v, 2);
    const auto rep = build_rep<Rational>(CentralCharge<Rational>(c), LowestWeight<Rational>(0), 4);
    const bool ok = r1.rank == 0 && r2.rank == 1 && rep.dim(1) == 0 && rep.dim(2) == 1;
    if (!ok) {
      r.pass = false;
      d << "failed at c=" << str(c) << "; ";
    }
  }
  d << "tested " << cs.size() << " central charges";
  r.detail = d.str();
  return r;
}

inline CriterionResult recursion(const AcceptanceOptions& opt) {
  CriterionResult r{3, "L_{-1}L_{-n}Omega = (n-1)L_{-n-1}Omega, 2<=n<=11, N=12", true, "", 0};
  std::ostringstream d;
  for (const Rational c : {Rational(1, 2), Rational(1)}) {
    bool ok = false;
    std::size_t count = 0;
    double resid = 0.0;
    if (opt.mode == Arithmetic::Exact) {
      const auto rep = build_rep<Rational>(CentralCharge<Rational>(c), LowestWeight<Rational>(0), 12);
      const auto rpt = vacuum_recursion_checks(rep);
      ok = rpt.all_induction() && rpt.level2_dim == 1 && rpt.level2_spanned;
      count = rpt.induction.size();
    } else {
      const auto rep = build_rep<double>(CentralCharge<double>(c.get_d()), LowestWeight<double>(0), 12);
      const auto rpt = vacuum_recursion_checks(rep, opt.float_tolerance);
      ok = rpt.all_induction() && rpt.level2_dim == 1 && rpt.level2_spanned;
      count = rpt.induction.size();
      resid = rpt.max_induction_residual;
    }
    r.pass = r.pass && ok && count == 10;
    d << "c=" << str(c) << ": " << count << " identities " << (ok ? "hold" : "FAIL");
    if (opt.mode == Arithmetic::Float) d << " (max residual " << decimal(resid, 3) << ")";
    d << "; ";
  }
  r.detail = d.str();
  return r;
}

inline CriterionResult fm_optimization(const AcceptanceOptions&) {
  CriterionResult r{4, "f_m closed-form supremum vs grid search, k<=50, m<=50", true, "", 0};
  double worst = 0.0;
  bool inequality = true;
  for (int k = 0; k <= 50; ++k)
    for (int m = 1; m <= 50; ++m) {
      const auto closed = fm_sup(k, m);
      const auto grid = fm_grid_search(k, m);
      worst = std::max(worst, std::abs(closed.sup_squared - grid.sup_squared) / closed.sup_squared);
      const double bound = (double(m) / (k + m)) * (double(m) / (k + m));
      if (closed.sup_squared > bound * (1 + 1e-15) || grid.sup_squared > bound * (1 + 1e-15)) inequality = false;
    }
  r.pass = worst <= 1e-6 && inequality;
  r.detail = "max relative error " + decimal(worst, 3) + ", sup^2 <= (m/(k+m))^2 " + (inequality ? "holds" : "FAILS");
  return r;
}

inline CriterionResult commutator_chain(const AcceptanceOptions&) {
  CriterionResult r{5, "Heat commutator chain q <= 3 r^2 at c=1/2, N=16", true, "", 0};
  const auto rep = build_rep<double>(CentralCharge<double>(0.5), LowestWeight<double>(0), 16);
  const auto rr = estimate_r(rep);
  const auto grid = log_grid(1e-4, 20, 200);
  const auto qq = estimate_q(rep, grid, rr);
  double worst = 0.0;
  for (int n = -16; n <= 16; ++n) {
    if (n == 0) continue;
    for (double e : grid) worst = std::max(worst, heat_commutator(rep, n, e).max_relative_residual);
  }
  const auto zero = heat_commutator(rep, 0, 0.5);
  r.pass = qq.pass && worst <= 1e-12 && zero.norm == 0.0;
  r.detail = "r^2=" + decimal(rr.constant, 6) + " q=" + decimal(qq.constant, 6) + " 3r^2=" + decimal(3 * rr.constant, 6) +
             " identity residual=" + decimal(worst, 3);
  return r;
}

inline CriterionResult piecewise_field(const AcceptanceOptions&) {
  CriterionResult r{6, "Piecewise-Mobius field: corners, derivatives, coefficients, decay", true, "", 0};
  std::ostringstream d;
  bool corners = true, first = true, second = true;
  for (int j = 0; j < 4; ++j) {
    const Corner c{j};
    if (PiecewiseMobiusField::corner_value(c) != 0) corners = false;
    const auto d1 = PiecewiseMobiusField::one_sided_derivatives(c, 1);
    const auto d2 = PiecewiseMobiusField::one_sided_derivatives(c, 2);
    if (d1.left != d1.right) first = false;
    if (std::abs(d2.jump()) != 4) second = false;
  }
  bool vanishing = true;
  for (int n = -400; n <= 400; ++n)
    if (((n % 4) + 4) % 4 != 2 && !scalar_traits<ExactComplex>::is_zero(PiecewiseMobiusField::exact_part(n)))
      vanishing = false;
  const PiecewiseMobiusField f;
  double quad = 0.0;
  for (int n = -64; n <= 64; ++n)
    quad = std::max(quad, std::abs(f.quadrature_coefficient(n).value - PiecewiseMobiusField::coefficient(n)));
  const auto m200 = decay_report(PiecewiseMobiusField::coefficient, 200, "piecewise-mobius");
  const auto m400 = decay_report(PiecewiseMobiusField::coefficient, 400, "piecewise-mobius");
  const double drift = std::abs(m400.constant - m200.constant) / m400.constant;
  r.pass = corners && first && second && vanishing && quad <= 1e-12 && drift <= 0.05;
  d << "corners " << (corners ? "0" : "NONZERO") << ", first derivatives " << (first ? "continuous" : "JUMP")
    << ", second-derivative jumps " << (second ? "4" : "WRONG") << ", off-lattice coefficients "
    << (vanishing ? "zero" : "NONZERO") << ", quadrature gap " << decimal(quad, 3) << ", M(200)=" << decimal(m200.constant, 8)
    << " M(400)=" << decimal(m400.constant, 8);
  r.detail = d.str();
  return r;
}

inline CriterionResult nonvanishing(const AcceptanceOptions&) {
  CriterionResult r{7, "T(f)Omega != 0 for the piecewise field; closed form vs matrices", true, "", 0};
  const int N = 12;
  const auto rep = build_rep<double>(CentralCharge<double>(0.5), LowestWeight<double>(0), N);
  const Field f = PiecewiseMobiusField::truncated(N);
  const double closed = vacuum_norm(f, 0.5, N);
  const double matrix = vacuum_norm_from_matrices(rep, f, N);
  r.pass = closed > 0 && std::abs(closed - matrix) <= 1e-8;
  r.detail = "closed=" + decimal(closed, 12) + " matrix=" + decimal(matrix, 12);
  return r;
}

inline CriterionResult mollifier(const AcceptanceOptions&) {
  CriterionResult r{8, "Fejer mollification converges in ||.||_{3/2} below 1e-3", true, "", 0};
  const int k_max = 1 << 26;
  const auto rpt = mollifier_report(piecewise_magnitudes(k_max), MollifierFamily{}, doubling(k_max));
  const bool monotone = rpt.parameters.at("monotone_nonincreasing") == "true";
  r.pass = rpt.pass && monotone;
  r.detail = "first k below 1e-3: " + rpt.parameters.at("first_k_below_target") + ", final " + decimal(rpt.constant, 6) +
             (monotone ? ", monotone" : ", NOT monotone");
  return r;
}

inline CriterionResult additivity(const AcceptanceOptions& opt) {
  CriterionResult r{9, "Central charge additivity under tensor products", true, "", 0};
  std::ostringstream d;
  const int N = 6;
  const std::vector<std::pair<Rational, Rational>> pairs{{Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(4, 5)}};
  for (const auto& [a, b] : pairs) {
    if (opt.mode == Arithmetic::Exact) {
      const auto ra = build_rep<Rational>(CentralCharge<Rational>(a), LowestWeight<Rational>(0), N);
      const auto rb = build_rep<Rational>(CentralCharge<Rational>(b), LowestWeight<Rational>(0), N);
      const Rational measured = measure_central_charge(tensor_rep(ra, rb, N));
      const bool ok = measured == a + b;
      r.pass = r.pass && ok;
      d << str(a) << "+" << str(b) << " -> " << str(measured) << (ok ? "" : " FAIL") << "; ";
    } else {
      const auto ra = build_rep<double>(CentralCharge<double>(a.get_d()), LowestWeight<double>(0), N);
      const auto rb = build_rep<double>(CentralCharge<double>(b.get_d()), LowestWeight<double>(0), N);
      const double measured = measure_central_charge(tensor_rep(ra, rb, N));
      const bool ok = std::abs(measured - Rational(a + b).get_d()) <= opt.float_tolerance;
      r.pass = r.pass && ok;
      d << str(a) << "+" << str(b) << " -> " << decimal(measured, 15) << (ok ? "" : " FAIL") << "; ";
    }
  }
  r.detail = d.str();
  return r;
}

/// Random real field with support in [-width, width] and small rational coefficients.
inline ExactField random_exact_field(std::mt19937_64& rng, int width) {
  std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
  std::map<int, ExactComplex> c;
  c[0] = ExactComplex(Rational(num(rng), den(rng)));
  for (int n = 1; n <= width; ++n) {
    const ExactComplex a(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
    c[n] = a;
    c[-n] = conj(a);
  }
  return ExactField(std::move(c), true);
}

template <class R>
bool bracket_realized(const TruncatedRep<R>& rep, const FourierField<complex_of<R>>& f,
                      const FourierField<complex_of<R>>& g, double tolerance, std::size_t& safe_levels) {
  const auto tf = smear(rep, f).op;
  const auto tg = smear(rep, g).op;
  const auto [h, omega] = bracket_with_cocycle(f, g, rep.c());
  auto lhs = tf * tg - tg * tf;
  auto rhs = smear(rep, h).op;
  rhs.add_identity(omega);
  auto diff = lhs - rhs;
  safe_levels = diff.safe_levels().size();
  if constexpr (is_exact_v<R>) {
    (void)tolerance;
    return diff.is_zero_on_safe();
  } else {
    return diff.max_abs_on_safe() <= tolerance;
  }
}

inline CriterionResult smeared_commutators(const AcceptanceOptions& opt) {
  CriterionResult r{10, "[T(f),T(g)] = T(h) + omega for 20 random real field pairs", true, "", 0};
  std::mt19937_64 rng(opt.seed);
  const int N = 8;
  std::size_t min_safe = 1000;
  int failures = 0;
  if (opt.mode == Arithmetic::Exact) {
    const auto rep = build_rep<Rational>(CentralCharge<Rational>(Rational(1, 2)), LowestWeight<Rational>(0), N);
    for (int i = 0; i < 20; ++i) {
      const auto f = random_exact_field(rng, 2);
      const auto g = random_exact_field(rng, 2);
      std::size_t safe = 0;
      if (!bracket_realized(rep, f, g, 0.0, safe)) ++failures;
      min_safe = std::min(min_safe, safe);
    }
  } else {
    const auto rep = build_rep<double>(CentralCharge<double>(0.5), LowestWeight<double>(0), N);
    for (int i = 0; i < 20; ++i) {
      const auto f = to_float(random_exact_field(rng, 2));
      const auto g = to_float(random_exact_field(rng, 2));
      std::size_t safe = 0;
      if (!bracket_realized(rep, f, g, 1e-9, safe)) ++failures;
      min_safe = std::min(min_safe, safe);
    }
  }
  r.pass = failures == 0 && min_safe > 0;
  r.detail = std::to_string(20 - failures) + "/20 pairs realized, at least " + std::to_string(min_safe) + " safe levels each";
  return r;
}

}  // namespace acceptance

inline std::vector<std::function<CriterionResult(const AcceptanceOptions&)>> acceptance_criteria() {
  return {acceptance::relations,       acceptance::vacuum_spectrum, acceptance::recursion, acceptance::fm_optimization,
          acceptance::commutator_chain, acceptance::piecewise_field, acceptance::nonvanishing, acceptance::mollifier,
          acceptance::additivity,      acceptance::smeared_commutators};
}

/// Runs one criterion, catching exceptions as failures and timing it.
inline CriterionResult run_criterion(const std::function<CriterionResult(const AcceptanceOptions&)>& fn, int id,
                                     const AcceptanceOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = fn(opt);
  } catch (const std::exception& e) {
    r.id = id;
    r.title = "criterion " + std::to_string(id);
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<CriterionResult> out;
  const auto all = acceptance_criteria();
  for (std::size_t i = 0; i < all.size(); ++i) out.push_back(run_criterion(all[i], static_cast<int>(i + 1), opt));
  return out;
}

}  // namespace virbound
