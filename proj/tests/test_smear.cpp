#include "oracles.hpp"

#include "virbound/virbound.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace virbound;
using Q = Rational;
using C = std::complex<double>;
using Catch::Approx;

namespace {

TruncatedRep<Q> exact_vacuum(Q c, int N) { return build_rep<Q>(CentralCharge<Q>(c), LowestWeight<Q>(0), N); }

TruncatedRep<double> float_vacuum(double c, int N) {
  return build_rep<double>(CentralCharge<double>(c), LowestWeight<double>(0), N);
}

/// Copy of rep with every L_n, |n| >= 2, scaled by zeta^{|n|-1}: the same
/// Mobius blocks and L~_{-2} Omega = zeta L_{-2} Omega.
TruncatedRep<Q> rescaled_copy(const TruncatedRep<Q>& rep, const Q& zeta) {
  TruncatedRep<Q> out(rep.c(), rep.h(), rep.truncation());
  for (int k = 0; k <= rep.truncation(); ++k) out.set_level(k, rep.dim(k), rep.metric(k));
  for (const auto& [key, m] : rep.blocks()) {
    const int n = std::abs(key.first);
    Q s(1);
    for (int j = 1; j < n; ++j) s *= zeta;
    out.set_block(key.first, key.second, m * s);
  }
  return out;
}

}  // namespace

TEST_CASE("smearing simple fields", "[smear]") {
  const Q c(1, 2);
  const auto rep = exact_vacuum(c, 6);
  using S = ExactComplex;

  const auto one = smear(rep, ExactField({{0, S(Q(1))}}, true));
  CHECK((one.op - GradedOperator<S>::mode(rep, 0)).is_zero_on_safe());

  const ExactField two_cos({{2, S(Q(1))}, {-2, S(Q(1))}}, true);
  const auto t = smear(rep, two_cos).op;
  auto expected = GradedOperator<S>::mode(rep, 2);
  expected += GradedOperator<S>::mode(rep, -2);
  CHECK((t - expected).is_zero_on_safe());
  auto omega = t.zero_vector();
  omega[0][0] = S(Q(1));
  const auto v = t.apply(t.apply(omega));
  CHECK(t.inner(omega, v) == S(Q(c / 2)));

  const ExactField f({{1, S(Q(1), Q(2))}, {-1, S(Q(1), Q(-2))}, {3, S(Q(1, 3))}, {-3, S(Q(1, 3))}}, true);
  const ExactField g({{0, S(Q(5))}, {2, S(Q(0), Q(1))}, {-2, S(Q(0), Q(-1))}}, true);
  CHECK((smear(rep, f + g).op - smear(rep, f).op - smear(rep, g).op).is_zero_on_safe());
}

TEST_CASE("truncation bias of a smeared field", "[smear]") {
  const auto rep = float_vacuum(0.5, 8);
  const auto full = smear(rep, PiecewiseMobiusField::truncated(64), 8);
  CHECK(full.bias.discarded > 0);
  CHECK(full.bias.warn);
  const auto finite = smear(rep, Field::cosine(2), 8);
  CHECK(finite.bias.discarded == 0.0);
  CHECK_FALSE(finite.bias.warn);
  CHECK_THROWS_AS(smear(rep, Field::cosine(2), 9), std::invalid_argument);
}

TEST_CASE("vacuum norms of smeared fields", "[smear]") {
  const Q c(1, 2);
  const auto rep = exact_vacuum(c, 8);
  using S = ExactComplex;
  const ExactField mobius({{-1, S(Q(-1), Q(-1))}, {0, S(Q(2))}, {1, S(Q(-1), Q(1))}}, true);
  CHECK(vacuum_norm(mobius, c, 8) == 0);
  CHECK(vacuum_norm_from_matrices(rep, mobius) == 0);

  const ExactField lower({{-2, S(Q(1))}}, false);
  CHECK(vacuum_norm(lower, c, 8) == c / 2);
  CHECK(vacuum_norm_from_matrices(rep, lower) == c / 2);

  const auto frep = float_vacuum(0.5, 12);
  const Field f = PiecewiseMobiusField::truncated(12);
  const double closed = vacuum_norm(f, 0.5, 12);
  CHECK(closed > 0);
  CHECK(vacuum_norm_from_matrices(frep, f, 12) == Approx(closed).epsilon(1e-10));
  // the closed form with the coefficient magnitudes 8 / (pi (n^3 - n))
  double series = 0;
  for (int n = 2; n <= 12; n += 4) series += 64.0 / (std::numbers::pi * std::numbers::pi * (n * n * n - n));
  CHECK(closed == Approx(0.5 / 12 * series));
}

TEST_CASE("f_m closed form", "[heat]") {
  const auto s = fm_sup(1, 1);
  CHECK(s.eps_max == Approx(std::log(2.0)));
  CHECK(s.sup_squared == Approx(1.0 / 16));
  for (int m = 1; m <= 5; ++m) {
    CHECK(fm_sup(0, m).sup_squared == 1.0);
    CHECK(std::isinf(fm_sup(0, m).eps_max));
  }
  for (int k = 1; k <= 20; ++k)
    for (int m = 1; m <= 20; ++m) {
      const auto closed = fm_sup(k, m);
      CHECK(closed.sup_squared == Approx(oracle::fm_sup_squared(k, m)).epsilon(1e-12));
      CHECK(closed.sup_squared <= std::pow(double(m) / (k + m), 2));
      CHECK(static_cast<double>(fm_value(k, m, closed.eps_max)) ==
            Approx(std::sqrt(closed.sup_squared)).epsilon(1e-12));
    }
  CHECK(fm_grid_search(3, 2).sup_squared == Approx(fm_sup(3, 2).sup_squared).epsilon(1e-8));
  CHECK_THROWS(fm_sup(1, 0));
}

TEST_CASE("heat-regularized commutator", "[heat]") {
  const auto rep = float_vacuum(0.5, 10);
  const auto zero = heat_commutator(rep, 0, 0.7);
  CHECK(zero.norm == 0.0);
  for (int n : {-3, -1, 2, 4}) {
    const auto small = heat_commutator(rep, n, 1e-9);
    CHECK(small.norm < 1e-6);
    for (double eps : {1e-3, 0.2, 3.0}) {
      const auto hc = heat_commutator(rep, n, eps);
      CHECK(hc.max_relative_residual < 1e-12);
      for (const auto& lv : hc.levels) {
        const double K = lv.level;
        const double direct = std::exp(-eps * K) - std::exp(-eps * (K - n));
        CHECK(static_cast<double>(lv.factor) == Approx(direct).epsilon(1e-9).margin(1e-300));
        CHECK(lv.block_norm == Approx(spectral_norm(rep.block(n, lv.level))));
      }
    }
  }
  CHECK_THROWS_AS(heat_commutator(rep, 1, 0.0), std::invalid_argument);
}

TEST_CASE("field decomposition at the corners", "[smear]") {
  const auto rep = float_vacuum(0.5, 8);
  for (int j = 0; j < 4; ++j) CHECK(decomposition_check(rep, Corner{j}) < 1e-12);
}

TEST_CASE("vacuum recursion identities", "[smear]") {
  for (const Q c : {Q(1, 2), Q(1), Q(2)}) {
    const auto rep = exact_vacuum(c, 10);
    const auto r = vacuum_recursion_checks(rep);
    CHECK(r.level2_dim == 1);
    CHECK(r.level2_spanned);
    CHECK(r.all_induction());
    CHECK(r.induction.size() == 8);
  }
  const auto rep = exact_vacuum(Q(1, 2), 4);
  const std::vector<Q> omega{Q(1)};
  const auto lhs = rep.block(-1, 2).apply(rep.block(-2, 0).apply(omega));
  CHECK(lhs == rep.block(-3, 0).apply(omega));
  CHECK_THROWS(vacuum_recursion_checks(build_rep<Q>(CentralCharge<Q>(Q(1, 2)), LowestWeight<Q>(Q(1, 2)), 6)));
}

TEST_CASE("proportionality propagates from level 2", "[smear]") {
  const auto rep = exact_vacuum(Q(1, 2), 8);
  const auto same = propagate_proportionality(rep, rep);
  CHECK(same.holds);
  CHECK(same.zeta == 1);
  const auto scaled = propagate_proportionality(rep, rescaled_copy(rep, Q(3, 2)));
  CHECK(scaled.same_mobius_blocks);
  CHECK(scaled.proportional_at_level2);
  CHECK(scaled.zeta == Q(3, 2));
  CHECK_FALSE(scaled.holds);
  CHECK(scaled.max_deviation > 0);
}

TEST_CASE("energy bound on random vectors", "[smear]") {
  const auto rep = float_vacuum(0.5, 10);
  const auto r = estimate_r(rep);
  const auto f = PiecewiseMobiusField::truncated(10);
  const auto check = energy_bound_check(rep, f, std::sqrt(r.constant), 32, 7);
  CHECK(check.pass);
  CHECK(check.worst_ratio <= 1.0);
  const auto again = energy_bound_check(rep, f, std::sqrt(r.constant), 32, 7);
  CHECK(again.worst_ratio == check.worst_ratio);
}
