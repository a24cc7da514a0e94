#include "oracles.hpp"

#include "virbound/virbound.hpp"

#include <catch_amalgamated.hpp>

using namespace virbound;
using Q = Rational;

namespace {

TruncatedRep<Q> exact_rep(Q c, Q h, int N, RepOptions opt = {}) {
  return build_rep<Q>(CentralCharge<Q>(c), LowestWeight<Q>(h), N, opt);
}

TruncatedRep<double> float_rep(double c, double h, int N) {
  return build_rep<double>(CentralCharge<double>(c), LowestWeight<double>(h), N);
}

std::vector<int> as_int(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("level dimensions follow the characters", "[rep]") {
  SECTION("generic vacuum: p(k) - p(k-1)") {
    const auto p = oracle::partition_counts(10);
    for (const Q c : {Q(1), Q(2), Q(26)}) {
      const auto rep = exact_rep(c, Q(0), 10);
      for (int k = 1; k <= 10; ++k) CHECK(rep.dim(k) == p[k] - p[k - 1]);
    }
  }
  SECTION("Ising modules") {
    CHECK(exact_rep(Q(1, 2), Q(0), 12).level_dims() == as_int(oracle::minimal_model_dims(4, 3, 1, 1, 12)));
    CHECK(exact_rep(Q(1, 2), Q(1, 2), 12).level_dims() == as_int(oracle::minimal_model_dims(4, 3, 2, 1, 12)));
    CHECK(exact_rep(Q(1, 2), Q(1, 16), 12).level_dims() == as_int(oracle::minimal_model_dims(4, 3, 1, 2, 12)));
  }
  SECTION("tricritical Ising vacuum") {
    CHECK(exact_rep(Q(7, 10), Q(0), 12).level_dims() == as_int(oracle::minimal_model_dims(5, 4, 1, 1, 12)));
  }
  SECTION("the c = 1/2 vacuum null vector appears at level 6") {
    const auto dims = exact_rep(Q(1, 2), Q(0), 8).level_dims();
    CHECK(dims == std::vector<int>{1, 0, 1, 1, 2, 2, 3, 3, 5});
  }
  SECTION("float mode reproduces exact dimensions") {
    CHECK(float_rep(0.5, 0.0, 12).level_dims() == exact_rep(Q(1, 2), Q(0), 12).level_dims());
    CHECK(float_rep(0.7, 0.0, 12).level_dims() == exact_rep(Q(7, 10), Q(0), 12).level_dims());
  }
}

TEST_CASE("grading and vacuum expectation", "[rep]") {
  const Q c(4, 5);
  const auto rep = exact_rep(c, Q(0), 6);
  for (int k = 0; k <= 6; ++k) {
    const auto& l0 = rep.block(0, k);
    for (int i = 0; i < rep.dim(k); ++i)
      for (int j = 0; j < rep.dim(k); ++j) CHECK(l0(i, j) == (i == j ? Q(k) : Q(0)));
  }
  const std::vector<Q> omega{Q(1)};
  const auto back = rep.block(2, 2).apply(rep.block(-2, 0).apply(omega));
  CHECK(rep.inner(0, omega, back) == c / 2);
  CHECK(measure_central_charge(rep) == c);
}

TEST_CASE("Virasoro relations hold exactly on safe windows", "[rep]") {
  for (const Q c : {Q(1, 2), Q(1), Q(2)})
    for (const Q h : {Q(0), Q(1, 2)}) {
      const auto rep = exact_rep(c, h, 8);
      const auto rel = check_virasoro_relations(rep, 3);
      CHECK(rel.all_exact_zero);
      CHECK(rel.windows_checked() > 0);
      CHECK(hermiticity_residual(rep) == 0.0);
    }
}

TEST_CASE("a broken central term is detected", "[rep]") {
  const auto rep = exact_rep(Q(1, 2), Q(0), 8);
  CHECK_FALSE(check_virasoro_relations(rep, 3, 13).all_exact_zero);
  const auto frep = float_rep(0.5, 0.0, 8);
  CHECK(check_virasoro_relations(frep, 3, 13).max_residual > 1e-3);
}

TEST_CASE("float relations hold to rounding", "[rep]") {
  const auto rep = float_rep(0.5, 0.0, 12);
  CHECK(check_virasoro_relations(rep, 3).max_residual < 1e-9);
  CHECK(hermiticity_residual(rep) < 1e-9);
}

TEST_CASE("the recursive basis agrees with direct PBW computation", "[rep]") {
  RepOptions opt;
  opt.keep_monomial_basis = true;
  const Q c(1, 2), h(0);
  const auto rep = exact_rep(c, h, 7, opt);
  REQUIRE(rep.monomial_basis());
  const auto& basis = *rep.monomial_basis();
  const VermaModule<Q> verma{CentralCharge<Q>(c), LowestWeight<Q>(h)};
  for (int k = 0; k <= 7; ++k) {
    const auto g = verma.gram_matrix(k).entries;
    // the basis is orthogonal with the recorded metric
    const auto form = basis[k].transpose() * g * basis[k];
    for (int i = 0; i < rep.dim(k); ++i)
      for (int j = 0; j < rep.dim(k); ++j) CHECK(form(i, j) == (i == j ? rep.metric(k)[i] : Q(0)));
    // L_n on the basis, computed in the Verma module, equals the block up to null vectors
    for (int n = -3; n <= 3; ++n) {
      const int t = k - n;
      if (t < 0 || t > 7 || rep.dim(k) == 0 || rep.dim(t) == 0) continue;
      const auto direct = verma.mode_matrix(n, k) * basis[k];
      const auto via_blocks = basis[t] * rep.block(n, k);
      const auto diff = verma.gram_matrix(t).entries * (direct - via_blocks);
      CHECK(diff.is_zero());
    }
  }
}

TEST_CASE("non-unitary parameters are rejected unless allowed", "[rep]") {
  CHECK_THROWS_AS(exact_rep(Q(7, 10), Q(1, 2), 8), NonUnitary);
  RepOptions opt;
  opt.allow_indefinite = true;
  const auto rep = exact_rep(Q(7, 10), Q(1, 2), 8, opt);
  CHECK_FALSE(is_positive(rep));
  CHECK(check_virasoro_relations(rep, 3).all_exact_zero);
  CHECK_THROWS_AS(normalize(rep), NonUnitary);
}

TEST_CASE("truncation preconditions", "[rep]") {
  CHECK_THROWS_AS(exact_rep(Q(1, 2), Q(0), 1), std::invalid_argument);
  const auto rep = exact_rep(Q(2), Q(0), 2);
  CHECK(rep.dim(2) == 1);
  CHECK_THROWS_AS(rep.block(3, 2), std::out_of_range);
}

TEST_CASE("normalization to an orthonormal float basis", "[rep]") {
  const auto exact = exact_rep(Q(1, 2), Q(0), 8);
  const auto fl = normalize(exact);
  const auto direct = float_rep(0.5, 0.0, 8);
  CHECK(fl.level_dims() == exact.level_dims());
  CHECK(check_virasoro_relations(fl, 3).max_residual < 1e-12);
  // block norms are basis independent
  for (const auto& [key, m] : fl.blocks())
    CHECK(spectral_norm(m) == Catch::Approx(spectral_norm(direct.block(key.first, key.second))).margin(1e-10));
}

TEST_CASE("tensor products add central charges", "[rep]") {
  const auto a = exact_rep(Q(1, 2), Q(0), 6);
  const auto b = exact_rep(Q(4, 5), Q(0), 6);
  const auto t = tensor_rep(a, b, 6);
  CHECK(t.h() == 0);
  CHECK(t.dim(1) == 0);
  CHECK(measure_central_charge(t) == Q(13, 10));
  CHECK(measure_central_charge(tensor_rep(a, a, 6)) == Q(1));
  CHECK(check_virasoro_relations(t, 3).all_exact_zero);
  CHECK_THROWS_AS(tensor_rep(a, b, 6, 10), std::length_error);
}

TEST_CASE("graded operators track their safe levels", "[operator]") {
  const auto rep = exact_rep(Q(1, 2), Q(0), 6);
  using S = ExactComplex;
  const auto up = GradedOperator<S>::mode(rep, -2);
  const auto down = GradedOperator<S>::mode(rep, 2);
  CHECK(up.safe_levels() == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(down.safe_levels().size() == 7);
  const auto prod = down * up;
  CHECK(prod.max_shift() == 0);
  CHECK(prod.peak() == 2);
  CHECK(prod.safe_levels() == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(prod.adjoint().peak() == 2);
  const auto comm = down * up - up * down;
  auto expected = S(Q(4)) * GradedOperator<S>::mode(rep, 0);
  expected.add_identity(S(Q(1, 2) * 6 / 12));
  CHECK((comm - expected).is_zero_on_safe());
  CHECK((up.adjoint() - down).is_zero_on_safe());
}
