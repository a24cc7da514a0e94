#include "oracles.hpp"

#include "virbound/virbound.hpp"

#include <catch_amalgamated.hpp>

using namespace virbound;
using Q = Rational;

namespace {

VermaModule<Q> verma(Q c, Q h) { return VermaModule<Q>(CentralCharge<Q>(c), LowestWeight<Q>(h)); }

VermaVector<Q> monomial(std::vector<int> parts) {
  Partition p(std::move(parts));
  return VermaVector<Q>(p.weight(), p);
}

}  // namespace

TEST_CASE("rationals parse and print as p/q", "[scalar]") {
  CHECK(parse_rational("1/2") == Q(1, 2));
  CHECK(parse_rational("-3/6") == Q(-1, 2));
  CHECK(parse_rational("0.7") == Q(7, 10));
  CHECK(parse_rational("2") == Q(2));
  CHECK(format_rational(Q(13, 10)) == "13/10");
  CHECK(format_rational(Q(0)) == "0/1");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}

TEST_CASE("exact complex arithmetic", "[scalar]") {
  const ExactComplex i(Q(0), Q(1));
  CHECK(i * i == ExactComplex(Q(-1)));
  CHECK(conj(ExactComplex(Q(1), Q(2))) == ExactComplex(Q(1), Q(-2)));
  CHECK(ExactComplex(Q(1), Q(1)) / ExactComplex(Q(1), Q(-1)) == i);
}

TEST_CASE("partitions in reverse-lexicographic order", "[partition]") {
  CHECK(enumerate_partitions(0).size() == 1);
  CHECK(enumerate_partitions(0)[0].empty());
  REQUIRE(enumerate_partitions(1).size() == 1);
  CHECK(enumerate_partitions(1)[0].parts() == std::vector<int>{1});

  const auto four = enumerate_partitions(4);
  const std::vector<std::vector<int>> expected{{4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}};
  REQUIRE(four.size() == expected.size());
  for (std::size_t i = 0; i < four.size(); ++i) CHECK(four[i].parts() == expected[i]);
}

TEST_CASE("partition counts match brute force and the generating function", "[partition]") {
  const auto gf = oracle::partition_counts(20);
  const auto lib = partition_numbers(20);
  for (int k = 0; k <= 20; ++k) {
    CHECK(enumerate_partitions(k).size() == static_cast<std::size_t>(oracle::brute_force_count(k, k)));
    CHECK(static_cast<std::int64_t>(lib[k]) == gf[k]);
  }
}

TEST_CASE("partition index round trip", "[partition]") {
  const PartitionIndex idx(7);
  for (std::size_t i = 0; i < idx.size(); ++i) CHECK(idx.index_of(idx[i]) == i);
  CHECK_THROWS(Partition({1, 2}));
  CHECK_THROWS(Partition({2, 0}));
}

TEST_CASE("Verma action on small monomials", "[verma]") {
  const Q c(7, 10), h(3, 5);
  const auto v = verma(c, h);
  const auto omega = VermaVector<Q>::lowest_weight();

  CHECK(v.act(1, monomial({1})) == Q(2) * h * omega);
  CHECK(v.act(0, monomial({2})) == (h + 2) * monomial({2}));
  CHECK(v.act(2, monomial({2})) == (Q(4) * h + c / 2) * omega);
  CHECK(v.act(1, omega).is_zero());
  CHECK(v.act(0, omega) == h * omega);
  // L_{-1} L_{-2} Phi is not PBW-ordered: reorders to L_{-2} L_{-1} Phi + L_{-3} Phi
  const auto reordered = v.act(-1, monomial({2}));
  CHECK(reordered == monomial({2, 1}) + monomial({3}));
}

TEST_CASE("Virasoro relations on Verma monomials", "[verma]") {
  const Q c(4, 5), h(1, 3);
  const auto v = verma(c, h);
  for (int k = 0; k <= 5; ++k)
    for (const auto& p : enumerate_partitions(k)) {
      const VermaVector<Q> x(k, p);
      for (int m = -2; m <= 2; ++m)
        for (int n = -2; n <= 2; ++n) {
          auto lhs = v.act(m, v.act(n, x)) - v.act(n, v.act(m, x));
          auto rhs = Q(m - n) * v.act(m + n, x);
          if (m + n == 0) rhs += (c / 12) * Q(m * m * m - m) * x;
          CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("Gram matrices at levels 1 and 2", "[verma]") {
  const Q c(7, 10), h(3, 5);
  const auto v = verma(c, h);
  const auto g1 = v.gram_matrix(1);
  REQUIRE(g1.entries.rows() == 1);
  CHECK(g1.entries(0, 0) == Q(2) * h);

  const auto g2 = v.gram_matrix(2);
  REQUIRE(g2.entries.rows() == 2);
  CHECK(g2.entries(0, 0) == Q(4) * h + c / 2);
  CHECK(g2.entries(0, 1) == Q(6) * h);
  CHECK(g2.entries(1, 0) == Q(6) * h);
  CHECK(g2.entries(1, 1) == Q(8) * h * h + Q(4) * h);

  const auto vac = verma(c, Q(0)).gram_matrix(2);
  CHECK(vac.entries(0, 0) == c / 2);
  CHECK(vac.entries(0, 1) == 0);
  CHECK(vac.entries(1, 1) == 0);
}

TEST_CASE("level-2 determinant matches the expanded formula", "[verma]") {
  for (const Q c : {Q(1, 2), Q(7, 10), Q(2), Q(26)})
    for (const Q h : {Q(0), Q(1, 16), Q(1, 2), Q(1), Q(3, 2)}) {
      const auto g = verma(c, h).gram_matrix(2).entries;
      const Q det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
      CHECK(det == Q(2) * h * (Q(16) * h * h + Q(2) * (c - 5) * h + c));
      CHECK(det.get_d() == Catch::Approx(oracle::level2_determinant(c.get_d(), h.get_d())));
    }
}

TEST_CASE("Gram matrices are symmetric", "[verma]") {
  const auto v = verma(Q(1, 2), Q(1, 16));
  for (int k = 0; k <= 6; ++k) {
    const auto g = v.gram_matrix(k).entries;
    CHECK(g == g.transpose());
  }
}

TEST_CASE("exact ranks and null vectors", "[verma]") {
  for (const Q c : {Q(1, 2), Q(2), Q(26)}) {
    const auto v = verma(c, Q(0));
    const auto r1 = level_rank(v, 1);
    CHECK(r1.rank == 0);
    REQUIRE(r1.null_basis.size() == 1);
    CHECK(r1.null_basis[0].coefficient(Partition({1})) != 0);
    CHECK(level_rank(v, 2).rank == 1);
  }
  CHECK(level_rank(verma(Q(2), Q(1)), 2).rank == 2);
  // the level-2 null vector of the Ising module (c = 1/2, h = 1/16)
  CHECK(level_rank(verma(Q(1, 2), Q(1, 16)), 2).rank == 1);
}

TEST_CASE("float ranks agree with exact ranks", "[verma]") {
  const VermaModule<double> v(CentralCharge<double>(0.5), LowestWeight<double>(0.0));
  const auto e = verma(Q(1, 2), Q(0));
  for (int k = 1; k <= 6; ++k) CHECK(level_rank(v, k).rank == level_rank(e, k).rank);
}

TEST_CASE("unitary discrete series membership", "[verma]") {
  CHECK(admissible_central_charge(Q(1, 2)));
  CHECK(admissible_central_charge(Q(7, 10)));
  CHECK(admissible_central_charge(Q(4, 5)));
  CHECK(admissible_central_charge(Q(1)));
  CHECK(admissible_central_charge(Q(26)));
  CHECK_FALSE(admissible_central_charge(Q(1, 3)));
  CHECK_FALSE(admissible_central_charge(Q(3, 5)));
  CHECK_THROWS_AS(CentralCharge<Q>(Q(0)), std::invalid_argument);
  CHECK_THROWS_AS(LowestWeight<Q>(Q(-1)), std::invalid_argument);
}

TEST_CASE("matrix helpers", "[matrix]") {
  Matrix<Q> a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 3;
  a(1, 1) = 4;
  CHECK((a * Matrix<Q>::identity(2)) == a);
  CHECK(a.transpose()(0, 1) == 3);
  const auto red = reduce_exact(a);
  CHECK(red.rank == 2);
  Matrix<double> d(2, 2);
  d(0, 0) = 3;
  d(1, 1) = -4;
  CHECK(spectral_norm(d) == Catch::Approx(4.0));
}
