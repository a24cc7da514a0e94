// Level dimensions and Gram matrices of the c = 1/2 vacuum module, exactly.

#include "virbound/virbound.hpp"

#include <iostream>

using namespace virbound;

int main() {
  const Rational c(1, 2);
  const VermaModule<Rational> verma{CentralCharge<Rational>(c), LowestWeight<Rational>(0)};
  const auto g = verma.gram_matrix(4);
  std::cout << "Gram matrix at level 4, basis";
  for (const auto& p : g.basis) std::cout << ' ' << p;
  std::cout << '\n';
  for (std::size_t i = 0; i < g.entries.rows(); ++i) {
    for (std::size_t j = 0; j < g.entries.cols(); ++j) std::cout << ' ' << format_rational(g.entries(i, j));
    std::cout << '\n';
  }

  const auto rep = build_rep<Rational>(CentralCharge<Rational>(c), LowestWeight<Rational>(0), 10);
  std::cout << "level dimensions:";
  for (int d : rep.level_dims()) std::cout << ' ' << d;
  std::cout << "\npartition numbers:";
  for (auto p : partition_numbers(10)) std::cout << ' ' << p;
  const auto rel = check_virasoro_relations(rep, 3);
  std::cout << "\nrelations on " << rel.windows_checked() << " windows, all exactly zero: "
            << (rel.all_exact_zero ? "yes" : "no") << '\n';
}
