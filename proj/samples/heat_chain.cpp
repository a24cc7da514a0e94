// r and q estimates for the heat-regularized commutator at c = 1/2.

#include "virbound/virbound.hpp"

#include <iostream>

using namespace virbound;

int main(int argc, char** argv) {
  const int N = argc > 1 ? std::stoi(argv[1]) : 12;
  const auto rep = build_rep<double>(CentralCharge<double>(0.5), LowestWeight<double>(0), N);
  const auto r = estimate_r(rep);
  const auto q = estimate_q(rep, log_grid(1e-4, 20, 200), r);
  std::cout << "N=" << N << "  r^2=" << decimal(r.constant, 8) << "  q=" << decimal(q.constant, 8)
            << "  3r^2=" << decimal(3 * r.constant, 8) << "  chain " << (q.pass ? "holds" : "violated") << '\n';
  if (const auto* w = q.witness_cell())
    std::cout << "q attained at k=" << w->k << " n=" << w->n << " eps=" << decimal(*w->eps, 6) << '\n';
  for (int m : {1, 2, 5}) {
    const auto s = fm_sup(1.0, m);
    std::cout << "sup_eps f_" << m << "(1, eps)^2 = " << decimal(s.sup_squared, 10) << " at eps=" << decimal(s.eps_max, 10)
              << '\n';
  }
}
