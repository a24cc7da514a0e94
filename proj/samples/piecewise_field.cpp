// The piecewise Mobius field: corner data, decay constant and Fejer convergence.

#include "virbound/virbound.hpp"

#include <iostream>

using namespace virbound;

int main() {
  for (int j = 0; j < 4; ++j) {
    const Corner p{j};
    const auto d1 = PiecewiseMobiusField::one_sided_derivatives(p, 1);
    const auto d2 = PiecewiseMobiusField::one_sided_derivatives(p, 2);
    std::cout << "corner " << p.label() << ": f=" << PiecewiseMobiusField::corner_value(p) << " f'=" << d1.left << '/'
              << d1.right << " f''=" << d2.left << '/' << d2.right << '\n';
  }
  const auto decay = decay_report(PiecewiseMobiusField::coefficient, 400, "piecewise-mobius");
  std::cout << "max |f_n| |n|^3 over |n| <= 400: " << decimal(decay.constant, 10) << '\n';

  const int k_max = 1 << 20;
  const auto rpt = mollifier_report(piecewise_magnitudes(k_max), MollifierFamily{}, doubling(k_max));
  for (const auto& cell : rpt.cells) std::cout << "k=" << cell.k << "  ||phi_k*f - f|| <= " << decimal(cell.value, 6) << '\n';
}
