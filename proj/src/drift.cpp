#include "fefp/drift.hpp"

namespace fefp {

VectorPoly DriftPolynomial::to_poly() const {
  const Polynomial r2 = Polynomial::norm2_pow(1);
  const Polynomial r4 = Polynomial::norm2_pow(2);
  Polynomial bv;
  for (int j = 0; j < 3; ++j) bv += quad_proj[static_cast<std::size_t>(j)] * Polynomial::component(j);
  const Polynomial radial = bv + cubic * r2 - quintic * r4 - Polynomial(inv_tau);
  VectorPoly out;
  for (int i = 0; i < 3; ++i) {
    const auto k = static_cast<std::size_t>(i);
    Polynomial a(constant[k]);
    for (int j = 0; j < 3; ++j) a += linear[3 * k + static_cast<std::size_t>(j)] * Polynomial::component(j);
    a += quad_norm[k] * r2;
    a += radial * Polynomial::component(i);
    out[k] = a;
  }
  return out;
}

}  // namespace fefp
