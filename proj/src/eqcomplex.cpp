#include "tempered/eqcomplex.hpp"

namespace tempered {

std::vector<Int> bad_prime_witnesses(const OrbitTable& table, unsigned long p) {
  std::vector<Int> offending;
  if (p == 0) return offending;
  for (const Orbit& orbit : table.orbits) {
    Int order = orbit.stab_order();
    if (order % Int(p) == 0) offending.push_back(order);
  }
  return offending;
}

}  // namespace tempered
