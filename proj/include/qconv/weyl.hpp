// Weyl operators and the characteristic-function transform pair.
//
// Conventions, fixed once here and relied on everywhere else:
//   w(p,q) = zeta^{-pq} Z^p X^q per qudit, zeta = omega_d^{(d+1)/2} for odd d
//   and i for d=2; multi-qudit operators are tensor products of single-qudit
//   factors. All phases are exact integer exponents of a primitive root of
//   unity of order d (odd d) or 4 (d=2), exponentiated once.
//
//   Xi_rho(x) = Tr{rho w(-x)}    and    rho = (1/d^n) sum_x Xi_rho(x) w(x).
#pragma once

#include "qconv/operators.hpp"

namespace qconv {

// Order of the phase group the integer exponents live in.
inline long long phase_order(long long d) { return d == 2 ? 4 : d; }

struct CharacteristicFunction {
  Vector values;  // indexed by point_index, d^{2n} entries
  SystemShape shape;

  CharacteristicFunction() = default;
  CharacteristicFunction(Vector v, SystemShape s) : values(std::move(v)), shape(s) {
    if (values.size() != shape.phase_points()) {
      throw validation_error("CharacteristicFunction: table has " +
                             std::to_string(values.size()) + " entries, expected " +
                             std::to_string(shape.phase_points()));
    }
  }

  cplx at(const PhasePoint& x) const { return values[point_index(shape, canonical(shape, x))]; }
};

DenseOperator weyl(const SystemShape& shape, const PhasePoint& x);

// The scalar c with w(x) w(y) = c w(y) w(x); a power of omega_d.
cplx weyl_commutation_phase(const SystemShape& shape, const PhasePoint& x, const PhasePoint& y);

CharacteristicFunction char_function(const DenseOperator& op);
DenseOperator inverse_char(const CharacteristicFunction& xi);

// (1/d^n) sum_x |Xi(x)|^2; equals Tr rho^2 for a state's transform.
double parseval_sum(const CharacteristicFunction& xi);

}  // namespace qconv
