#include "qconv/weyl.hpp"

#include <vector>

namespace qconv {

namespace {

// omega_order^j for j in [0, order)
std::vector<cplx> root_table(long long order) {
  std::vector<cplx> roots(order);
  for (long long j = 0; j < order; ++j) {
    roots[j] = std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(order));
  }
  return roots;
}

// Integer exponent (units of omega_{phase_order}) of the amplitude
//   <k+q mod d | w(p,q) | k>
// for one qudit with canonical p, q in [0, d).
//
// Odd d: w(p,q)|k> = omega_d^{p(k+q) - pq(d+1)/2} |k+q>.
// d = 2: w(p,q)|k> = i^{2p(k+q) - pq} |k+q>.
long long local_exponent(long long d, long long p, long long q, long long k) {
  if (d == 2) {
    return mod_reduce(2 * p * (k + q) - p * q, 4);
  }
  const long long half = (d + 1) / 2;  // inverse of 2 mod d
  return mod_reduce(p * (k + q) - p * q * half, d);
}

// Computational-basis digit tables for all dim kets, computed once per call.
std::vector<std::vector<long long>> digit_table(const SystemShape& shape) {
  std::vector<std::vector<long long>> t(shape.dim);
  for (long long k = 0; k < shape.dim; ++k) t[k] = ket_digits(shape, k);
  return t;
}

}  // namespace

DenseOperator weyl(const SystemShape& shape, const PhasePoint& x) {
  const PhasePoint c = canonical(shape, x);
  const long long order = phase_order(shape.d);
  const auto roots = root_table(order);
  Matrix m = Matrix::Zero(shape.dim, shape.dim);
  for (long long k = 0; k < shape.dim; ++k) {
    auto digits = ket_digits(shape, k);
    long long e = 0;
    std::vector<long long> target(shape.n);
    for (long long i = 0; i < shape.n; ++i) {
      e = mod_reduce(e + local_exponent(shape.d, c.p[i], c.q[i], digits[i]), order);
      target[i] = mod_reduce(digits[i] + c.q[i], shape.d);
    }
    m(ket_index(shape, target), k) = roots[e];
  }
  return DenseOperator(std::move(m), shape);
}

cplx weyl_commutation_phase(const SystemShape& shape, const PhasePoint& x, const PhasePoint& y) {
  const long long e = symplectic_form(shape, canonical(shape, x), canonical(shape, y));
  return std::polar(1.0, 2.0 * kPi * static_cast<double>(e) / static_cast<double>(shape.d));
}

CharacteristicFunction char_function(const DenseOperator& op) {
  const SystemShape& shape = op.shape;
  const long long order = phase_order(shape.d);
  const auto roots = root_table(order);
  const auto digits = digit_table(shape);
  Vector values(shape.phase_points());
  for (long long xi = 0; xi < shape.phase_points(); ++xi) {
    const PhasePoint y = canonical(shape, point_neg(shape, point_from_index(shape, xi)));
    cplx acc = 0;
    for (long long k = 0; k < shape.dim; ++k) {
      long long e = 0;
      std::vector<long long> target(shape.n);
      for (long long i = 0; i < shape.n; ++i) {
        e = mod_reduce(e + local_exponent(shape.d, y.p[i], y.q[i], digits[k][i]), order);
        target[i] = mod_reduce(digits[k][i] + y.q[i], shape.d);
      }
      // Tr{rho w(y)} = sum_k rho(k, target(k)) <target|w(y)|k>
      acc += roots[e] * op.m(k, ket_index(shape, target));
    }
    values[xi] = acc;
  }
  return CharacteristicFunction(std::move(values), shape);
}

DenseOperator inverse_char(const CharacteristicFunction& xi) {
  const SystemShape& shape = xi.shape;
  const long long order = phase_order(shape.d);
  const auto roots = root_table(order);
  const auto digits = digit_table(shape);
  Matrix m = Matrix::Zero(shape.dim, shape.dim);
  const double norm = 1.0 / static_cast<double>(shape.dim);
  for (long long idx = 0; idx < shape.phase_points(); ++idx) {
    const cplx coeff = xi.values[idx] * norm;
    if (coeff == cplx(0.0, 0.0)) continue;
    const PhasePoint x = point_from_index(shape, idx);
    for (long long k = 0; k < shape.dim; ++k) {
      long long e = 0;
      std::vector<long long> target(shape.n);
      for (long long i = 0; i < shape.n; ++i) {
        e = mod_reduce(e + local_exponent(shape.d, x.p[i], x.q[i], digits[k][i]), order);
        target[i] = mod_reduce(digits[k][i] + x.q[i], shape.d);
      }
      m(ket_index(shape, target), k) += coeff * roots[e];
    }
  }
  return DenseOperator(std::move(m), shape);
}

double parseval_sum(const CharacteristicFunction& xi) {
  return xi.values.squaredNorm() / static_cast<double>(xi.shape.dim);
}

}  // namespace qconv
