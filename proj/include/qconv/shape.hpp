// System shape (prime d, register length n) and phase-space points.
//
// A phase point x = (p, q) holds n residues for the Z part and n for the X
// part. Points serialize to a single integer by mixed-radix encoding, p
// digits first, most significant first; this fixes the table layout used by
// characteristic functions and the file formats.
#pragma once

#include <vector>

#include "qconv/common.hpp"

namespace qconv {

// Dense-dimension cap; QCONV_BUDGET overrides (read once per construction).
long long dense_dim_budget();

bool is_prime(long long v);

struct SystemShape {
  long long d = 0;  // prime level count per qudit
  long long n = 0;  // register length
  long long dim = 0;  // d^n

  SystemShape() = default;
  SystemShape(long long d_, long long n_);

  long long phase_points() const { return dim * dim; }  // |V^n| = d^{2n}
  bool operator==(const SystemShape& o) const { return d == o.d && n == o.n; }
  bool operator!=(const SystemShape& o) const { return !(*this == o); }
};

struct PhasePoint {
  std::vector<long long> p;
  std::vector<long long> q;

  PhasePoint() = default;
  PhasePoint(std::vector<long long> p_, std::vector<long long> q_)
      : p(std::move(p_)), q(std::move(q_)) {}
};

// Canonicalize all components into [0, d).
PhasePoint canonical(const SystemShape& shape, PhasePoint x);

PhasePoint zero_point(const SystemShape& shape);
bool is_zero(const PhasePoint& x);

PhasePoint point_add(const SystemShape& shape, const PhasePoint& a, const PhasePoint& b);
PhasePoint point_neg(const SystemShape& shape, const PhasePoint& a);
PhasePoint point_scale(const SystemShape& shape, long long c, const PhasePoint& a);

// Mixed-radix index: idx = sum_i p_i d^{2n-1-i} + sum_i q_i d^{n-1-i}.
long long point_index(const SystemShape& shape, const PhasePoint& x);
PhasePoint point_from_index(const SystemShape& shape, long long idx);

// Symplectic form <x,y> = sum_i (p_x,i q_y,i - q_x,i p_y,i) mod d.
long long symplectic_form(const SystemShape& shape, const PhasePoint& x, const PhasePoint& y);

// Ket index helpers: computational basis |k_1 ... k_n> with the first qudit
// most significant, matching Kronecker-product ordering.
long long ket_index(const SystemShape& shape, const std::vector<long long>& digits);
std::vector<long long> ket_digits(const SystemShape& shape, long long idx);

}  // namespace qconv
