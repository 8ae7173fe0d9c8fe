#include "qconv/shape.hpp"

#include <cstdlib>
#include <string>

namespace qconv {

long long dense_dim_budget() {
  long long cap = 4096;
  if (const char* env = std::getenv("QCONV_BUDGET")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 0) cap = v;
  }
  return cap;
}

bool is_prime(long long v) {
  if (v < 2) return false;
  for (long long f = 2; f * f <= v; ++f) {
    if (v % f == 0) return false;
  }
  return true;
}

SystemShape::SystemShape(long long d_, long long n_) : d(d_), n(n_) {
  if (!is_prime(d)) {
    throw validation_error("SystemShape: d = " + std::to_string(d) + " is not prime");
  }
  if (n < 1) {
    throw validation_error("SystemShape: n = " + std::to_string(n) + " must be positive");
  }
  const long long cap = dense_dim_budget();
  dim = 1;
  for (long long i = 0; i < n; ++i) {
    dim *= d;
    if (dim > cap) {
      throw budget_error("SystemShape: dim d^n exceeds dense budget " + std::to_string(cap) +
                         " (d=" + std::to_string(d) + ", n=" + std::to_string(n) + ")");
    }
  }
}

PhasePoint canonical(const SystemShape& shape, PhasePoint x) {
  for (auto& v : x.p) v = mod_reduce(v, shape.d);
  for (auto& v : x.q) v = mod_reduce(v, shape.d);
  return x;
}

PhasePoint zero_point(const SystemShape& shape) {
  return PhasePoint(std::vector<long long>(shape.n, 0), std::vector<long long>(shape.n, 0));
}

bool is_zero(const PhasePoint& x) {
  for (auto v : x.p)
    if (v != 0) return false;
  for (auto v : x.q)
    if (v != 0) return false;
  return true;
}

PhasePoint point_add(const SystemShape& shape, const PhasePoint& a, const PhasePoint& b) {
  PhasePoint r = a;
  for (long long i = 0; i < shape.n; ++i) {
    r.p[i] = mod_reduce(r.p[i] + b.p[i], shape.d);
    r.q[i] = mod_reduce(r.q[i] + b.q[i], shape.d);
  }
  return r;
}

PhasePoint point_neg(const SystemShape& shape, const PhasePoint& a) {
  PhasePoint r = a;
  for (long long i = 0; i < shape.n; ++i) {
    r.p[i] = mod_reduce(-r.p[i], shape.d);
    r.q[i] = mod_reduce(-r.q[i], shape.d);
  }
  return r;
}

PhasePoint point_scale(const SystemShape& shape, long long c, const PhasePoint& a) {
  PhasePoint r = a;
  for (long long i = 0; i < shape.n; ++i) {
    r.p[i] = mod_reduce(c * r.p[i], shape.d);
    r.q[i] = mod_reduce(c * r.q[i], shape.d);
  }
  return r;
}

long long point_index(const SystemShape& shape, const PhasePoint& x) {
  long long idx = 0;
  for (long long i = 0; i < shape.n; ++i) idx = idx * shape.d + mod_reduce(x.p[i], shape.d);
  for (long long i = 0; i < shape.n; ++i) idx = idx * shape.d + mod_reduce(x.q[i], shape.d);
  return idx;
}

PhasePoint point_from_index(const SystemShape& shape, long long idx) {
  PhasePoint x(std::vector<long long>(shape.n, 0), std::vector<long long>(shape.n, 0));
  for (long long i = 2 * shape.n - 1; i >= 0; --i) {
    long long digit = idx % shape.d;
    idx /= shape.d;
    if (i >= shape.n) {
      x.q[i - shape.n] = digit;
    } else {
      x.p[i] = digit;
    }
  }
  return x;
}

long long symplectic_form(const SystemShape& shape, const PhasePoint& x, const PhasePoint& y) {
  long long acc = 0;
  for (long long i = 0; i < shape.n; ++i) {
    acc = mod_reduce(acc + x.p[i] * y.q[i] - x.q[i] * y.p[i], shape.d);
  }
  return acc;
}

long long ket_index(const SystemShape& shape, const std::vector<long long>& digits) {
  long long idx = 0;
  for (long long i = 0; i < shape.n; ++i) idx = idx * shape.d + mod_reduce(digits[i], shape.d);
  return idx;
}

std::vector<long long> ket_digits(const SystemShape& shape, long long idx) {
  std::vector<long long> digits(shape.n, 0);
  for (long long i = shape.n - 1; i >= 0; --i) {
    digits[i] = idx % shape.d;
    idx /= shape.d;
  }
  return digits;
}

}  // namespace qconv
