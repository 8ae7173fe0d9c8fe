#include "qconv/convolution.hpp"

#include <string>

namespace qconv {

std::optional<ConvolutionParams> search_params(long long d, bool balanced) {
  if (!is_prime(d)) {
    throw validation_error("search_params: d = " + std::to_string(d) + " is not prime");
  }
  for (long long s = 1; s < d; ++s) {
    for (long long t = 1; t < d; ++t) {
      if (balanced && s != t) continue;
      if (mod_reduce(s * s + t * t, d) == 1) {
        return ConvolutionParams{d, s, t};
      }
    }
  }
  return std::nullopt;
}

ConvolutionParams find_params(long long d, bool balanced) {
  auto p = search_params(d, balanced);
  if (!p) {
    throw no_valid_params("find_params: no nonzero (s,t) with s^2+t^2 = 1 mod " +
                          std::to_string(d) + (balanced ? " under s = t" : ""));
  }
  return *p;
}

std::optional<TripleConvolutionParams> search_triple_params(long long d) {
  auto base = search_params(d, /*balanced=*/true);
  if (!base) return std::nullopt;
  // m is forced to l*s; scan l for the unit-circle condition.
  for (long long l = 1; l < d; ++l) {
    const long long m = mod_reduce(l * base->s, d);
    if (m == 0) continue;
    if (mod_reduce(l * l + m * m, d) == 1) {
      return TripleConvolutionParams{*base, l, m};
    }
  }
  return std::nullopt;
}

TripleConvolutionParams find_triple_params(long long d) {
  auto p = search_triple_params(d);
  if (!p) {
    throw no_valid_params("find_triple_params: no balanced (s,t) plus (l, m=ls) with "
                          "l^2+m^2 = 1 mod " + std::to_string(d));
  }
  return *p;
}

void validate_params(const ConvolutionParams& params) {
  if (!is_prime(params.d)) {
    throw validation_error("ConvolutionParams: d = " + std::to_string(params.d) +
                           " is not prime");
  }
  if (params.s % params.d == 0 || params.t % params.d == 0) {
    throw validation_error("ConvolutionParams: s and t must be nonzero mod d");
  }
  if (mod_reduce(params.s * params.s + params.t * params.t, params.d) != 1) {
    throw validation_error("ConvolutionParams: s^2 + t^2 != 1 mod " + std::to_string(params.d));
  }
}

namespace {

std::vector<std::vector<long long>> digit_table(const SystemShape& shape) {
  std::vector<std::vector<long long>> t(shape.dim);
  for (long long k = 0; k < shape.dim; ++k) t[k] = ket_digits(shape, k);
  return t;
}

void check_conv_inputs(const DensityMatrix& rho, const DensityMatrix& sigma,
                       const ConvolutionParams& params, const char* who) {
  validate_params(params);
  if (rho.shape() != sigma.shape()) {
    throw validation_error(std::string(who) + ": input shapes differ");
  }
  if (rho.shape().d != params.d) {
    throw validation_error(std::string(who) + ": params are for d = " +
                           std::to_string(params.d) + " but states have d = " +
                           std::to_string(rho.shape().d));
  }
}

}  // namespace

DenseOperator conv_unitary(const ConvolutionParams& params, long long n) {
  validate_params(params);
  const SystemShape small(params.d, n);
  const SystemShape big(params.d, 2 * n);  // budget check happens here
  const long long dim = small.dim;
  Matrix u = Matrix::Zero(big.dim, big.dim);
  const auto dig = digit_table(small);
  std::vector<long long> a(n), b(n);
  for (long long i = 0; i < dim; ++i) {
    for (long long j = 0; j < dim; ++j) {
      for (long long k = 0; k < n; ++k) {
        a[k] = mod_reduce(params.s * dig[i][k] + params.t * dig[j][k], params.d);
        b[k] = mod_reduce(-params.t * dig[i][k] + params.s * dig[j][k], params.d);
      }
      u(ket_index(small, a) * dim + ket_index(small, b), i * dim + j) = 1.0;
    }
  }
  return DenseOperator(std::move(u), big);
}

namespace {

// enc(ca * digits(a) + cb * digits(b)) componentwise mod d
long long combine_index(const SystemShape& shape, const std::vector<std::vector<long long>>& dig,
                        long long ca, long long a, long long cb, long long b) {
  long long idx = 0;
  for (long long i = 0; i < shape.n; ++i) {
    idx = idx * shape.d + mod_reduce(ca * dig[a][i] + cb * dig[b][i], shape.d);
  }
  return idx;
}

}  // namespace

DensityMatrix convolve(const DensityMatrix& rho, const DensityMatrix& sigma,
                       const ConvolutionParams& params) {
  check_conv_inputs(rho, sigma, params, "convolve");
  const SystemShape& shape = rho.shape();
  const long long dim = shape.dim;
  const auto dig = digit_table(shape);
  const long long s = params.s;
  const long long t = params.t;
  Matrix out = Matrix::Zero(dim, dim);
  for (long long a = 0; a < dim; ++a) {
    for (long long a2 = 0; a2 < dim; ++a2) {
      cplx acc = 0;
      for (long long b = 0; b < dim; ++b) {
        const long long ra = combine_index(shape, dig, s, a, -t, b);
        const long long ra2 = combine_index(shape, dig, s, a2, -t, b);
        const long long sa = combine_index(shape, dig, t, a, s, b);
        const long long sa2 = combine_index(shape, dig, t, a2, s, b);
        acc += rho.m()(ra, ra2) * sigma.m()(sa, sa2);
      }
      out(a, a2) = acc;
    }
  }
  return make_density(std::move(out), shape);
}

DensityMatrix complementary_convolve(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     const ConvolutionParams& params) {
  check_conv_inputs(rho, sigma, params, "complementary_convolve");
  const SystemShape& shape = rho.shape();
  const long long dim = shape.dim;
  const auto dig = digit_table(shape);
  const long long s = params.s;
  const long long t = params.t;
  Matrix out = Matrix::Zero(dim, dim);
  for (long long b = 0; b < dim; ++b) {
    for (long long b2 = 0; b2 < dim; ++b2) {
      cplx acc = 0;
      for (long long a = 0; a < dim; ++a) {
        const long long ra = combine_index(shape, dig, s, a, -t, b);
        const long long ra2 = combine_index(shape, dig, s, a, -t, b2);
        const long long sa = combine_index(shape, dig, t, a, s, b);
        const long long sa2 = combine_index(shape, dig, t, a, s, b2);
        acc += rho.m()(ra, ra2) * sigma.m()(sa, sa2);
      }
      out(b, b2) = acc;
    }
  }
  return make_density(std::move(out), shape);
}

DensityMatrix convolve_fast(const DensityMatrix& rho, const DensityMatrix& sigma,
                            const ConvolutionParams& params) {
  check_conv_inputs(rho, sigma, params, "convolve_fast");
  const SystemShape& shape = rho.shape();
  const CharacteristicFunction xr = char_function(rho);
  const CharacteristicFunction xs = char_function(sigma);
  Vector values(shape.phase_points());
  for (long long idx = 0; idx < shape.phase_points(); ++idx) {
    const PhasePoint x = point_from_index(shape, idx);
    const long long is = point_index(shape, point_scale(shape, params.s, x));
    const long long it = point_index(shape, point_scale(shape, params.t, x));
    values[idx] = xr.values[is] * xs.values[it];
  }
  return make_density(inverse_char(CharacteristicFunction(std::move(values), shape)).m, shape);
}

// ---------------------------------------------------------------------------
// Qubit convolution
// ---------------------------------------------------------------------------

namespace {

// Output register values of the CNOT network, as a function of inputs.
// Register 1 collects (K mod 2) x_1 xor x_2 xor ... xor x_K; register i >= 2
// becomes x_i xor x_1. XOR acts bitwise on the packed n-bit registers.
std::vector<long long> key_network_outputs(long long K, const std::vector<long long>& regs) {
  std::vector<long long> out(regs.size());
  long long acc = (K % 2 == 1) ? regs[0] : 0;
  for (long long j = 1; j < K; ++j) acc ^= regs[j];
  out[0] = acc;
  for (long long j = 1; j < K; ++j) out[j] = regs[j] ^ regs[0];
  return out;
}

void unpack_registers(long long idx, long long K, long long n, std::vector<long long>& regs) {
  for (long long j = K - 1; j >= 0; --j) {
    regs[j] = idx & ((1LL << n) - 1);
    idx >>= n;
  }
}

long long pack_registers(const std::vector<long long>& regs, long long n) {
  long long idx = 0;
  for (long long r : regs) idx = (idx << n) | r;
  return idx;
}

// The network fans the X part and the Z part of a Weyl operator out to every
// copy identically, but the local phase i^{p_j q_j} of w enters once per copy
// instead of once. Conjugation therefore reproduces w(p,q)^{otimes K} times
// i^{(1-K) sum_j p_j q_j}. For odd K that is a sign on the points with an odd
// number of Y-type components, and it vanishes when K = 1 (mod 4). The fast
// characteristic-function routes must carry this sign to agree with the
// partial-trace definition.
void apply_key_network_phase(const SystemShape& shape, long long K, Vector& values) {
  if (((K - 1) / 2) % 2 == 0) return;
  for (long long idx = 0; idx < shape.phase_points(); ++idx) {
    const PhasePoint x = point_from_index(shape, idx);
    long long m = 0;
    for (size_t j = 0; j < x.p.size(); ++j) m += x.p[j] * x.q[j];
    if (m % 2 == 1) values[idx] = -values[idx];
  }
}

}  // namespace

DenseOperator qubit_key_unitary(long long K, long long n) {
  if (K < 2) {
    throw validation_error("qubit_key_unitary: need at least two registers");
  }
  const SystemShape big(2, K * n);  // budget check
  Matrix u = Matrix::Zero(big.dim, big.dim);
  std::vector<long long> regs(K);
  for (long long in = 0; in < big.dim; ++in) {
    unpack_registers(in, K, n, regs);
    u(pack_registers(key_network_outputs(K, regs), n), in) = 1.0;
  }
  return DenseOperator(std::move(u), big);
}

DensityMatrix qubit_convolve(const std::vector<DensityMatrix>& states) {
  if (states.empty()) {
    throw validation_error("qubit_convolve: empty input list");
  }
  const SystemShape& shape = states.front().shape();
  if (shape.d != 2) {
    throw validation_error("qubit_convolve: requires d = 2");
  }
  for (const auto& st : states) {
    if (st.shape() != shape) throw validation_error("qubit_convolve: input shapes differ");
  }
  const long long K = static_cast<long long>(states.size());
  const long long n = shape.n;
  const SystemShape big(2, K * n);  // budget check
  Matrix prod = states[0].m();
  for (size_t i = 1; i < states.size(); ++i) prod = kron(prod, states[i].m());
  // Conjugate by the permutation via index remapping, then trace out
  // registers 2..K (register 1 is the most significant block).
  std::vector<long long> perm(big.dim);
  std::vector<long long> regs(K);
  for (long long in = 0; in < big.dim; ++in) {
    unpack_registers(in, K, n, regs);
    perm[in] = pack_registers(key_network_outputs(K, regs), n);
  }
  Matrix conj(big.dim, big.dim);
  for (long long i = 0; i < big.dim; ++i)
    for (long long j = 0; j < big.dim; ++j) conj(perm[i], perm[j]) = prod(i, j);
  return make_density(trace_out_tail(conj, shape.dim, big.dim / shape.dim), shape);
}

DensityMatrix qubit_convolve_fast(const std::vector<DensityMatrix>& states) {
  if (states.empty()) {
    throw validation_error("qubit_convolve_fast: empty input list");
  }
  if (states.size() % 2 == 0) {
    throw validation_error("qubit_convolve_fast: characteristic-function route needs odd K");
  }
  const SystemShape& shape = states.front().shape();
  if (shape.d != 2) {
    throw validation_error("qubit_convolve_fast: requires d = 2");
  }
  Vector values = Vector::Ones(shape.phase_points());
  for (const auto& st : states) {
    if (st.shape() != shape) throw validation_error("qubit_convolve_fast: input shapes differ");
    values = values.cwiseProduct(char_function(st).values);
  }
  apply_key_network_phase(shape, static_cast<long long>(states.size()), values);
  return make_density(inverse_char(CharacteristicFunction(std::move(values), shape)).m, shape);
}

std::vector<DensityMatrix> iterate_convolution(const DensityMatrix& rho, long long N,
                                               const ConvolutionParams& params) {
  if (N < 1) {
    throw validation_error("iterate_convolution: N must be >= 1");
  }
  std::vector<DensityMatrix> trajectory;
  trajectory.reserve(static_cast<size_t>(N));
  trajectory.push_back(rho);
  for (long long k = 2; k <= N; ++k) {
    trajectory.push_back(convolve(trajectory.back(), rho, params));
  }
  return trajectory;
}

std::vector<std::pair<long long, DensityMatrix>> iterate_convolution_qubit(
    const DensityMatrix& rho, long long N) {
  if (rho.shape().d != 2) {
    throw validation_error("iterate_convolution_qubit: requires d = 2");
  }
  if (N < 1 || N % 2 == 0) {
    throw validation_error("iterate_convolution_qubit: N must be odd and >= 1");
  }
  const SystemShape& shape = rho.shape();
  const CharacteristicFunction xi = char_function(rho);
  std::vector<std::pair<long long, DensityMatrix>> trajectory;
  for (long long k = 1; k <= N; k += 2) {
    Vector values(shape.phase_points());
    for (long long idx = 0; idx < shape.phase_points(); ++idx) {
      // integer power by repeated multiplication; std::pow would NaN at 0
      cplx v = 1.0;
      for (long long r = 0; r < k; ++r) v *= xi.values[idx];
      values[idx] = v;
    }
    apply_key_network_phase(shape, k, values);
    trajectory.emplace_back(
        k, make_density(inverse_char(CharacteristicFunction(std::move(values), shape)).m, shape));
  }
  return trajectory;
}

}  // namespace qconv
