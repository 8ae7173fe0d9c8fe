// Qudit and qubit convolutions.
//
// The two-input qudit convolution acts as rho (x) sigma -> Tr_B{U (rho ⊗ sigma) U^dag}
// with U|i,j> = |si+tj, -ti+sj> componentwise mod d, s^2+t^2 = 1 mod d and
// s,t nonzero. The dense path exploits the permutation structure of U:
// with (i,j) = (sa-tb, ta+sb) the partial trace collapses to an index-space
// summation and no d^{2n}-dimensional matrix is ever materialized. The fast
// path multiplies characteristic functions pointwise instead.
//
// Qubits have no valid (s,t); they use a CNOT network on K registers
// (fan-out from register 1, then fan-in onto register 1; rightmost factor of
// the operator product acts first).
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qconv/states.hpp"

namespace qconv {

struct ConvolutionParams {
  long long d = 0;
  long long s = 0;
  long long t = 0;

  bool balanced() const { return s == t; }
};

struct TripleConvolutionParams {
  ConvolutionParams base;  // balanced: s == t
  long long l = 0;
  long long m = 0;  // m = l*s mod d, l^2 + m^2 = 1 mod d, l,m nonzero
};

// Exhaustive search over nonzero residue pairs; lexicographically smallest
// hit, or empty when no pair works (d in {2,3,5} for example).
std::optional<ConvolutionParams> search_params(long long d, bool balanced);
std::optional<TripleConvolutionParams> search_triple_params(long long d);

// Throwing variants for callers that require feasibility.
ConvolutionParams find_params(long long d, bool balanced = false);
TripleConvolutionParams find_triple_params(long long d);

void validate_params(const ConvolutionParams& params);

// The permutation unitary on 2n qudits.
DenseOperator conv_unitary(const ConvolutionParams& params, long long n);

DensityMatrix convolve(const DensityMatrix& rho, const DensityMatrix& sigma,
                       const ConvolutionParams& params);

// Characteristic-function route: Xi_out(x) = Xi_rho(s x) Xi_sigma(t x).
DensityMatrix convolve_fast(const DensityMatrix& rho, const DensityMatrix& sigma,
                            const ConvolutionParams& params);

// Complementary channel: trace over subsystem A instead of B.
DensityMatrix complementary_convolve(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     const ConvolutionParams& params);

// CNOT network V on K registers of n qubits each (d = 2 only).
DenseOperator qubit_key_unitary(long long K, long long n);

// Tr_{2..K}{V (rho_1 ⊗ ... ⊗ rho_K) V^dag}; dense path.
DensityMatrix qubit_convolve(const std::vector<DensityMatrix>& states);

// Pointwise Xi product route; requires odd K (even K drops register 1's
// input from the output sum and the product identity fails).
DensityMatrix qubit_convolve_fast(const std::vector<DensityMatrix>& states);

// Left fold rho_{k+1} = rho_k (x) rho; returns [rho_1, ..., rho_N].
std::vector<DensityMatrix> iterate_convolution(const DensityMatrix& rho, long long N,
                                               const ConvolutionParams& params);

// Qubit trajectory over odd copy counts k = 1, 3, ..., N via the fast path.
std::vector<std::pair<long long, DensityMatrix>> iterate_convolution_qubit(
    const DensityMatrix& rho, long long N);

}  // namespace qconv
