// Ground-truth enumeration of stabilizer states for small systems.
//
// Strategy: enumerate isotropic subspaces of the phase space by canonical
// row-echelon bases, then attach every character (eigenvalue assignment) to
// each subspace and build the projector. This is independent of the Clifford
// generator set, which is itself under test here.
#pragma once

#include "qconv/states.hpp"

namespace qconv {

struct CatalogEntry {
  DensityMatrix state;
  StabilizerGroupDescriptor group;
};

struct MspsEntry {
  DensityMatrix state;
  StabilizerGroupDescriptor group;
  long long rank = 0;  // d^{n-r}
};

struct StabilizerCatalog {
  SystemShape shape;
  std::vector<CatalogEntry> pure_states;
  std::vector<MspsEntry> msps;
};

// d^n * prod_{k=1..n} (d^k + 1)
long long pure_stabilizer_count_formula(const SystemShape& shape);

// All pure stabilizer states. Budget: n <= 2, d^n <= 64, predicted catalog
// size <= 4096 (d=7, n=2 is refused: 19600 states).
StabilizerCatalog enumerate_pure_stabilizers(const SystemShape& shape);

// All MSPS with r independent generators, r = n down to n - max_rank_exponent;
// r = 0 contributes the maximally mixed state.
std::vector<MspsEntry> enumerate_msps(const SystemShape& shape, long long max_rank_exponent);

// True iff the state is pure and its characteristic support is a subgroup of
// exactly d^n unimodular points.
bool is_stabilizer_pure(const DensityMatrix& psi);

// Fourier, quadratic-phase, and (n = 2) SUM gates, each verified to map every
// Weyl generator to a Weyl operator up to phase before being returned.
std::vector<DenseOperator> clifford_generators(const SystemShape& shape);

// Seeded product of generator words (length <= max_len), for invariance tests.
DenseOperator random_clifford_word(const SystemShape& shape, long long max_len,
                                   std::uint64_t seed);

inline DensityMatrix conjugate(const DensityMatrix& rho, const DenseOperator& u) {
  return make_density(u.m * rho.m() * u.m.adjoint(), rho.shape());
}

// Write every entry as a state file plus a manifest with group metadata.
void export_catalog(const StabilizerCatalog& catalog, const std::string& dir);

}  // namespace qconv
