// Density matrices: construction, validation, stabilizer projectors, seeded
// random ensembles, and the versioned state file format.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qconv/weyl.hpp"

namespace qconv {

struct DensityMatrix {
  DenseOperator op;

  DensityMatrix() = default;
  explicit DensityMatrix(DenseOperator o) : op(std::move(o)) {}

  const SystemShape& shape() const { return op.shape; }
  const Matrix& m() const { return op.m; }
};

// Throws validation_error naming the violated invariant ("hermiticity",
// "trace", "positivity") together with the offending magnitude.
void validate_density(const Matrix& m, const SystemShape& shape);

// Validate-and-wrap; every constructor below goes through this.
DensityMatrix make_density(Matrix m, const SystemShape& shape);

// A stabilizer group given by generators; each generator pairs a phase point
// with the eigenvalue exponent e, meaning the state satisfies
// w(x) psi = omega_d^e psi.
struct StabilizerGroupDescriptor {
  std::vector<std::pair<PhasePoint, long long>> generators;
  long long order = 1;  // group size d^r
};

DensityMatrix pure_state(const SystemShape& shape, const Vector& vec);
DensityMatrix maximally_mixed(const SystemShape& shape);

// Projector onto the joint eigenspace, normalized to unit trace. Pure for
// r = n independent generators, an MSPS of rank d^{n-r} otherwise.
DensityMatrix stabilizer_from_generators(const SystemShape& shape,
                                         const StabilizerGroupDescriptor& gens);

// +1 eigenstates of all Z (resp. all X) operators.
DensityMatrix z_eigenstate(const SystemShape& shape);
DensityMatrix x_eigenstate(const SystemShape& shape);

// Ginibre construction G G^dag / Tr with G of width `rank`; deterministic per
// (shape, rank, seed).
DensityMatrix random_density(const SystemShape& shape, long long rank, std::uint64_t seed);
DensityMatrix random_pure(const SystemShape& shape, std::uint64_t seed);

void save_state(const DensityMatrix& rho, const std::string& path);
DensityMatrix load_state(const std::string& path);

inline CharacteristicFunction char_function(const DensityMatrix& rho) {
  return char_function(rho.op);
}

inline double purity(const DensityMatrix& rho) {
  return (rho.m() * rho.m()).trace().real();
}

}  // namespace qconv
