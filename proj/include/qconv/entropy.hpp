// Entropic functionals. Natural logarithm throughout; alpha = 1 and
// alpha = infinity are dedicated code paths, never naive formula evaluation.
#pragma once

#include "qconv/states.hpp"

namespace qconv {

struct Spectrum {
  std::vector<double> eigenvalues;  // descending, clamped to >= 0
  long long dim = 0;

  double max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
};

// Eigenvalues in [-eig_clamp, 0) are clamped to 0; anything more negative is
// a hard validation error (the input was never a state).
Spectrum spectrum(const DensityMatrix& rho);

double von_neumann(const DensityMatrix& rho);
double von_neumann(const Spectrum& spec);

// S_alpha = log(sum lambda^alpha) / (1 - alpha); alpha in [0, inf].
double renyi(const DensityMatrix& rho, double alpha);
double renyi(const Spectrum& spec, double alpha);

// D(rho||sigma) on sigma's support; +infinity on support violation.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

// Sandwiched form for alpha >= 1; dispatches to relative_entropy at alpha = 1
// and to max_relative at alpha = infinity.
double renyi_relative(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha);

// D_inf = log of the largest eigenvalue of sigma^{-1/2} rho sigma^{-1/2}.
double max_relative(const DensityMatrix& rho, const DensityMatrix& sigma);

// Sum of absolute eigenvalues of rho - sigma; in [0, 2].
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace qconv
