// Magic functionals built on the characteristic function: the mean state and
// magic gap, convergence bounds for iterated self-convolution, doubling and
// tripling constants, the inverse-sumset bound, Ruzsa divergences with the
// associated conjecture checks, and the two-route Ruzsa magic measure.
#pragma once

#include <optional>

#include "qconv/convolution.hpp"
#include "qconv/stabilizer.hpp"

namespace qconv {

struct MeanStateReport {
  DensityMatrix mean;              // M(rho)
  StabilizerGroupDescriptor group; // G_rho, the unimodular support
  long long rank = 0;              // R = d^n / |G|
  double gap = 0.0;                // MG in [0, 1]
  double lambda = 0.0;             // (1 - MG)^2
  double kept_min = 0.0;           // smallest kept modulus
  double discarded_max = 0.0;      // largest discarded modulus (0 when none)
};

// Keep characteristic values with |Xi| >= 1 - unimodular_tol, normalize them
// to unit modulus, rebuild. Throws when the kept support is not a subgroup
// (tolerance misconfiguration or invalid input).
MeanStateReport mean_state(const DensityMatrix& rho, double unimodular_tol = tol::unimodular);

// Zero-mean: the kept characteristic values equal 1, not merely unit modulus.
bool is_zero_mean(const DensityMatrix& rho);

// Conjugate by a Weyl displacement so the result is zero-mean; returns the
// displacement used. Throws (carrying the best candidate's deviation) if the
// search exhausts, which flags numerical-phase edge cases.
std::pair<DensityMatrix, PhasePoint> to_zero_mean(const DensityMatrix& rho);

// D_k = S(M(rho)) - S(convolution power k), k = 1..N; input is zero-meaned
// internally if needed.
std::vector<double> clt_relative_entropy_trace(const DensityMatrix& rho, long long N,
                                               const ConvolutionParams& params);

// log[1 + (1-MG)^{2N-2} (purity * R - 1)] and its looser linear form.
double clt_bound(const MeanStateReport& report, double purity, long long N);
double clt_bound_linear(const MeanStateReport& report, double purity, long long N);

// log[1 + (1-MG)^{N-1} R sqrt(purity - 1/R)]; one bound for every order
// alpha in [1, inf].
double renyi_clt_bound(const MeanStateReport& report, double purity, long long N);

// sqrt(2) (1-MG)^{N-1} sqrt(purity * R - 1), against the trace distance.
double pinsker_trace_bound(const MeanStateReport& report, double purity, long long N);

// exp(S_alpha(rho conv rho) - S_alpha(rho)); the difference variant uses the
// complementary channel. Qubit systems substitute the three-input network.
double doubling_constant(const DensityMatrix& rho, const ConvolutionParams& params,
                         double alpha = 1.0);
double difference_constant(const DensityMatrix& rho, const ConvolutionParams& params,
                           double alpha = 1.0);
double doubling_constant_qubit(const DensityMatrix& rho, double alpha = 1.0);

struct TriplingResult {
  double difference = 0.0;   // S(three-fold output) - S(rho)
  double exponential = 1.0;  // exp of the difference; >= 1 iff stabilizer claim
};
TriplingResult tripling_constant(const DensityMatrix& rho);

// [log R / (log R - log(1 + lambda (R-1)))] * log C; +infinity when the
// denominator degenerates (lambda -> 1). Qubit variant squares lambda.
double qist_bound(double C, const MeanStateReport& report, bool qubit = false);

// D_Rz(rho||sigma) = S_alpha(rho conv sigma) - S_alpha(rho).
double ruzsa_divergence(const DensityMatrix& rho, const DensityMatrix& sigma,
                        const ConvolutionParams& params, double alpha = 1.0);
double symmetrized_ruzsa(const DensityMatrix& rho, const DensityMatrix& sigma,
                         const ConvolutionParams& params, double alpha = 1.0);
// Qubit analog through the three-input network with sigma twice.
double ruzsa_divergence_qubit(const DensityMatrix& rho, const DensityMatrix& sigma,
                              double alpha = 1.0);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double margin() const { return rhs - lhs; }
};

// S(rho conv tau conv sigma) + S(sigma) <= S(rho conv sigma) + S(sigma conv tau),
// the triple convolution associating as (rho conv_{s,t} tau) conv_{l,m} sigma.
InequalityCheck cssa_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                           const DensityMatrix& tau, const TripleConvolutionParams& tparams,
                           double margin_floor = -tol::bound_slack);

// S(rho conv tau) + S(sigma) <= S(rho conv sigma) + S(sigma conv tau).
InequalityCheck triangle_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                               const DensityMatrix& tau, const ConvolutionParams& params,
                               double margin_floor = -tol::bound_slack);

struct CounterexampleReport {
  double super_entropy = 0.0;     // S(z conv x), equals n log d
  double super_inputs = 0.0;      // S(z) + S(x), equals 0
  double super_mixed_dist = 0.0;  // distance of the output from I/d^n
  double sub_entropy = 0.0;       // S(mixed conv mixed), equals n log d
  double sub_inputs = 0.0;        // 2 n log d
  double sub_mixed_dist = 0.0;
  bool pass = false;
};

// The two exact constructions showing the convolution entropy is neither
// subadditive nor superadditive.
CounterexampleReport subadditivity_counterexamples(const SystemShape& shape,
                                                   const ConvolutionParams& params);

struct MagicMeasureResult {
  double value = 0.0;
  long long argmin = -1;  // enumeration index of the minimizer
};

// Minimum Ruzsa divergence over the enumerated pure stabilizer states.
MagicMeasureResult magic_measure_direct(const DensityMatrix& rho,
                                        const std::optional<ConvolutionParams>& params,
                                        const std::vector<CatalogEntry>& stab_set);

// Alternative route: min over MSPS sigma of the relative entropy between rho
// and its iterated convolution with sigma (iterated until the dilation D
// closes, which lands exactly on the projection onto sigma's group algebra).
MagicMeasureResult magic_measure_msps(const DensityMatrix& rho,
                                      const std::optional<ConvolutionParams>& params,
                                      const std::vector<MspsEntry>& msps_set);

}  // namespace qconv
