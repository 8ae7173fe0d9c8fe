#include "qconv/magic.hpp"

#include <cmath>
#include <limits>

#include "qconv/entropy.hpp"

namespace qconv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Greedy generator extraction from a subgroup given as an index set; phases
// read off the characteristic values (eigenvalue exponent e satisfies
// Xi(x) = omega^{-e}).
StabilizerGroupDescriptor extract_group(const SystemShape& shape,
                                        const std::vector<long long>& kept,
                                        const CharacteristicFunction& xi) {
  StabilizerGroupDescriptor desc;
  desc.order = static_cast<long long>(kept.size());
  std::vector<bool> in_span(static_cast<size_t>(shape.phase_points()), false);
  in_span[0] = true;
  std::vector<PhasePoint> span_points{zero_point(shape)};
  for (long long idx : kept) {
    if (in_span[static_cast<size_t>(idx)]) continue;
    const PhasePoint g = point_from_index(shape, idx);
    const double step = 2.0 * kPi / static_cast<double>(shape.d);
    double arg = std::arg(xi.values[idx]);
    if (arg < 0) arg += 2.0 * kPi;
    const double raw = arg / step;
    const long long e_xi = mod_reduce(llround(raw), shape.d);
    if (std::abs(raw - std::round(raw)) > 1e-5) {
      throw validation_error("mean_state: kept phase is not a d-th root of unity (residual " +
                             std::to_string(std::abs(raw - std::round(raw))) + ")");
    }
    desc.generators.emplace_back(g, mod_reduce(-e_xi, shape.d));
    // extend the span by all multiples of g
    std::vector<PhasePoint> extended = span_points;
    for (long long c = 1; c < shape.d; ++c) {
      const PhasePoint cg = point_scale(shape, c, g);
      for (const auto& s : span_points) {
        const PhasePoint sum = point_add(shape, s, cg);
        const long long si = point_index(shape, sum);
        if (!in_span[static_cast<size_t>(si)]) {
          in_span[static_cast<size_t>(si)] = true;
          extended.push_back(sum);
        }
      }
    }
    span_points = std::move(extended);
  }
  return desc;
}

}  // namespace

MeanStateReport mean_state(const DensityMatrix& rho, double unimodular_tol) {
  if (unimodular_tol <= 0.0 || unimodular_tol >= 0.5) {
    throw validation_error("mean_state: unimodular_tol must lie in (0, 0.5)");
  }
  const SystemShape& shape = rho.shape();
  const CharacteristicFunction xi = char_function(rho);
  std::vector<long long> kept;
  double kept_min = 1.0;
  double discarded_max = 0.0;
  for (long long idx = 0; idx < shape.phase_points(); ++idx) {
    const double mag = std::abs(xi.values[idx]);
    if (mag >= 1.0 - unimodular_tol) {
      kept.push_back(idx);
      if (mag < kept_min) kept_min = mag;
    } else if (mag > tol::support && mag > discarded_max) {
      discarded_max = mag;
    }
  }
  // subgroup closure of the kept support
  std::vector<bool> in_kept(static_cast<size_t>(shape.phase_points()), false);
  for (long long idx : kept) in_kept[static_cast<size_t>(idx)] = true;
  for (long long a : kept) {
    const PhasePoint pa = point_from_index(shape, a);
    for (long long b : kept) {
      const PhasePoint sum = point_add(shape, pa, point_from_index(shape, b));
      if (!in_kept[static_cast<size_t>(point_index(shape, sum))]) {
        throw validation_error(
            "mean_state: kept support is not closed under addition; check unimodular_tol "
            "against the discarded maximum " + std::to_string(discarded_max));
      }
    }
  }
  if (shape.dim % static_cast<long long>(kept.size()) != 0) {
    throw validation_error("mean_state: kept support size " + std::to_string(kept.size()) +
                           " does not divide dim " + std::to_string(shape.dim));
  }
  Vector values = Vector::Zero(shape.phase_points());
  for (long long idx : kept) {
    values[idx] = xi.values[idx] / std::abs(xi.values[idx]);
  }
  MeanStateReport report;
  report.mean = make_density(
      inverse_char(CharacteristicFunction(std::move(values), shape)).m, shape);
  report.group = extract_group(shape, kept, xi);
  report.rank = shape.dim / static_cast<long long>(kept.size());
  report.gap = discarded_max > 0.0 ? 1.0 - discarded_max : 0.0;
  report.lambda = (1.0 - report.gap) * (1.0 - report.gap);
  report.kept_min = kept_min;
  report.discarded_max = discarded_max;
  return report;
}

bool is_zero_mean(const DensityMatrix& rho) {
  const SystemShape& shape = rho.shape();
  const CharacteristicFunction xi = char_function(rho);
  for (long long idx = 0; idx < shape.phase_points(); ++idx) {
    const double mag = std::abs(xi.values[idx]);
    if (mag >= 1.0 - tol::unimodular && std::abs(xi.values[idx] - cplx(1.0, 0.0)) > 1e-8) {
      return false;
    }
  }
  return true;
}

std::pair<DensityMatrix, PhasePoint> to_zero_mean(const DensityMatrix& rho) {
  const SystemShape& shape = rho.shape();
  if (is_zero_mean(rho)) {
    return {rho, zero_point(shape)};
  }
  const CharacteristicFunction xi = char_function(rho);
  std::vector<long long> kept;
  for (long long idx = 0; idx < shape.phase_points(); ++idx) {
    if (std::abs(xi.values[idx]) >= 1.0 - tol::unimodular) kept.push_back(idx);
  }
  // Conjugating by w(z) multiplies Xi(y) by omega^{<z,y>}; look for z that
  // cancels every kept phase.
  double best_dev = kInf;
  PhasePoint best = zero_point(shape);
  for (long long zi = 0; zi < shape.phase_points(); ++zi) {
    const PhasePoint z = point_from_index(shape, zi);
    double dev = 0.0;
    for (long long idx : kept) {
      const long long e = symplectic_form(shape, z, point_from_index(shape, idx));
      const cplx rotated =
          xi.values[idx] * std::polar(1.0, 2.0 * kPi * static_cast<double>(e) /
                                               static_cast<double>(shape.d));
      dev = std::max(dev, std::abs(rotated - cplx(1.0, 0.0)));
    }
    if (dev < best_dev) {
      best_dev = dev;
      best = z;
    }
    if (dev <= 1e-8) {
      const Matrix u = weyl(shape, z).m;
      return {make_density(u * rho.m() * u.adjoint(), shape), z};
    }
  }
  throw validation_error("to_zero_mean: no displacement cancels the mean phases; best "
                         "candidate deviation " + std::to_string(best_dev));
}

std::vector<double> clt_relative_entropy_trace(const DensityMatrix& rho, long long N,
                                               const ConvolutionParams& params) {
  const DensityMatrix zm = to_zero_mean(rho).first;
  const MeanStateReport report = mean_state(zm);
  const double s_mean = von_neumann(report.mean);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(N));
  for (const auto& state : iterate_convolution(zm, N, params)) {
    out.push_back(s_mean - von_neumann(state));
  }
  return out;
}

double clt_bound(const MeanStateReport& report, double purity, long long N) {
  return std::log1p(clt_bound_linear(report, purity, N));
}

double clt_bound_linear(const MeanStateReport& report, double purity, long long N) {
  const double decay = std::pow(1.0 - report.gap, 2.0 * static_cast<double>(N) - 2.0);
  return decay * (purity * static_cast<double>(report.rank) - 1.0);
}

double renyi_clt_bound(const MeanStateReport& report, double purity, long long N) {
  const double r = static_cast<double>(report.rank);
  const double radical = std::max(0.0, purity - 1.0 / r);
  const double decay = std::pow(1.0 - report.gap, static_cast<double>(N) - 1.0);
  return std::log1p(decay * r * std::sqrt(radical));
}

double pinsker_trace_bound(const MeanStateReport& report, double purity, long long N) {
  const double excess = std::max(0.0, purity * static_cast<double>(report.rank) - 1.0);
  const double decay = std::pow(1.0 - report.gap, static_cast<double>(N) - 1.0);
  return std::sqrt(2.0) * decay * std::sqrt(excess);
}

double doubling_constant(const DensityMatrix& rho, const ConvolutionParams& params,
                         double alpha) {
  return std::exp(renyi(convolve(rho, rho, params), alpha) - renyi(rho, alpha));
}

double difference_constant(const DensityMatrix& rho, const ConvolutionParams& params,
                           double alpha) {
  return std::exp(renyi(complementary_convolve(rho, rho, params), alpha) - renyi(rho, alpha));
}

double doubling_constant_qubit(const DensityMatrix& rho, double alpha) {
  const DensityMatrix out = qubit_convolve_fast({rho, rho, rho});
  return std::exp(renyi(out, alpha) - renyi(rho, alpha));
}

TriplingResult tripling_constant(const DensityMatrix& rho) {
  if (rho.shape().d != 2) {
    throw validation_error("tripling_constant: defined for qubit systems only");
  }
  TriplingResult r;
  r.difference = von_neumann(qubit_convolve_fast({rho, rho, rho})) - von_neumann(rho);
  r.exponential = std::exp(r.difference);
  return r;
}

double qist_bound(double C, const MeanStateReport& report, bool qubit) {
  if (C < 1.0 - tol::bound_slack) {
    throw validation_error("qist_bound: C = " + std::to_string(C) +
                           " is below 1, not a doubling constant");
  }
  const double r = static_cast<double>(report.rank);
  if (report.rank <= 1) return 0.0;  // mean state is the state itself
  const double lambda = qubit ? report.lambda * report.lambda : report.lambda;
  const double denom = std::log(r) - std::log1p(lambda * (r - 1.0));
  if (denom <= 0.0) return kInf;  // unbounded regime
  return (std::log(r) / denom) * std::log(std::max(C, 1.0));
}

double ruzsa_divergence(const DensityMatrix& rho, const DensityMatrix& sigma,
                        const ConvolutionParams& params, double alpha) {
  return renyi(convolve(rho, sigma, params), alpha) - renyi(rho, alpha);
}

double symmetrized_ruzsa(const DensityMatrix& rho, const DensityMatrix& sigma,
                         const ConvolutionParams& params, double alpha) {
  return 0.5 * (renyi(convolve(rho, sigma, params), alpha) +
                renyi(convolve(sigma, rho, params), alpha) - renyi(rho, alpha) -
                renyi(sigma, alpha));
}

double ruzsa_divergence_qubit(const DensityMatrix& rho, const DensityMatrix& sigma,
                              double alpha) {
  return renyi(qubit_convolve_fast({rho, sigma, sigma}), alpha) - renyi(rho, alpha);
}

InequalityCheck cssa_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                           const DensityMatrix& tau, const TripleConvolutionParams& tparams,
                           double margin_floor) {
  const ConvolutionParams& st = tparams.base;
  const ConvolutionParams lm{st.d, tparams.l, tparams.m};
  InequalityCheck check;
  check.lhs = von_neumann(convolve(convolve(rho, tau, st), sigma, lm)) + von_neumann(sigma);
  check.rhs = von_neumann(convolve(rho, sigma, st)) + von_neumann(convolve(sigma, tau, st));
  check.holds = check.margin() >= margin_floor;
  return check;
}

InequalityCheck triangle_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                               const DensityMatrix& tau, const ConvolutionParams& params,
                               double margin_floor) {
  if (!params.balanced()) {
    throw validation_error("triangle_check: requires balanced parameters (s = t)");
  }
  InequalityCheck check;
  check.lhs = von_neumann(convolve(rho, tau, params)) + von_neumann(sigma);
  check.rhs = von_neumann(convolve(rho, sigma, params)) + von_neumann(convolve(sigma, tau, params));
  check.holds = check.margin() >= margin_floor;
  return check;
}

CounterexampleReport subadditivity_counterexamples(const SystemShape& shape,
                                                   const ConvolutionParams& params) {
  CounterexampleReport report;
  const DensityMatrix z = z_eigenstate(shape);
  const DensityMatrix x = x_eigenstate(shape);
  const DensityMatrix mixed = maximally_mixed(shape);
  const DensityMatrix zx = convolve(z, x, params);
  const DensityMatrix mm = convolve(mixed, mixed, params);
  report.super_entropy = von_neumann(zx);
  report.super_inputs = von_neumann(z) + von_neumann(x);
  report.super_mixed_dist = max_abs_diff(zx.m(), mixed.m());
  report.sub_entropy = von_neumann(mm);
  report.sub_inputs = 2.0 * von_neumann(mixed);
  report.sub_mixed_dist = max_abs_diff(mm.m(), mixed.m());
  const double target = static_cast<double>(shape.n) * std::log(static_cast<double>(shape.d));
  report.pass = std::abs(report.super_entropy - target) < 1e-9 &&
                report.super_inputs < 1e-9 &&
                report.super_mixed_dist < tol::structural &&
                std::abs(report.sub_entropy - target) < 1e-9 &&
                std::abs(report.sub_inputs - 2.0 * target) < 1e-9 &&
                report.sub_mixed_dist < tol::structural;
  return report;
}

namespace {

double one_ruzsa(const DensityMatrix& rho, const DensityMatrix& sigma,
                 const std::optional<ConvolutionParams>& params) {
  if (rho.shape().d == 2) {
    return ruzsa_divergence_qubit(rho, sigma);
  }
  if (!params) {
    throw validation_error("magic measure: qudit systems need convolution parameters");
  }
  return ruzsa_divergence(rho, sigma, *params);
}

}  // namespace

MagicMeasureResult magic_measure_direct(const DensityMatrix& rho,
                                        const std::optional<ConvolutionParams>& params,
                                        const std::vector<CatalogEntry>& stab_set) {
  if (stab_set.empty()) {
    throw validation_error("magic_measure_direct: empty stabilizer set");
  }
  MagicMeasureResult best;
  best.value = kInf;
  for (size_t i = 0; i < stab_set.size(); ++i) {
    const double v = one_ruzsa(rho, stab_set[i].state, params);
    if (v < best.value) {
      best.value = v;
      best.argmin = static_cast<long long>(i);
    }
  }
  return best;
}

MagicMeasureResult magic_measure_msps(const DensityMatrix& rho,
                                      const std::optional<ConvolutionParams>& params,
                                      const std::vector<MspsEntry>& msps_set) {
  if (msps_set.empty()) {
    throw validation_error("magic_measure_msps: empty MSPS set");
  }
  if (rho.shape().d != 2 && !params) {
    throw validation_error("magic_measure_msps: qudit systems need convolution parameters");
  }
  // A single pass ρ ⊠ σ only matches the group pinching up to the eigenvalue
  // relabeling k -> s·k, which relative entropy is not blind to.  Convolving
  // with σ ord(s)-many times closes the relabeling (s^m = 1) and the phase
  // displacements telescope away (1 + s + ... + s^{m-1} = 0 mod d), so the
  // comparison state is exactly the projection of ρ onto σ's group algebra.
  // The qubit network needs the same care: K = 3 would imprint its Y-point
  // sign on the pinched state, while K = 5 carries no network phase and the
  // four copies of σ square its support values to one.
  long long passes = 1;
  if (rho.shape().d != 2) {
    long long acc = params->s % params->d;
    passes = 1;
    while (acc != 1) {
      acc = (acc * params->s) % params->d;
      ++passes;
    }
  }
  MagicMeasureResult best;
  best.value = kInf;
  for (size_t i = 0; i < msps_set.size(); ++i) {
    DensityMatrix conv = rho;
    if (rho.shape().d == 2) {
      const DensityMatrix& s = msps_set[i].state;
      conv = qubit_convolve_fast({rho, s, s, s, s});
    } else {
      for (long long p = 0; p < passes; ++p) {
        conv = convolve_fast(conv, msps_set[i].state, *params);
      }
    }
    const double v = relative_entropy(rho, conv);
    if (v < best.value) {
      best.value = v;
      best.argmin = static_cast<long long>(i);
    }
  }
  return best;
}

}  // namespace qconv
