#include "qconv/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace qconv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shapes(const DensityMatrix& a, const DensityMatrix& b, const char* who) {
  if (a.shape() != b.shape()) {
    throw validation_error(std::string(who) + ": shape mismatch");
  }
}

}  // namespace

Spectrum spectrum(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.m(), Eigen::EigenvaluesOnly);
  Spectrum spec;
  spec.dim = rho.shape().dim;
  spec.eigenvalues.reserve(static_cast<size_t>(spec.dim));
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
    double v = es.eigenvalues()[i];
    if (v < 0.0) {
      if (v < -tol::eig_clamp) {
        throw validation_error("spectrum: eigenvalue " + std::to_string(v) +
                               " below the clamp window, input is not a state");
      }
      v = 0.0;
    }
    spec.eigenvalues.push_back(v);
  }
  return spec;
}

double von_neumann(const Spectrum& spec) {
  double s = 0.0;
  for (double v : spec.eigenvalues) {
    if (v > 0.0) s -= v * std::log(v);
  }
  return s < 0.0 ? 0.0 : s;  // -0.0 guard for pure states
}

double von_neumann(const DensityMatrix& rho) { return von_neumann(spectrum(rho)); }

double renyi(const Spectrum& spec, double alpha) {
  if (alpha < 0.0) {
    throw validation_error("renyi: alpha must be nonnegative");
  }
  if (alpha == 1.0) return von_neumann(spec);
  if (std::isinf(alpha)) return -std::log(spec.max());
  if (alpha == 0.0) {
    long long rank = 0;
    for (double v : spec.eigenvalues) {
      if (v > tol::support) ++rank;
    }
    return std::log(static_cast<double>(rank));
  }
  double acc = 0.0;
  for (double v : spec.eigenvalues) {
    if (v > 0.0) acc += std::pow(v, alpha);
  }
  return std::log(acc) / (1.0 - alpha);
}

double renyi(const DensityMatrix& rho, double alpha) { return renyi(spectrum(rho), alpha); }

namespace {

struct SigmaEigs {
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  std::vector<long long> support;

  explicit SigmaEigs(const DensityMatrix& sigma) : es(sigma.m()) {
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (es.eigenvalues()[i] > tol::support) support.push_back(i);
    }
  }

  // Mass of rho outside sigma's support.
  double kernel_mass(const DensityMatrix& rho) const {
    double mass = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (es.eigenvalues()[i] <= tol::support) {
        const Vector v = es.eigenvectors().col(i);
        mass += (v.adjoint() * rho.m() * v)(0, 0).real();
      }
    }
    return mass;
  }

  // sigma^power restricted to the support (kernel components map to 0).
  Matrix fractional_power(double power) const {
    const Eigen::Index dim = es.eigenvalues().size();
    Matrix out = Matrix::Zero(dim, dim);
    for (long long i : support) {
      out += std::pow(es.eigenvalues()[i], power) * es.eigenvectors().col(i) *
             es.eigenvectors().col(i).adjoint();
    }
    return out;
  }
};

}  // namespace

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_shapes(rho, sigma, "relative_entropy");
  const SigmaEigs se(sigma);
  if (se.kernel_mass(rho) > tol::support) return kInf;
  double tr_rho_log_sigma = 0.0;
  for (long long i : se.support) {
    const Vector v = se.es.eigenvectors().col(i);
    const double weight = (v.adjoint() * rho.m() * v)(0, 0).real();
    tr_rho_log_sigma += weight * std::log(se.es.eigenvalues()[i]);
  }
  const double d = -von_neumann(rho) - tr_rho_log_sigma;
  return d < 0.0 ? 0.0 : d;
}

double max_relative(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_shapes(rho, sigma, "max_relative");
  const SigmaEigs se(sigma);
  if (se.kernel_mass(rho) > tol::support) return kInf;
  const Matrix half = se.fractional_power(-0.5);
  Eigen::SelfAdjointEigenSolver<Matrix> es(half * rho.m() * half, Eigen::EigenvaluesOnly);
  return std::log(es.eigenvalues().maxCoeff());
}

double renyi_relative(const DensityMatrix& rho, const DensityMatrix& sigma, double alpha) {
  check_shapes(rho, sigma, "renyi_relative");
  if (alpha < 1.0) {
    throw validation_error("renyi_relative: alpha must be >= 1");
  }
  if (alpha == 1.0) return relative_entropy(rho, sigma);
  if (std::isinf(alpha)) return max_relative(rho, sigma);
  const SigmaEigs se(sigma);
  if (se.kernel_mass(rho) > tol::support) return kInf;
  const Matrix sand = se.fractional_power((1.0 - alpha) / (2.0 * alpha));
  Eigen::SelfAdjointEigenSolver<Matrix> es(sand * rho.m() * sand, Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double a = es.eigenvalues()[i];
    if (a > 0.0) acc += std::pow(a, alpha);
  }
  const double d = std::log(acc) / (alpha - 1.0);
  return d < 0.0 && d > -tol::support ? 0.0 : d;
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_shapes(rho, sigma, "trace_distance");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.m() - sigma.m(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qconv
