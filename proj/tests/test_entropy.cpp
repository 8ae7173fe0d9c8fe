#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qconv/entropy.hpp"
#include "qconv/states.hpp"

using namespace qconv;

namespace {

DensityMatrix diag_state(const SystemShape& shape, std::initializer_list<double> probs) {
  Matrix m = Matrix::Zero(shape.dim, shape.dim);
  long long i = 0;
  for (double p : probs) m(i, i) = cplx(p, 0.0), ++i;
  return make_density(std::move(m), shape);
}

}  // namespace

TEST_CASE("von Neumann entropy on frozen spectra") {
  const SystemShape shape(2, 1);
  // - (3/4 log 3/4 + 1/4 log 1/4) = 2 log 2 - (3/4) log 3
  const double expect = 2.0 * std::log(2.0) - 0.75 * std::log(3.0);
  CHECK(von_neumann(diag_state(shape, {0.75, 0.25})) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(von_neumann(diag_state(shape, {1.0, 0.0})) == 0.0);
  CHECK(von_neumann(maximally_mixed(SystemShape(3, 2))) ==
        doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("renyi entropies interpolate the known orders") {
  const SystemShape shape(2, 1);
  const DensityMatrix rho = diag_state(shape, {0.75, 0.25});
  CHECK(renyi(rho, 2.0) == doctest::Approx(-std::log(0.625)).epsilon(1e-12));
  CHECK(renyi(rho, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(-std::log(0.75)).epsilon(1e-12));
  CHECK(renyi(rho, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(renyi(rho, 1.0) == doctest::Approx(von_neumann(rho)).epsilon(1e-12));
  // continuity at alpha = 1 from both sides
  CHECK(renyi(rho, 1.0 - 1e-5) == doctest::Approx(von_neumann(rho)).epsilon(1e-3));
  CHECK(renyi(rho, 1.0 + 1e-5) == doctest::Approx(von_neumann(rho)).epsilon(1e-3));
  CHECK_THROWS_AS(renyi(rho, -0.5), validation_error);
}

TEST_CASE("renyi entropy is nonincreasing in the order") {
  const SystemShape shape(7, 1);
  const DensityMatrix rho = random_density(shape, 7, 2024);
  const double grid[] = {0.0, 0.3, 0.7, 1.0, 1.5, 2.0, 5.0,
                         std::numeric_limits<double>::infinity()};
  double prev = std::numeric_limits<double>::infinity();
  for (double a : grid) {
    const double s = renyi(rho, a);
    CHECK(s <= prev + 1e-10);
    prev = s;
  }
}

TEST_CASE("relative entropy basics") {
  const SystemShape shape(2, 1);
  const DensityMatrix rho = random_density(shape, 2, 11);
  CHECK(relative_entropy(rho, rho) == doctest::Approx(0.0).epsilon(1e-10));

  const DensityMatrix z = diag_state(shape, {1.0, 0.0});
  CHECK(relative_entropy(z, maximally_mixed(shape)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // support violation: sigma misses part of rho's support
  const DensityMatrix wide = diag_state(shape, {0.5, 0.5});
  const DensityMatrix narrow = diag_state(shape, {1.0, 0.0});
  CHECK(std::isinf(relative_entropy(wide, narrow)));
  CHECK(relative_entropy(narrow, wide) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("relative entropy against a dephasing matches the entropy gap") {
  // D(rho || diag(rho)) = S(diag(rho)) - S(rho), a pinching identity the
  // implementation does not special-case
  const SystemShape shape(7, 1);
  for (std::uint64_t seed : {21ULL, 22ULL, 23ULL}) {
    const DensityMatrix rho = random_density(shape, 7, seed);
    Matrix d = Matrix::Zero(7, 7);
    for (long long i = 0; i < 7; ++i) d(i, i) = rho.m()(i, i);
    const DensityMatrix deph = make_density(std::move(d), shape);
    const double lhs = relative_entropy(rho, deph);
    const double rhs = von_neumann(deph) - von_neumann(rho);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("classical divergences agree on commuting diagonals") {
  const SystemShape shape(3, 1);
  const DensityMatrix p = diag_state(shape, {0.5, 0.3, 0.2});
  const DensityMatrix q = diag_state(shape, {0.2, 0.5, 0.3});
  double kl = 0.0, chi = 0.0, maxr = 0.0;
  const double pv[] = {0.5, 0.3, 0.2}, qv[] = {0.2, 0.5, 0.3};
  for (int i = 0; i < 3; ++i) {
    kl += pv[i] * std::log(pv[i] / qv[i]);
    chi += pv[i] * pv[i] / qv[i];
    maxr = std::max(maxr, pv[i] / qv[i]);
  }
  CHECK(relative_entropy(p, q) == doctest::Approx(kl).epsilon(1e-12));
  CHECK(renyi_relative(p, q, 2.0) == doctest::Approx(std::log(chi)).epsilon(1e-12));
  CHECK(max_relative(p, q) == doctest::Approx(std::log(maxr)).epsilon(1e-12));
  CHECK(renyi_relative(p, q, 1.0) == doctest::Approx(kl).epsilon(1e-12));
  CHECK(renyi_relative(p, q, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(std::log(maxr)).epsilon(1e-12));
  CHECK_THROWS_AS(renyi_relative(p, q, 0.5), validation_error);
}

TEST_CASE("renyi relative entropies are ordered in alpha") {
  const SystemShape shape(7, 1);
  const DensityMatrix rho = random_density(shape, 4, 5150);
  const DensityMatrix sigma = random_density(shape, 7, 5151);
  const double d1 = relative_entropy(rho, sigma);
  const double d2 = renyi_relative(rho, sigma, 2.0);
  const double dinf = max_relative(rho, sigma);
  CHECK(d1 <= d2 + 1e-10);
  CHECK(d2 <= dinf + 1e-10);
  CHECK(d1 >= -1e-10);
}

TEST_CASE("trace distance is the unhalved trace norm") {
  const SystemShape shape(2, 1);
  const DensityMatrix a = diag_state(shape, {1.0, 0.0});
  const DensityMatrix b = diag_state(shape, {0.0, 1.0});
  // orthogonal pure states sit at the top of the [0, 2] range
  CHECK(trace_distance(a, b) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(trace_distance(a, a) == doctest::Approx(0.0));
  const DensityMatrix p = diag_state(shape, {0.7, 0.3});
  const DensityMatrix q = diag_state(shape, {0.4, 0.6});
  CHECK(trace_distance(p, q) == doctest::Approx(0.6).epsilon(1e-12));

  // quantum Pinsker in this convention: (1/2)||rho - sigma||_1^2 <= D(rho||sigma)
  const double td = trace_distance(p, q);
  CHECK(0.5 * td * td <= relative_entropy(p, q) + 1e-12);
}

TEST_CASE("spectrum clamps rounding noise but rejects real negativity") {
  const SystemShape shape(2, 1);
  Matrix m(2, 2);
  m << 1.0 + 5e-11, 0.0, 0.0, -5e-11;
  // bypass make_density (which would accept this anyway) to probe spectrum()
  const DensityMatrix rho(DenseOperator(m, shape));
  const Spectrum s = spectrum(rho);
  CHECK(s.eigenvalues.back() == 0.0);
  CHECK(von_neumann(s) == doctest::Approx(0.0));

  Matrix bad(2, 2);
  bad << 1.0 + 1e-6, 0.0, 0.0, -1e-6;
  const DensityMatrix worse(DenseOperator(bad, shape));
  CHECK_THROWS_AS(spectrum(worse), validation_error);
}
