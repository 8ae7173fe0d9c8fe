#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "qconv/entropy.hpp"
#include "qconv/states.hpp"
#include "qconv/weyl.hpp"

using namespace qconv;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

bool message_contains(const qconv::error& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("pure state projector and normalization") {
  const SystemShape shape(3, 1);
  Vector v(3);
  v << 2.0, 0.0, 0.0;  // library must normalize
  const DensityMatrix rho = pure_state(shape, v);
  CHECK(rho.m()(0, 0).real() == doctest::Approx(1.0));
  CHECK(purity(rho) == doctest::Approx(1.0));
  Vector zero = Vector::Zero(3);
  CHECK_THROWS_AS(pure_state(shape, zero), validation_error);
}

TEST_CASE("density validation names the violated property") {
  const SystemShape shape(2, 1);
  Matrix bad_trace(2, 2);
  bad_trace << 0.6, 0.0, 0.0, 0.3;
  try {
    validate_density(bad_trace, shape);
    FAIL("trace 0.9 accepted");
  } catch (const validation_error& e) {
    CHECK(message_contains(e, "trace"));
  }

  Matrix not_herm(2, 2);
  not_herm << 0.5, 0.3, 0.1, 0.5;
  try {
    validate_density(not_herm, shape);
    FAIL("non-hermitian accepted");
  } catch (const validation_error& e) {
    CHECK(message_contains(e, "hermiticity"));
  }

  Matrix neg(2, 2);
  neg << 1.2, 0.0, 0.0, -0.2;
  try {
    validate_density(neg, shape);
    FAIL("negative eigenvalue accepted");
  } catch (const validation_error& e) {
    CHECK(message_contains(e, "eigenvalue"));
  }
}

TEST_CASE("maximally mixed state") {
  const SystemShape shape(5, 1);
  const DensityMatrix rho = maximally_mixed(shape);
  CHECK(purity(rho) == doctest::Approx(0.2));
  CHECK(von_neumann(rho) == doctest::Approx(std::log(5.0)));
}

TEST_CASE("stabilizer projectors from generators") {
  const SystemShape shape(2, 1);
  StabilizerGroupDescriptor z_plus;
  z_plus.generators = {{PhasePoint({1}, {0}), 0}};
  z_plus.order = 2;
  Matrix expect(2, 2);
  expect << 1.0, 0.0, 0.0, 0.0;
  CHECK(max_abs_diff(stabilizer_from_generators(shape, z_plus).m(), expect) < 1e-12);

  StabilizerGroupDescriptor z_minus;
  z_minus.generators = {{PhasePoint({1}, {0}), 1}};
  z_minus.order = 2;
  expect << 0.0, 0.0, 0.0, 1.0;
  CHECK(max_abs_diff(stabilizer_from_generators(shape, z_minus).m(), expect) < 1e-12);
}

TEST_CASE("rank-2 stabilizer projection on two qubits") {
  const SystemShape shape(2, 2);
  StabilizerGroupDescriptor g;  // Z on the first qubit only
  g.generators = {{PhasePoint({1, 0}, {0, 0}), 0}};
  g.order = 2;
  const DensityMatrix rho = stabilizer_from_generators(shape, g);
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 0) = 0.5;
  expect(1, 1) = 0.5;
  CHECK(max_abs_diff(rho.m(), expect) < 1e-12);
  CHECK(von_neumann(rho) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("generator sanity errors") {
  const SystemShape shape(2, 1);
  StabilizerGroupDescriptor noncomm;
  noncomm.generators = {{PhasePoint({1}, {0}), 0}, {PhasePoint({0}, {1}), 0}};
  noncomm.order = 4;
  try {
    stabilizer_from_generators(shape, noncomm);
    FAIL("non-commuting generators accepted");
  } catch (const validation_error& e) {
    CHECK(message_contains(e, "commute"));
  }

  StabilizerGroupDescriptor clash;  // Z at +1 and Z at -1 simultaneously
  clash.generators = {{PhasePoint({1}, {0}), 0}, {PhasePoint({1}, {0}), 1}};
  clash.order = 2;
  try {
    stabilizer_from_generators(shape, clash);
    FAIL("contradictory phases accepted");
  } catch (const validation_error& e) {
    CHECK(message_contains(e, "inconsistent"));
  }
}

TEST_CASE("axis eigenstates satisfy their eigenvalue equations") {
  const SystemShape shape(7, 1);
  const DensityMatrix z = z_eigenstate(shape);
  const DensityMatrix x = x_eigenstate(shape);
  const Matrix zop = weyl(shape, PhasePoint({1}, {0})).m;
  const Matrix xop = weyl(shape, PhasePoint({0}, {1})).m;
  CHECK(max_abs_diff(zop * z.m() * zop.adjoint(), z.m()) < 1e-12);
  CHECK(max_abs_diff(xop * x.m() * xop.adjoint(), x.m()) < 1e-12);
  CHECK(z.m()(0, 0).real() == doctest::Approx(1.0));
  // |+> has every amplitude 1/d
  for (long long i = 0; i < 7; ++i) {
    for (long long j = 0; j < 7; ++j) {
      CHECK(std::abs(x.m()(i, j) - cplx(1.0 / 7.0, 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("random ensembles are deterministic per seed and valid") {
  const SystemShape shape(7, 1);
  const DensityMatrix a = random_density(shape, 3, 99);
  const DensityMatrix b = random_density(shape, 3, 99);
  const DensityMatrix c = random_density(shape, 3, 100);
  CHECK(max_abs_diff(a.m(), b.m()) == 0.0);
  CHECK(max_abs_diff(a.m(), c.m()) > 1e-3);
  CHECK_NOTHROW(validate_density(a.m(), shape));

  const DensityMatrix psi = random_pure(shape, 7);
  CHECK(purity(psi) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(random_density(shape, 0, 1), validation_error);
  CHECK_THROWS_AS(random_density(shape, 8, 1), validation_error);
}

TEST_CASE("state serialization round-trips exactly") {
  const SystemShape shape(3, 2);
  const DensityMatrix rho = random_density(shape, 9, 31337);
  const std::string path = temp_path("qconv_state_roundtrip.json");
  save_state(rho, path);
  const DensityMatrix back = load_state(path);
  CHECK(back.shape() == shape);
  CHECK(max_abs_diff(back.m(), rho.m()) == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("serialization rejects tampered payloads") {
  const SystemShape shape(2, 1);
  const DensityMatrix rho = random_density(shape, 2, 5);
  const std::string path = temp_path("qconv_state_tamper.json");
  save_state(rho, path);

  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  // flip one digit inside the checksum field
  const auto pos = text.find("fnv1a-64:");
  REQUIRE(pos != std::string::npos);
  text[pos + 10] = text[pos + 10] == '0' ? '1' : '0';
  std::ofstream out(path);
  out << text;
  out.close();

  try {
    load_state(path);
    FAIL("tampered checksum accepted");
  } catch (const validation_error& e) {
    CHECK(message_contains(e, "checksum"));
  }
  std::filesystem::remove(path);
}

TEST_CASE("sub-normalized matrices are rejected with the measured deviation") {
  const SystemShape shape(2, 1);
  Matrix m(2, 2);
  m << 0.45, 0.0, 0.0, 0.45;  // trace 0.9
  try {
    validate_density(m, shape);
    FAIL("trace 0.9 accepted");
  } catch (const validation_error& e) {
    CHECK(message_contains(e, "trace"));
    CHECK(message_contains(e, "0.1"));
  }
}

TEST_CASE("load_state reports missing files") {
  CHECK_THROWS_AS(load_state(temp_path("qconv_no_such_file.json")), qconv::error);
}
