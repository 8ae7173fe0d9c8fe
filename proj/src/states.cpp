#include "qconv/states.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "json.hpp"

namespace qconv {

void validate_density(const Matrix& m, const SystemShape& shape) {
  if (m.rows() != shape.dim || m.cols() != shape.dim) {
    throw validation_error("density validation failed: dimension mismatch, matrix is " +
                           std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                           " for dim " + std::to_string(shape.dim));
  }
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol::validity) {
    throw validation_error("density validation failed: hermiticity deviation " +
                           std::to_string(herm));
  }
  const double tr_err = std::abs(m.trace() - cplx(1.0, 0.0));
  if (tr_err > tol::validity) {
    throw validation_error("density validation failed: trace deviates from 1 by " +
                           std::to_string(tr_err));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()),
                                           Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol::validity) {
    throw validation_error("density validation failed: positivity, minimum eigenvalue " +
                           std::to_string(min_eig));
  }
}

DensityMatrix make_density(Matrix m, const SystemShape& shape) {
  validate_density(m, shape);
  return DensityMatrix(DenseOperator(std::move(m), shape));
}

DensityMatrix pure_state(const SystemShape& shape, const Vector& vec) {
  if (vec.size() != shape.dim) {
    throw validation_error("pure_state: vector length " + std::to_string(vec.size()) +
                           " does not match dim " + std::to_string(shape.dim));
  }
  const double norm2 = vec.squaredNorm();
  if (norm2 <= 0.0) {
    throw validation_error("pure_state: zero vector");
  }
  Matrix m = (vec * vec.adjoint()) / norm2;
  return make_density(std::move(m), shape);
}

DensityMatrix maximally_mixed(const SystemShape& shape) {
  Matrix m = Matrix::Identity(shape.dim, shape.dim) / static_cast<double>(shape.dim);
  return make_density(std::move(m), shape);
}

DensityMatrix stabilizer_from_generators(const SystemShape& shape,
                                         const StabilizerGroupDescriptor& gens) {
  const long long d = shape.d;
  for (size_t i = 0; i < gens.generators.size(); ++i) {
    for (size_t j = i + 1; j < gens.generators.size(); ++j) {
      if (symplectic_form(shape, gens.generators[i].first, gens.generators[j].first) != 0) {
        throw validation_error("stabilizer_from_generators: generators " + std::to_string(i) +
                               " and " + std::to_string(j) + " do not commute");
      }
    }
  }
  Matrix proj = Matrix::Identity(shape.dim, shape.dim);
  for (const auto& [point, e] : gens.generators) {
    const Matrix g = weyl(shape, point).m;
    // (1/d) sum_k (omega^{-e} g)^k projects onto the omega^e eigenspace of g
    Matrix term = Matrix::Zero(shape.dim, shape.dim);
    Matrix power = Matrix::Identity(shape.dim, shape.dim);
    for (long long k = 0; k < d; ++k) {
      const cplx ph = std::polar(1.0, -2.0 * kPi * static_cast<double>(mod_reduce(e * k, d)) /
                                          static_cast<double>(d));
      term += ph * power;
      power = power * g;
    }
    proj = proj * (term / static_cast<double>(d));
  }
  const double tr = proj.trace().real();
  if (tr < 0.5) {
    throw validation_error(
        "stabilizer_from_generators: inconsistent phase assignment, projector trace " +
        std::to_string(tr));
  }
  return make_density(proj / tr, shape);
}

namespace {

DensityMatrix pauli_axis_eigenstate(const SystemShape& shape, bool z_axis) {
  StabilizerGroupDescriptor gens;
  gens.order = shape.dim;
  for (long long i = 0; i < shape.n; ++i) {
    PhasePoint x = zero_point(shape);
    (z_axis ? x.p : x.q)[i] = 1;
    gens.generators.emplace_back(std::move(x), 0);
  }
  return stabilizer_from_generators(shape, gens);
}

}  // namespace

DensityMatrix z_eigenstate(const SystemShape& shape) { return pauli_axis_eigenstate(shape, true); }
DensityMatrix x_eigenstate(const SystemShape& shape) { return pauli_axis_eigenstate(shape, false); }

namespace {

Matrix ginibre(const SystemShape& shape, long long rank, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(shape.dim, rank);
  for (long long i = 0; i < shape.dim; ++i) {
    for (long long j = 0; j < rank; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = cplx(re, im) / std::sqrt(2.0);
    }
  }
  return g;
}

}  // namespace

DensityMatrix random_density(const SystemShape& shape, long long rank, std::uint64_t seed) {
  if (rank < 1 || rank > shape.dim) {
    throw validation_error("random_density: rank " + std::to_string(rank) +
                           " outside [1, " + std::to_string(shape.dim) + "]");
  }
  const Matrix g = ginibre(shape, rank, seed);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return make_density(std::move(m), shape);
}

DensityMatrix random_pure(const SystemShape& shape, std::uint64_t seed) {
  const Matrix g = ginibre(shape, 1, seed);
  return pure_state(shape, g.col(0));
}

// ---------------------------------------------------------------------------
// State file format, version 1: JSON with row-major [re, im] string pairs at
// 17 significant digits and an FNV-1a checksum over the canonical matrix
// serialization (the "re,im;" concatenation).
// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string canonical_matrix_bytes(const std::vector<std::pair<std::string, std::string>>& ents) {
  std::string bytes;
  for (const auto& [re, im] : ents) {
    bytes += re;
    bytes += ',';
    bytes += im;
    bytes += ';';
  }
  return bytes;
}

std::string checksum_string(const std::string& bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a-64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

}  // namespace

void save_state(const DensityMatrix& rho, const std::string& path) {
  const SystemShape& shape = rho.shape();
  std::vector<std::pair<std::string, std::string>> ents;
  ents.reserve(static_cast<size_t>(shape.dim * shape.dim));
  for (long long i = 0; i < shape.dim; ++i) {
    for (long long j = 0; j < shape.dim; ++j) {
      ents.emplace_back(format_double(rho.m()(i, j).real()), format_double(rho.m()(i, j).imag()));
    }
  }
  nlohmann::ordered_json doc;
  doc["format_version"] = 1;
  doc["d"] = shape.d;
  doc["n"] = shape.n;
  doc["matrix"] = nlohmann::ordered_json::array();
  for (const auto& [re, im] : ents) {
    doc["matrix"].push_back({re, im});
  }
  doc["checksum"] = checksum_string(canonical_matrix_bytes(ents));
  std::ofstream out(path);
  if (!out) throw validation_error("save_state: cannot open " + path);
  out << doc.dump(2) << "\n";
}

DensityMatrix load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("load_state: cannot open " + path);
  nlohmann::ordered_json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw validation_error("load_state: malformed file " + path + ": " + e.what());
  }
  if (!doc.contains("format_version") || doc["format_version"].get<int>() != 1) {
    throw validation_error("load_state: unsupported format_version in " + path);
  }
  const SystemShape shape(doc.at("d").get<long long>(), doc.at("n").get<long long>());
  const auto& arr = doc.at("matrix");
  if (static_cast<long long>(arr.size()) != shape.dim * shape.dim) {
    throw validation_error("load_state: matrix has " + std::to_string(arr.size()) +
                           " entries, expected " + std::to_string(shape.dim * shape.dim));
  }
  std::vector<std::pair<std::string, std::string>> ents;
  ents.reserve(arr.size());
  Matrix m(shape.dim, shape.dim);
  for (long long k = 0; k < shape.dim * shape.dim; ++k) {
    const auto& pair = arr[static_cast<size_t>(k)];
    const std::string re = pair.at(0).get<std::string>();
    const std::string im = pair.at(1).get<std::string>();
    ents.emplace_back(re, im);
    m(k / shape.dim, k % shape.dim) = cplx(std::stod(re), std::stod(im));
  }
  if (doc.contains("checksum")) {
    const std::string expect = checksum_string(canonical_matrix_bytes(ents));
    if (doc["checksum"].get<std::string>() != expect) {
      throw validation_error("load_state: checksum mismatch in " + path);
    }
  }
  return make_density(std::move(m), shape);
}

}  // namespace qconv
