#include "qconv/stabilizer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "json.hpp"

#include "qconv/entropy.hpp"

namespace qconv {

long long pure_stabilizer_count_formula(const SystemShape& shape) {
  long long count = shape.dim;
  long long dk = 1;
  for (long long k = 1; k <= shape.n; ++k) {
    dk *= shape.d;
    count *= dk + 1;
  }
  return count;
}

namespace {

using FVec = std::vector<long long>;  // vector in F_d^{2n}, p digits then q digits

PhasePoint to_point(const SystemShape& shape, const FVec& v) {
  PhasePoint x(std::vector<long long>(v.begin(), v.begin() + shape.n),
               std::vector<long long>(v.begin() + shape.n, v.end()));
  return x;
}

long long symplectic(const SystemShape& shape, const FVec& a, const FVec& b) {
  long long acc = 0;
  for (long long i = 0; i < shape.n; ++i) {
    acc = mod_reduce(acc + a[i] * b[shape.n + i] - a[shape.n + i] * b[i], shape.d);
  }
  return acc;
}

// All r-dimensional subspaces of F_d^m by reduced row-echelon bases, filtered
// to isotropic ones. r <= 2 and m <= 4 in every use here, so plain counting
// over free entries is plenty fast.
std::vector<std::vector<FVec>> isotropic_subspaces(const SystemShape& shape, long long r) {
  const long long m = 2 * shape.n;
  const long long d = shape.d;
  std::vector<std::vector<FVec>> result;
  if (r == 0) {
    result.push_back({});
    return result;
  }
  // choose pivot columns c_0 < ... < c_{r-1}
  std::vector<long long> pivots(r);
  std::vector<long long> free_cols;
  auto emit_for_pivots = [&]() {
    // free entries: row i, column j with j > pivots[i] and j not a pivot
    std::vector<std::pair<long long, long long>> free_pos;
    for (long long i = 0; i < r; ++i) {
      for (long long j = pivots[i] + 1; j < m; ++j) {
        if (std::find(pivots.begin(), pivots.end(), j) == pivots.end()) {
          free_pos.emplace_back(i, j);
        }
      }
    }
    long long total = 1;
    for (size_t k = 0; k < free_pos.size(); ++k) total *= d;
    for (long long assign = 0; assign < total; ++assign) {
      std::vector<FVec> basis(r, FVec(m, 0));
      for (long long i = 0; i < r; ++i) basis[i][pivots[i]] = 1;
      long long a = assign;
      for (const auto& [i, j] : free_pos) {
        basis[i][j] = a % d;
        a /= d;
      }
      bool iso = true;
      for (long long i = 0; i < r && iso; ++i) {
        for (long long j = i + 1; j < r && iso; ++j) {
          if (symplectic(shape, basis[i], basis[j]) != 0) iso = false;
        }
      }
      if (iso) result.push_back(std::move(basis));
    }
  };
  // iterate pivot combinations
  std::vector<long long> idx(r);
  for (long long i = 0; i < r; ++i) idx[i] = i;
  while (true) {
    pivots = idx;
    emit_for_pivots();
    long long i = r - 1;
    while (i >= 0 && idx[i] == m - r + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (long long j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
  return result;
}

StabilizerGroupDescriptor make_descriptor(const SystemShape& shape,
                                          const std::vector<FVec>& basis,
                                          const std::vector<long long>& phases) {
  StabilizerGroupDescriptor g;
  g.order = 1;
  for (size_t i = 0; i < basis.size(); ++i) {
    g.generators.emplace_back(to_point(shape, basis[i]), phases[i]);
    g.order *= shape.d;
  }
  return g;
}

// Quantized-entry fingerprint; collisions fall back to a trace-distance check.
std::uint64_t state_fingerprint(const DensityMatrix& rho) {
  std::string bytes;
  bytes.reserve(static_cast<size_t>(rho.shape().dim * rho.shape().dim * 8));
  for (long long i = 0; i < rho.shape().dim; ++i) {
    for (long long j = 0; j < rho.shape().dim; ++j) {
      const long long re = llround(rho.m()(i, j).real() * 1e6);
      const long long im = llround(rho.m()(i, j).imag() * 1e6);
      bytes.append(reinterpret_cast<const char*>(&re), sizeof(re));
      bytes.append(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  }
  return fnv1a64(bytes);
}

}  // namespace

StabilizerCatalog enumerate_pure_stabilizers(const SystemShape& shape) {
  if (shape.n > 2 || shape.dim > 64) {
    throw budget_error("enumerate_pure_stabilizers: budget n <= 2 and d^n <= 64, got d=" +
                       std::to_string(shape.d) + " n=" + std::to_string(shape.n));
  }
  const long long predicted = pure_stabilizer_count_formula(shape);
  if (predicted > 4096) {
    throw budget_error("enumerate_pure_stabilizers: catalog of " + std::to_string(predicted) +
                       " states exceeds the 4096-state budget");
  }
  StabilizerCatalog catalog;
  catalog.shape = shape;
  const auto subspaces = isotropic_subspaces(shape, shape.n);
  std::vector<long long> phases(shape.n, 0);
  for (const auto& basis : subspaces) {
    // all d^n eigenvalue assignments
    const long long total = shape.dim;
    for (long long assign = 0; assign < total; ++assign) {
      long long a = assign;
      for (long long i = 0; i < shape.n; ++i) {
        phases[i] = a % shape.d;
        a /= shape.d;
      }
      auto desc = make_descriptor(shape, basis, phases);
      catalog.pure_states.push_back({stabilizer_from_generators(shape, desc), desc});
    }
  }
  // dedup safety net; construction should never trigger it
  std::map<std::uint64_t, std::vector<size_t>> buckets;
  for (size_t i = 0; i < catalog.pure_states.size(); ++i) {
    buckets[state_fingerprint(catalog.pure_states[i].state)].push_back(i);
  }
  std::vector<bool> drop(catalog.pure_states.size(), false);
  for (const auto& [fp, members] : buckets) {
    for (size_t i = 0; i < members.size(); ++i) {
      for (size_t j = i + 1; j < members.size(); ++j) {
        if (!drop[members[j]] &&
            trace_distance(catalog.pure_states[members[i]].state,
                           catalog.pure_states[members[j]].state) < tol::dedup) {
          drop[members[j]] = true;
        }
      }
    }
  }
  StabilizerCatalog out;
  out.shape = shape;
  for (size_t i = 0; i < catalog.pure_states.size(); ++i) {
    if (!drop[i]) out.pure_states.push_back(std::move(catalog.pure_states[i]));
  }
  return out;
}

std::vector<MspsEntry> enumerate_msps(const SystemShape& shape, long long max_rank_exponent) {
  if (shape.n > 2 || shape.dim > 64) {
    throw budget_error("enumerate_msps: budget n <= 2 and d^n <= 64");
  }
  if (max_rank_exponent < 0 || max_rank_exponent > shape.n) {
    throw validation_error("enumerate_msps: max_rank_exponent outside [0, n]");
  }
  std::vector<MspsEntry> out;
  std::vector<long long> phases;
  for (long long r = shape.n; r >= shape.n - max_rank_exponent; --r) {
    long long rank = 1;
    for (long long k = 0; k < shape.n - r; ++k) rank *= shape.d;
    const auto subspaces = isotropic_subspaces(shape, r);
    phases.assign(static_cast<size_t>(r), 0);
    long long total = 1;
    for (long long k = 0; k < r; ++k) total *= shape.d;
    for (const auto& basis : subspaces) {
      for (long long assign = 0; assign < total; ++assign) {
        long long a = assign;
        for (long long i = 0; i < r; ++i) {
          phases[i] = a % shape.d;
          a /= shape.d;
        }
        auto desc = make_descriptor(shape, basis, phases);
        out.push_back({stabilizer_from_generators(shape, desc), desc, rank});
      }
    }
  }
  return out;
}

bool is_stabilizer_pure(const DensityMatrix& psi) {
  const double pur = purity(psi);
  if (std::abs(pur - 1.0) > tol::purity) {
    throw validation_error("is_stabilizer_pure: input purity " + std::to_string(pur) +
                           " is not within tolerance of 1");
  }
  const SystemShape& shape = psi.shape();
  const CharacteristicFunction xi = char_function(psi);
  std::vector<long long> support;
  for (long long idx = 0; idx < shape.phase_points(); ++idx) {
    if (std::abs(xi.values[idx]) >= 1.0 - tol::purity) support.push_back(idx);
  }
  if (static_cast<long long>(support.size()) != shape.dim) return false;
  // subgroup closure on the index set
  std::vector<bool> in_support(static_cast<size_t>(shape.phase_points()), false);
  for (long long idx : support) in_support[static_cast<size_t>(idx)] = true;
  for (long long a : support) {
    const PhasePoint pa = point_from_index(shape, a);
    for (long long b : support) {
      const PhasePoint sum = point_add(shape, pa, point_from_index(shape, b));
      if (!in_support[static_cast<size_t>(point_index(shape, sum))]) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Clifford generators
// ---------------------------------------------------------------------------

namespace {

Matrix fourier_gate(long long d) {
  Matrix f(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (long long j = 0; j < d; ++j)
    for (long long k = 0; k < d; ++k)
      f(j, k) = std::polar(norm, 2.0 * kPi * static_cast<double>(mod_reduce(j * k, d)) /
                                     static_cast<double>(d));
  return f;
}

Matrix phase_gate(long long d) {
  Matrix p = Matrix::Zero(d, d);
  if (d == 2) {
    p(0, 0) = 1.0;
    p(1, 1) = cplx(0.0, 1.0);
    return p;
  }
  for (long long j = 0; j < d; ++j) {
    const long long e = mod_reduce(j * (j + 1) / 2, d);
    p(j, j) = std::polar(1.0, 2.0 * kPi * static_cast<double>(e) / static_cast<double>(d));
  }
  return p;
}

// SUM on registers (a -> b) of an n-register system: |..i..j..> -> |..i..i+j..>
Matrix sum_gate(const SystemShape& shape, long long ctrl, long long tgt) {
  Matrix s = Matrix::Zero(shape.dim, shape.dim);
  for (long long k = 0; k < shape.dim; ++k) {
    auto digits = ket_digits(shape, k);
    digits[tgt] = mod_reduce(digits[tgt] + digits[ctrl], shape.d);
    s(ket_index(shape, digits), k) = 1.0;
  }
  return s;
}

Matrix embed_single(const SystemShape& shape, const Matrix& gate, long long site) {
  Matrix out = Matrix::Identity(1, 1);
  for (long long i = 0; i < shape.n; ++i) {
    out = kron(out, i == site ? gate : Matrix::Identity(shape.d, shape.d));
  }
  return out;
}

// A unitary is accepted only if conjugating every Weyl generator lands on a
// single Weyl operator up to phase. The match is read off the conjugate's
// characteristic table, which has exactly one modulus-d^n entry in that case.
void verify_clifford(const SystemShape& shape, const Matrix& u, const std::string& name) {
  const double dim = static_cast<double>(shape.dim);
  for (long long site = 0; site < shape.n; ++site) {
    for (int kind = 0; kind < 2; ++kind) {
      PhasePoint x = zero_point(shape);
      (kind == 0 ? x.p : x.q)[site] = 1;
      const Matrix cw = u * weyl(shape, x).m * u.adjoint();
      const CharacteristicFunction xi = char_function(DenseOperator(cw, shape));
      long long hits = 0;
      for (long long idx = 0; idx < shape.phase_points(); ++idx) {
        const double mag = std::abs(xi.values[idx]);
        if (mag > dim - 1e-7) {
          ++hits;
        } else if (mag > 1e-7) {
          throw validation_error("clifford_generators: " + name +
                                 " does not map Weyl generators to Weyl operators");
        }
      }
      if (hits != 1) {
        throw validation_error("clifford_generators: " + name + " conjugation table degenerate");
      }
    }
  }
}

}  // namespace

std::vector<DenseOperator> clifford_generators(const SystemShape& shape) {
  std::vector<std::pair<std::string, Matrix>> raw;
  for (long long site = 0; site < shape.n; ++site) {
    raw.emplace_back("F[" + std::to_string(site) + "]",
                     embed_single(shape, fourier_gate(shape.d), site));
    raw.emplace_back("P[" + std::to_string(site) + "]",
                     embed_single(shape, phase_gate(shape.d), site));
  }
  if (shape.n == 2) {
    raw.emplace_back("SUM[0->1]", sum_gate(shape, 0, 1));
  }
  std::vector<DenseOperator> out;
  out.reserve(raw.size());
  for (auto& [name, m] : raw) {
    verify_clifford(shape, m, name);
    out.emplace_back(std::move(m), shape);
  }
  return out;
}

DenseOperator random_clifford_word(const SystemShape& shape, long long max_len,
                                   std::uint64_t seed) {
  const auto gens = clifford_generators(shape);
  auto rng = make_rng(seed);
  std::uniform_int_distribution<long long> len_dist(1, max_len);
  std::uniform_int_distribution<size_t> pick(0, gens.size() - 1);
  const long long len = len_dist(rng);
  Matrix u = Matrix::Identity(shape.dim, shape.dim);
  for (long long i = 0; i < len; ++i) u = gens[pick(rng)].m * u;
  return DenseOperator(std::move(u), shape);
}

void export_catalog(const StabilizerCatalog& catalog, const std::string& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json manifest;
  manifest["format_version"] = 1;
  manifest["d"] = catalog.shape.d;
  manifest["n"] = catalog.shape.n;
  manifest["entries"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < catalog.pure_states.size(); ++i) {
    const std::string file = "stab_" + std::to_string(i) + ".json";
    save_state(catalog.pure_states[i].state, dir + "/" + file);
    nlohmann::ordered_json entry;
    entry["file"] = file;
    entry["generators"] = nlohmann::ordered_json::array();
    for (const auto& [point, e] : catalog.pure_states[i].group.generators) {
      nlohmann::ordered_json g;
      g["p"] = point.p;
      g["q"] = point.q;
      g["phase_exponent"] = e;
      entry["generators"].push_back(g);
    }
    manifest["entries"].push_back(entry);
  }
  std::ofstream out(dir + "/catalog.json");
  if (!out) throw validation_error("export_catalog: cannot open " + dir + "/catalog.json");
  out << manifest.dump(2) << "\n";
}

}  // namespace qconv
