// Shared basics: scalar aliases, error types, tolerance defaults, seeded RNG
// helpers and the FNV-1a checksum used by the state file format.
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qconv {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// Base class for everything thrown on purpose by this library.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: malformed config, unknown experiment, invalid field values.
class config_error : public error {
 public:
  explicit config_error(const std::string& msg) : error(msg) {}
};

// Requested dense dimension exceeds the configured cap.
class budget_error : public error {
 public:
  explicit budget_error(const std::string& msg) : error(msg) {}
};

// A constructed or loaded object violates one of its invariants.
class validation_error : public error {
 public:
  explicit validation_error(const std::string& msg) : error(msg) {}
};

// Exhaustive parameter search came back empty.
class no_valid_params : public error {
 public:
  explicit no_valid_params(const std::string& msg) : error(msg) {}
};

// ---------------------------------------------------------------------------
// Tolerances
// ---------------------------------------------------------------------------
// Single source of truth for the numeric cutoffs; the experiment harness can
// override individual values through its config.
namespace tol {
inline constexpr double structural = 1e-12;   // exact identities (transforms, permutations)
inline constexpr double validity = 1e-10;     // state invariants (hermiticity, trace, PSD)
inline constexpr double duality = 1e-10;      // dense vs characteristic-function paths
inline constexpr double modulus = 1e-9;       // {0,1} modulus checks on stabilizer outputs
inline constexpr double entropy = 1e-9;       // entropy monotonicity slack
inline constexpr double unimodular = 1e-9;    // mean-state detection: keep |value| >= 1 - this
inline constexpr double support = 1e-10;      // eigenvalue / characteristic support threshold
inline constexpr double bound_slack = 1e-8;   // one-sided slack when comparing against closed-form bounds
inline constexpr double dedup = 1e-9;         // trace-distance dedup threshold for catalogs
inline constexpr double purity = 1e-8;        // |Tr rho^2 - 1| cut for "pure"
inline constexpr double eig_clamp = 1e-10;    // eigenvalues in [-eig_clamp, 0) are clamped to 0
}  // namespace tol

// ---------------------------------------------------------------------------
// Seeded randomness
// ---------------------------------------------------------------------------

// splitmix64 step; used to derive independent per-trial seeds from one master
// seed so trials can run in any order (or concurrently) with identical output.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

// ---------------------------------------------------------------------------
// FNV-1a 64-bit checksum
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Canonical residue in [0, m).
inline long long mod_reduce(long long a, long long m) {
  long long r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace qconv
