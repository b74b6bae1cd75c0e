#pragma once

// Shared scalar/matrix aliases, error type, tolerances and the seeded
// random source used by every module.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace mqs {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

enum class ErrorKind {
  invalid_input,    // precondition or schema violation
  dimension_mismatch,
  cap_exceeded,
  null_outcome,     // success probability below the normalization threshold
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace tol {
inline constexpr double state_norm = 1e-12;
inline constexpr double density = 1e-10;
inline constexpr double site_norm = 1e-12;
inline constexpr double channel = 1e-10;
inline constexpr double null_outcome = 1e-14;
inline constexpr double schmidt_rank = 1e-12;
inline constexpr double variance_clamp = 1e-10;
inline constexpr double slack = 1e-9;
}  // namespace tol

enum class StateMode { pure, mixed };

inline constexpr int default_pure_cap = 14;
inline constexpr int default_mixed_cap = 10;

// MQS_MAX_QUBITS overrides both caps when set to a positive integer.
inline int site_cap(StateMode mode) {
  if (const char* env = std::getenv("MQS_MAX_QUBITS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 64) return static_cast<int>(v);
  }
  return mode == StateMode::pure ? default_pure_cap : default_mixed_cap;
}

// ---------------------------------------------------------------------------
// Randomness. Per-task streams are derived from a master seed with a
// counter-based mix so that the draw sequence of task k never depends on
// which worker ran it or in what order.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// xoshiro256** with explicit uniform/normal transforms; the standard
// distributions are implementation-defined and would break cross-platform
// reproducibility of emitted files.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) {
      s = splitmix64(s);
      w = s;
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
  }

  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    return r * std::cos(t);
  }

  Complex complex_normal() { return {normal(), normal()}; }

 private:
  std::uint64_t state_[4]{};
  std::optional<double> spare_;
};

inline CMatrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

inline CMatrix adjoint(const CMatrix& m) { return m.adjoint(); }

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  return a * b - b * a;
}

inline double hermiticity_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace mqs
