#pragma once

// Pure and mixed lattice states plus the standard families used by the
// scenarios: basis/product states, cat, tilted superposition, classical
// mixtures and seeded random states.

#include "mqs/lattice.hpp"

#include <string_view>

namespace mqs {

class PureState {
 public:
  PureState(LatticeConfig lattice, CVector amplitudes)
      : lattice_(lattice), amplitudes_(std::move(amplitudes)) {
    lattice_.check_cap(StateMode::pure);
    if (amplitudes_.size() != lattice_.dim())
      throw Error(ErrorKind::dimension_mismatch, "amplitude vector length must be d^N");
    if (!amplitudes_.allFinite())
      throw Error(ErrorKind::invalid_input, "amplitudes must be finite");
    const double n = amplitudes_.norm();
    if (std::abs(n - 1.0) > tol::state_norm)
      throw Error(ErrorKind::invalid_input,
                  "state is not normalized (norm = " + std::to_string(n) + ")");
  }

  // Normalizes before constructing; rejects the zero vector.
  static PureState normalized(const LatticeConfig& lattice, const CVector& v) {
    const double n = v.norm();
    if (!(n > 0.0)) throw Error(ErrorKind::invalid_input, "cannot normalize a zero vector");
    return PureState(lattice, v / n);
  }

  const LatticeConfig& lattice() const { return lattice_; }
  const CVector& amplitudes() const { return amplitudes_; }
  Eigen::Index dim() const { return amplitudes_.size(); }

 private:
  LatticeConfig lattice_;
  CVector amplitudes_;
};

// Unit-trace positive matrix. When the state is built from vectors a factor
// W with rho = W W^dagger is kept alongside, which lets trace norms of
// commutator expressions run in the range of rho instead of the full space.
class DensityState {
 public:
  static DensityState from_matrix(const LatticeConfig& lattice, const CMatrix& m) {
    lattice.check_cap(StateMode::mixed);
    if (m.rows() != lattice.dim() || m.cols() != lattice.dim())
      throw Error(ErrorKind::dimension_mismatch, "density matrix must be d^N x d^N");
    if (!m.allFinite()) throw Error(ErrorKind::invalid_input, "density matrix not finite");
    if (hermiticity_defect(m) > tol::density)
      throw Error(ErrorKind::invalid_input, "density matrix is not Hermitian");
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > tol::density)
      throw Error(ErrorKind::invalid_input,
                  "density matrix trace is " + std::to_string(tr) + ", expected 1");
    CMatrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
    if (es.eigenvalues().minCoeff() < -tol::density)
      throw Error(ErrorKind::invalid_input, "density matrix has a negative eigenvalue");
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) > 1e-13) keep.push_back(i);
    CMatrix w(lattice.dim(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
      w.col(static_cast<Eigen::Index>(k)) =
          es.eigenvectors().col(keep[k]) * std::sqrt(es.eigenvalues()(keep[k]));
    return DensityState(lattice, std::move(herm), std::move(w));
  }

  static DensityState from_pure(const PureState& psi) {
    psi.lattice().check_cap(StateMode::mixed);
    const CVector& a = psi.amplitudes();
    return DensityState(psi.lattice(), a * a.adjoint(), CMatrix(a));
  }

  // rho = W W^dagger / Tr(W W^dagger) for any nonzero W.
  static DensityState from_factor(const LatticeConfig& lattice, const CMatrix& w) {
    lattice.check_cap(StateMode::mixed);
    if (w.rows() != lattice.dim())
      throw Error(ErrorKind::dimension_mismatch, "factor rows must equal d^N");
    const double tr = w.squaredNorm();
    if (!(tr > 0.0) || !std::isfinite(tr))
      throw Error(ErrorKind::invalid_input, "factor must be nonzero and finite");
    CMatrix wn = w / std::sqrt(tr);
    CMatrix m = wn * wn.adjoint();
    m = 0.5 * (m + m.adjoint()).eval();
    return DensityState(lattice, std::move(m), std::move(wn));
  }

  // Sum_i p_i |psi_i><psi_i|; weights must be nonnegative and sum to one.
  static DensityState mixture(std::span<const double> weights,
                              std::span<const PureState> states) {
    if (weights.size() != states.size() || states.empty())
      throw Error(ErrorKind::invalid_input, "mixture needs one weight per state");
    const LatticeConfig lattice = states.front().lattice();
    double total = 0.0;
    for (double p : weights) {
      if (p < 0.0) throw Error(ErrorKind::invalid_input, "mixture weights must be >= 0");
      total += p;
    }
    if (std::abs(total - 1.0) > tol::density)
      throw Error(ErrorKind::invalid_input, "mixture weights must sum to 1");
    CMatrix w(lattice.dim(), static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (!(states[i].lattice() == lattice))
        throw Error(ErrorKind::dimension_mismatch, "mixture states on different lattices");
      w.col(static_cast<Eigen::Index>(i)) = std::sqrt(weights[i]) * states[i].amplitudes();
    }
    return from_factor(lattice, w);
  }

  static DensityState maximally_mixed(const LatticeConfig& lattice) {
    lattice.check_cap(StateMode::mixed);
    const auto d = lattice.dim();
    CMatrix m = CMatrix::Identity(d, d) / static_cast<double>(d);
    CMatrix w = CMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d));
    return DensityState(lattice, std::move(m), std::move(w));
  }

  const LatticeConfig& lattice() const { return lattice_; }
  const CMatrix& matrix() const { return matrix_; }
  // rho = factor() * factor()^dagger exactly (up to rounding).
  const CMatrix& factor() const { return factor_; }
  Eigen::Index dim() const { return matrix_.rows(); }

 private:
  DensityState(LatticeConfig lattice, CMatrix m, CMatrix w)
      : lattice_(lattice), matrix_(std::move(m)), factor_(std::move(w)) {}

  LatticeConfig lattice_;
  CMatrix matrix_;
  CMatrix factor_;
};

// ---------------------------------------------------------------------------
// State families

// Computational basis state from a digit string, e.g. "0101".
inline PureState basis_state(const LatticeConfig& lattice, std::string_view digits) {
  if (static_cast<int>(digits.size()) != lattice.n_sites())
    throw Error(ErrorKind::invalid_input, "basis label length must equal N");
  Eigen::Index index = 0;
  for (int l = 1; l <= lattice.n_sites(); ++l) {
    const int v = digits[static_cast<std::size_t>(l - 1)] - '0';
    if (v < 0 || v >= lattice.local_dim())
      throw Error(ErrorKind::invalid_input, "basis label digit out of range");
    index += v * lattice.stride(l);
  }
  CVector a = CVector::Zero(lattice.dim());
  a(index) = 1.0;
  return PureState(lattice, std::move(a));
}

inline PureState all_zero_state(const LatticeConfig& lattice) {
  return basis_state(lattice, std::string(static_cast<std::size_t>(lattice.n_sites()), '0'));
}

// Tensor product of single-site vectors (each normalized on the fly).
inline PureState product_state(const LatticeConfig& lattice, std::span<const CVector> sites) {
  if (static_cast<int>(sites.size()) != lattice.n_sites())
    throw Error(ErrorKind::invalid_input, "product state needs one vector per site");
  CVector v(1);
  v(0) = 1.0;
  for (const CVector& s : sites) {
    if (s.size() != lattice.local_dim())
      throw Error(ErrorKind::dimension_mismatch, "site vector has wrong dimension");
    const double n = s.norm();
    if (!(n > 0.0)) throw Error(ErrorKind::invalid_input, "zero site vector");
    CVector next = Eigen::kroneckerProduct(v, CVector(s / n)).eval();
    v = std::move(next);
  }
  return PureState::normalized(lattice, v);
}

// (|0...0> + |1...1>)/sqrt(2); for d > 2 the two levels are 0 and 1.
inline PureState cat_state(const LatticeConfig& lattice) {
  CVector a = CVector::Zero(lattice.dim());
  Eigen::Index ones = 0;
  for (int l = 1; l <= lattice.n_sites(); ++l) ones += lattice.stride(l);
  a(0) = 1.0 / std::sqrt(2.0);
  a(ones) += 1.0 / std::sqrt(2.0);
  return PureState::normalized(lattice, a);
}

inline PureState plus_state(const LatticeConfig& lattice) {
  std::vector<CVector> sites(static_cast<std::size_t>(lattice.n_sites()),
                             CVector::Ones(lattice.local_dim()));
  return product_state(lattice, sites);
}

// N^-alpha |1...1> + sqrt(1 - N^-2alpha) |0...0>.
inline PureState tilted_state(const LatticeConfig& lattice, double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw Error(ErrorKind::invalid_input, "alpha must lie in (0, 1/2]");
  const double n = lattice.n_sites();
  const double a = std::pow(n, -alpha);
  const double b = std::sqrt(1.0 - a * a);
  CVector amp = CVector::Zero(lattice.dim());
  Eigen::Index ones = 0;
  for (int l = 1; l <= lattice.n_sites(); ++l) ones += lattice.stride(l);
  amp(0) = b;
  amp(ones) += a;
  return PureState::normalized(lattice, amp);
}

inline PureState random_state(const LatticeConfig& lattice, Rng& rng) {
  return PureState::normalized(lattice, gaussian_matrix(rng, lattice.dim(), 1).col(0));
}

inline PureState random_product_state(const LatticeConfig& lattice, Rng& rng) {
  std::vector<CVector> sites;
  for (int l = 0; l < lattice.n_sites(); ++l)
    sites.push_back(gaussian_matrix(rng, lattice.local_dim(), 1).col(0));
  return product_state(lattice, sites);
}

// 1/2 |0..0><0..0| + 1/2 |1..1><1..1|
inline DensityState classical_mixture(const LatticeConfig& lattice) {
  std::string ones(static_cast<std::size_t>(lattice.n_sites()), '1');
  const std::vector<PureState> states{all_zero_state(lattice), basis_state(lattice, ones)};
  const std::vector<double> w{0.5, 0.5};
  return DensityState::mixture(w, states);
}

// Uniform mixture of `count` seeded random product states.
inline DensityState product_mixture(const LatticeConfig& lattice, int count, Rng& rng) {
  if (count < 1) throw Error(ErrorKind::invalid_input, "mixture needs at least one state");
  std::vector<PureState> states;
  for (int i = 0; i < count; ++i) states.push_back(random_product_state(lattice, rng));
  std::vector<double> w(static_cast<std::size_t>(count), 1.0 / count);
  return DensityState::mixture(w, states);
}

// Ginibre ensemble of the given rank.
inline DensityState random_density(const LatticeConfig& lattice, int rank, Rng& rng) {
  if (rank < 1) throw Error(ErrorKind::invalid_input, "rank must be >= 1");
  return DensityState::from_factor(lattice, gaussian_matrix(rng, lattice.dim(), rank));
}

inline double fidelity(const PureState& a, const PureState& b) {
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

}  // namespace mqs
