#pragma once

// Additive operators A = sum_l a(l), with each a(l) expanded in the
// traceless local basis. The identity component is left out: variances and
// commutators do not see it.

#include "mqs/lattice.hpp"

namespace mqs {

enum class Axis { x = 0, y = 1, z = 2 };

class AdditiveOperator {
 public:
  // coeffs: N x (d^2 - 1), row l-1 holds the coefficients of site l.
  AdditiveOperator(LatticeConfig lattice, RMatrix coeffs)
      : lattice_(lattice), coeffs_(std::move(coeffs)) {
    if (coeffs_.rows() != lattice_.n_sites() ||
        coeffs_.cols() != basis_size(lattice_.local_dim()))
      throw Error(ErrorKind::dimension_mismatch, "coefficient array must be N x (d^2-1)");
    if (!coeffs_.allFinite())
      throw Error(ErrorKind::invalid_input, "coefficients must be finite");
    for (int l = 1; l <= lattice_.n_sites(); ++l)
      if (site_norm(l) > 1.0 + tol::site_norm)
        throw Error(ErrorKind::invalid_input,
                    "site " + std::to_string(l) + " operator norm exceeds 1");
  }

  static AdditiveOperator zero(const LatticeConfig& lattice) {
    return {lattice, RMatrix::Zero(lattice.n_sites(), basis_size(lattice.local_dim()))};
  }

  // Sum_l sigma_axis(l); d = 2 only.
  static AdditiveOperator uniform(const LatticeConfig& lattice, Axis axis) {
    require_qubits(lattice);
    RMatrix c = RMatrix::Zero(lattice.n_sites(), 3);
    c.col(static_cast<int>(axis)).setOnes();
    return {lattice, c};
  }

  // Sum_l (-1)^l sigma_axis(l); d = 2 only.
  static AdditiveOperator staggered(const LatticeConfig& lattice, Axis axis) {
    require_qubits(lattice);
    RMatrix c = RMatrix::Zero(lattice.n_sites(), 3);
    for (int l = 1; l <= lattice.n_sites(); ++l)
      c(l - 1, static_cast<int>(axis)) = (l % 2 == 0) ? 1.0 : -1.0;
    return {lattice, c};
  }

  // Sum_{l in support} sigma_axis(l); d = 2 only.
  static AdditiveOperator on_support(const LatticeConfig& lattice,
                                     const SubsystemSupport& support, Axis axis) {
    require_qubits(lattice);
    support.check_within(lattice);
    RMatrix c = RMatrix::Zero(lattice.n_sites(), 3);
    for (int l : support.sites()) c(l - 1, static_cast<int>(axis)) = 1.0;
    return {lattice, c};
  }

  // Scales each site block down to operator norm 1 when it exceeds it.
  static AdditiveOperator clamped(const LatticeConfig& lattice, RMatrix coeffs) {
    const auto basis = local_basis(lattice.local_dim());
    for (Eigen::Index l = 0; l < coeffs.rows(); ++l) {
      const double n = local_operator_norm(basis, coeffs.row(l).transpose());
      if (n > 1.0) coeffs.row(l) /= n;
    }
    return {lattice, std::move(coeffs)};
  }

  // Scales each nonzero site block to operator norm exactly 1.
  static AdditiveOperator site_normalized(const LatticeConfig& lattice, RMatrix coeffs) {
    const auto basis = local_basis(lattice.local_dim());
    for (Eigen::Index l = 0; l < coeffs.rows(); ++l) {
      const double n = local_operator_norm(basis, coeffs.row(l).transpose());
      if (n > 0.0) coeffs.row(l) /= n;
    }
    return {lattice, std::move(coeffs)};
  }

  const LatticeConfig& lattice() const { return lattice_; }
  const RMatrix& coeffs() const { return coeffs_; }

  // Local operator a(l) as a d x d matrix.
  CMatrix site_operator(int site) const {
    return local_matrix(local_basis(lattice_.local_dim()), coeffs_.row(site - 1).transpose());
  }

  // Operator norm of a(l). For qubits this is the Euclidean norm of the
  // Pauli coefficient triple.
  double site_norm(int site) const {
    const RVector c = coeffs_.row(site - 1).transpose();
    if (lattice_.local_dim() == 2) return c.norm();
    return local_operator_norm(local_basis(lattice_.local_dim()), c);
  }

  // A restricted to the sites of `support` (other rows zeroed).
  AdditiveOperator restricted(const SubsystemSupport& support) const {
    support.check_within(lattice_);
    RMatrix c = RMatrix::Zero(coeffs_.rows(), coeffs_.cols());
    for (int l : support.sites()) c.row(l - 1) = coeffs_.row(l - 1);
    return {lattice_, c};
  }

  static CMatrix local_matrix(const std::vector<CMatrix>& basis, const RVector& c) {
    CMatrix m = CMatrix::Zero(basis.front().rows(), basis.front().cols());
    for (std::size_t k = 0; k < basis.size(); ++k) m += c(static_cast<Eigen::Index>(k)) * basis[k];
    return m;
  }

  static double local_operator_norm(const std::vector<CMatrix>& basis, const RVector& c) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(local_matrix(basis, c), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }

 private:
  static void require_qubits(const LatticeConfig& lattice) {
    if (lattice.local_dim() != 2)
      throw Error(ErrorKind::invalid_input, "Pauli-axis operators need local_dim = 2");
  }

  LatticeConfig lattice_;
  RMatrix coeffs_;
};

// Dense d^N x d^N matrix of A.
inline CMatrix realize_additive(const AdditiveOperator& a) {
  const auto& lattice = a.lattice();
  CMatrix full = CMatrix::Zero(lattice.dim(), lattice.dim());
  for (int l = 1; l <= lattice.n_sites(); ++l)
    full += embed_local(a.site_operator(l), l, lattice);
  return full;
}

// A * cols, column by column, without forming A.
inline CMatrix apply_additive(const AdditiveOperator& a, const CMatrix& cols) {
  const auto& lattice = a.lattice();
  if (cols.rows() != lattice.dim())
    throw Error(ErrorKind::dimension_mismatch, "operand length does not match lattice");
  CMatrix out = CMatrix::Zero(cols.rows(), cols.cols());
  for (int l = 1; l <= lattice.n_sites(); ++l) {
    if (a.coeffs().row(l - 1).isZero(0.0)) continue;
    CMatrix term = cols;
    apply_local(a.site_operator(l), l, lattice, term);
    out += term;
  }
  return out;
}

// [A, X] for a dense lattice matrix X.
inline CMatrix commutator_additive(const AdditiveOperator& a, const CMatrix& x) {
  CMatrix left = apply_additive(a, x);
  // (A X^dagger)^dagger = X A since A is Hermitian.
  CMatrix right = apply_additive(a, CMatrix(x.adjoint())).adjoint();
  return left - right;
}

}  // namespace mqs
