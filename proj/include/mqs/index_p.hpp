#pragma once

// Index p machinery: variances of additive operators, the
// variance-covariance matrix (VCM) of the local basis, the bounded
// maximization of the variance, and the spectrum of i[A, |psi><psi|].

#include "mqs/additive.hpp"
#include "mqs/norms.hpp"
#include "mqs/states.hpp"

namespace mqs {

inline void check_same_lattice(const LatticeConfig& a, const LatticeConfig& b) {
  if (!(a == b)) throw Error(ErrorKind::dimension_mismatch, "operator and state lattices differ");
}

// <A^2> - <A>^2, clamped at zero.
inline double variance(const PureState& psi, const AdditiveOperator& a) {
  check_same_lattice(psi.lattice(), a.lattice());
  const CVector v = apply_additive(a, psi.amplitudes()).col(0);
  const double mean = psi.amplitudes().dot(v).real();
  return std::max(0.0, v.squaredNorm() - mean * mean);
}

// Symmetrized covariances Re<da_i da_j> of the local basis operators,
// indexed by (site - 1) * (d^2 - 1) + basis index.
struct VCMatrix {
  RMatrix entries;
  LatticeConfig lattice;

  int components_per_site() const { return basis_size(lattice.local_dim()); }

  // c^T V c for an N x (d^2-1) coefficient array.
  double quadratic_form(const RMatrix& coeffs) const {
    const RVector c = flatten(coeffs);
    return c.dot(entries * c);
  }

  RVector flatten(const RMatrix& coeffs) const {
    RVector c(entries.rows());
    const int k = components_per_site();
    for (Eigen::Index l = 0; l < coeffs.rows(); ++l)
      for (int a = 0; a < k; ++a) c(l * k + a) = coeffs(l, a);
    return c;
  }

  RMatrix unflatten(const RVector& c) const {
    const int k = components_per_site();
    RMatrix m(lattice.n_sites(), k);
    for (int l = 0; l < lattice.n_sites(); ++l)
      for (int a = 0; a < k; ++a) m(l, a) = c(l * k + a);
    return m;
  }
};

inline VCMatrix build_vcm(const PureState& psi) {
  const auto& lattice = psi.lattice();
  const auto basis = local_basis(lattice.local_dim());
  const int k = static_cast<int>(basis.size());
  const Eigen::Index n = static_cast<Eigen::Index>(lattice.n_sites()) * k;
  CMatrix u(psi.dim(), n);
  for (int l = 1; l <= lattice.n_sites(); ++l) {
    for (int a = 0; a < k; ++a) {
      CMatrix col = psi.amplitudes();
      apply_local(basis[static_cast<std::size_t>(a)], l, lattice, col);
      u.col((l - 1) * k + a) = col.col(0);
    }
  }
  const RVector mean = (psi.amplitudes().adjoint() * u).real().transpose();
  RMatrix v = (u.adjoint() * u).real() - mean * mean.transpose();
  v = 0.5 * (v + v.transpose()).eval();
  return {std::move(v), lattice};
}

struct IndexPReport {
  double max_variance = 0.0;     // variance at optimal_operator (feasible)
  double vcm_upper_bound = 0.0;  // N (d/2) e_max
  double vcm_top_eigenvalue = 0.0;
  AdditiveOperator optimal_operator;
  int refinement_steps = 0;
};

namespace detail {

// Rescales every site block of c to unit operator norm. A site whose block
// vanishes takes the top eigenvector of its own diagonal VCM block.
inline RMatrix site_renormalize(const VCMatrix& vcm, RMatrix c) {
  const auto basis = local_basis(vcm.lattice.local_dim());
  const int k = vcm.components_per_site();
  for (Eigen::Index l = 0; l < c.rows(); ++l) {
    RVector row = c.row(l).transpose();
    if (row.norm() < 1e-12) {
      Eigen::SelfAdjointEigenSolver<RMatrix> es(vcm.entries.block(l * k, l * k, k, k));
      row = es.eigenvectors().col(k - 1);
    }
    const double n = AdditiveOperator::local_operator_norm(basis, row);
    c.row(l) = (row / n).transpose();
  }
  return c;
}

}  // namespace detail

// Upper bound from the top VCM eigenvalue; feasible lower bound from the
// top eigenvector renormalized site by site, then improved by projected
// power steps c <- renormalize(V c), accepted only when the variance grows.
inline IndexPReport max_variance(const PureState& psi) {
  const auto& lattice = psi.lattice();
  const VCMatrix vcm = build_vcm(psi);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(vcm.entries);
  const Eigen::Index top = es.eigenvalues().size() - 1;
  const double e_max = std::max(0.0, es.eigenvalues()(top));

  RMatrix c = detail::site_renormalize(vcm, vcm.unflatten(es.eigenvectors().col(top)));
  double best = vcm.quadratic_form(c);
  int steps = 0;
  for (; steps < 500; ++steps) {
    const RVector g = vcm.entries * vcm.flatten(c);
    RMatrix next = detail::site_renormalize(vcm, vcm.unflatten(g));
    const double val = vcm.quadratic_form(next);
    if (!(val > best * (1.0 + 1e-14))) break;
    best = val;
    c = std::move(next);
  }

  IndexPReport r{.optimal_operator = AdditiveOperator::clamped(lattice, c)};
  r.max_variance = variance(psi, r.optimal_operator);
  r.vcm_top_eigenvalue = e_max;
  r.vcm_upper_bound = lattice.n_sites() * (lattice.local_dim() / 2.0) * e_max;
  r.refinement_steps = steps;
  return r;
}

struct CommutatorSpectrum {
  RVector eigenvalues;  // of i[A, |psi><psi|], ascending
  double sqrt_variance = 0.0;
  double identity_error = 0.0;  // max deviation from {+s, -s, 0, ..., 0}
  double norm_1 = 0.0;
  double norm_2 = 0.0;
  double norm_inf = 0.0;
};

// Dense check that the nonzero spectrum of i[A, rho] is +-sqrt(Var).
inline CommutatorSpectrum commutator_spectrum_check(const PureState& psi,
                                                    const AdditiveOperator& a) {
  check_same_lattice(psi.lattice(), a.lattice());
  const CMatrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
  const CMatrix am = realize_additive(a);
  CMatrix h = Complex(0, 1) * commutator(am, rho);
  h = 0.5 * (h + h.adjoint()).eval();
  CommutatorSpectrum out;
  out.eigenvalues = hermitian_eigenvalues(h);
  out.sqrt_variance = std::sqrt(variance(psi, a));
  const auto n = out.eigenvalues.size();
  const double s = out.sqrt_variance;
  double err = std::max(std::abs(out.eigenvalues(n - 1) - s), std::abs(out.eigenvalues(0) + s));
  for (Eigen::Index i = 1; i + 1 < n; ++i) err = std::max(err, std::abs(out.eigenvalues(i)));
  out.identity_error = err;
  out.norm_1 = schatten_from_spectrum(out.eigenvalues, SchattenOrder::trace());
  out.norm_2 = schatten_from_spectrum(out.eigenvalues, SchattenOrder::frobenius());
  out.norm_inf = schatten_from_spectrum(out.eigenvalues, SchattenOrder::operator_norm());
  return out;
}

}  // namespace mqs
