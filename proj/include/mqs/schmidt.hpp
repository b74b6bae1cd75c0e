#pragma once

#include "mqs/states.hpp"

namespace mqs {

// psi = sum_i lambdas[i] * xi_i (x) phi_i, with xi_i on the support S and
// phi_i on its complement. Vectors are stored as matrix columns in the
// local digit order of the respective site lists.
struct SchmidtDecomposition {
  RVector lambdas;  // descending, > 1e-12
  CMatrix xi;       // d^|S| x rank
  CMatrix phi;      // d^(N-|S|) x rank
  SubsystemSupport support;
  std::vector<int> complement;

  int rank() const { return static_cast<int>(lambdas.size()); }
};

namespace detail {

// Amplitude matrix M(s, r) = <s, r | psi> with s over the support digits and
// r over the complement digits.
inline CMatrix bipartite_matrix(const PureState& psi, const SubsystemSupport& s,
                                const std::vector<int>& rest) {
  const auto& lattice = psi.lattice();
  const auto row_off = local_offsets(lattice, s.sites());
  const auto col_off = local_offsets(lattice, rest);
  CMatrix m(static_cast<Eigen::Index>(row_off.size()), static_cast<Eigen::Index>(col_off.size()));
  for (std::size_t i = 0; i < row_off.size(); ++i)
    for (std::size_t j = 0; j < col_off.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          psi.amplitudes()(row_off[i] + col_off[j]);
  return m;
}

}  // namespace detail

inline SchmidtDecomposition schmidt(const PureState& psi, const SubsystemSupport& s) {
  const auto& lattice = psi.lattice();
  s.check_within(lattice);
  if (s.empty() || s.volume() == lattice.n_sites())
    throw Error(ErrorKind::invalid_input, "Schmidt support must be a nonempty proper subset");
  const auto rest = s.complement(lattice);
  const CMatrix m = detail::bipartite_matrix(psi, s, rest);
  Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol::schmidt_rank) ++rank;
  SchmidtDecomposition out;
  out.lambdas = sv.head(rank);
  out.xi = svd.matrixU().leftCols(rank);
  // M = U S V^dagger, so the complement vectors are the conjugated columns of V.
  out.phi = svd.matrixV().leftCols(rank).conjugate();
  out.support = s;
  out.complement = rest;
  return out;
}

// Lattice vector sum_i lambdas[i] xi_i (x) phi_i.
inline CVector reconstruct(const SchmidtDecomposition& sd, const LatticeConfig& lattice) {
  const auto row_off = detail::local_offsets(lattice, sd.support.sites());
  const auto col_off = detail::local_offsets(lattice, sd.complement);
  const CMatrix m = sd.xi * sd.lambdas.cast<Complex>().asDiagonal() * sd.phi.transpose();
  CVector v = CVector::Zero(lattice.dim());
  for (std::size_t i = 0; i < row_off.size(); ++i)
    for (std::size_t j = 0; j < col_off.size(); ++j)
      v(row_off[i] + col_off[j]) =
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return v;
}

}  // namespace mqs
