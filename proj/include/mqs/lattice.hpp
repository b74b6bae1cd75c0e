#pragma once

// Lattice geometry, site supports, local operator bases and the kernels
// that act with an operator on a subset of sites.
//
// Sites are numbered 1..N and site 1 is the most significant tensor
// factor: in a basis index the digit of site l has stride d^(N-l).

#include "mqs/core.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <span>
#include <vector>

namespace mqs {

class LatticeConfig {
 public:
  explicit LatticeConfig(int n_sites, int local_dim = 2)
      : n_sites_(n_sites), local_dim_(local_dim) {
    if (n_sites < 1)
      throw Error(ErrorKind::invalid_input, "lattice needs at least one site");
    if (local_dim < 2)
      throw Error(ErrorKind::invalid_input, "local dimension must be >= 2");
    double log_dim = n_sites * std::log2(static_cast<double>(local_dim));
    if (log_dim > 40.0)
      throw Error(ErrorKind::cap_exceeded, "Hilbert space dimension is not addressable");
    dim_ = 1;
    for (int i = 0; i < n_sites; ++i) dim_ *= local_dim;
  }

  int n_sites() const { return n_sites_; }
  int local_dim() const { return local_dim_; }
  Eigen::Index dim() const { return dim_; }

  // Stride of site l (1-based) in a basis index.
  Eigen::Index stride(int site) const {
    Eigen::Index s = 1;
    for (int i = site; i < n_sites_; ++i) s *= local_dim_;
    return s;
  }

  int digit(Eigen::Index index, int site) const {
    return static_cast<int>((index / stride(site)) % local_dim_);
  }

  void check_cap(StateMode mode) const {
    const int cap = site_cap(mode);
    if (n_sites_ > cap)
      throw Error(ErrorKind::cap_exceeded,
                  "N = " + std::to_string(n_sites_) + " exceeds the " +
                      (mode == StateMode::pure ? "pure" : "mixed") + "-state cap of " +
                      std::to_string(cap) + " (set MQS_MAX_QUBITS to override)");
  }

  friend bool operator==(const LatticeConfig&, const LatticeConfig&) = default;

 private:
  int n_sites_;
  int local_dim_;
  Eigen::Index dim_ = 1;
};

class SubsystemSupport {
 public:
  SubsystemSupport() = default;

  explicit SubsystemSupport(std::vector<int> sites) : sites_(std::move(sites)) {
    std::sort(sites_.begin(), sites_.end());
    if (sites_.empty()) throw Error(ErrorKind::invalid_input, "support must be nonempty");
    if (std::adjacent_find(sites_.begin(), sites_.end()) != sites_.end())
      throw Error(ErrorKind::invalid_input, "support sites must be distinct");
    if (sites_.front() < 1)
      throw Error(ErrorKind::invalid_input, "site indices are 1-based");
  }

  static SubsystemSupport range(int first, int last) {
    std::vector<int> s;
    for (int i = first; i <= last; ++i) s.push_back(i);
    return SubsystemSupport(std::move(s));
  }

  static SubsystemSupport even_sites(const LatticeConfig& lattice) {
    std::vector<int> s;
    for (int i = 2; i <= lattice.n_sites(); i += 2) s.push_back(i);
    return SubsystemSupport(std::move(s));
  }

  static SubsystemSupport all(const LatticeConfig& lattice) {
    return range(1, lattice.n_sites());
  }

  const std::vector<int>& sites() const { return sites_; }
  int volume() const { return static_cast<int>(sites_.size()); }
  bool empty() const { return sites_.empty(); }
  bool contains(int site) const {
    return std::binary_search(sites_.begin(), sites_.end(), site);
  }

  void check_within(const LatticeConfig& lattice) const {
    if (!sites_.empty() && sites_.back() > lattice.n_sites())
      throw Error(ErrorKind::invalid_input,
                  "support site " + std::to_string(sites_.back()) + " outside lattice of " +
                      std::to_string(lattice.n_sites()) + " sites");
  }

  // Sites of the lattice not in this support, ascending.
  std::vector<int> complement(const LatticeConfig& lattice) const {
    std::vector<int> out;
    for (int l = 1; l <= lattice.n_sites(); ++l)
      if (!contains(l)) out.push_back(l);
    return out;
  }

  Eigen::Index local_dim(const LatticeConfig& lattice) const {
    Eigen::Index d = 1;
    for (int i = 0; i < volume(); ++i) d *= lattice.local_dim();
    return d;
  }

  friend bool operator==(const SubsystemSupport&, const SubsystemSupport&) = default;

 private:
  std::vector<int> sites_;
};

// ---------------------------------------------------------------------------
// Local operators

inline CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

// sigma_z |0> = +|0>
inline CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Traceless Hermitian orthogonal basis with Tr(b_i b_j) = 2 delta_ij:
// symmetric off-diagonal, antisymmetric off-diagonal, then diagonal
// generators. For d = 2 this is (sigma_x, sigma_y, sigma_z).
inline std::vector<CMatrix> local_basis(int d) {
  std::vector<CMatrix> sym, anti, diag;
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      CMatrix s = CMatrix::Zero(d, d);
      s(j, k) = 1;
      s(k, j) = 1;
      sym.push_back(s);
      CMatrix a = CMatrix::Zero(d, d);
      a(j, k) = Complex(0, -1);
      a(k, j) = Complex(0, 1);
      anti.push_back(a);
    }
  }
  for (int l = 1; l < d; ++l) {
    CMatrix g = CMatrix::Zero(d, d);
    const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) g(j, j) = scale;
    g(l, l) = -scale * l;
    diag.push_back(g);
  }
  std::vector<CMatrix> out;
  out.insert(out.end(), sym.begin(), sym.end());
  out.insert(out.end(), anti.begin(), anti.end());
  out.insert(out.end(), diag.begin(), diag.end());
  return out;
}

inline int basis_size(int d) { return d * d - 1; }

namespace detail {

// Offsets of every local configuration of `sites` relative to a base index,
// with the first support site as the most significant local digit.
inline std::vector<Eigen::Index> local_offsets(const LatticeConfig& lattice,
                                               std::span<const int> sites) {
  const int d = lattice.local_dim();
  std::vector<Eigen::Index> off{0};
  for (int site : sites) {
    std::vector<Eigen::Index> next;
    next.reserve(off.size() * d);
    const Eigen::Index s = lattice.stride(site);
    for (Eigen::Index o : off)
      for (int v = 0; v < d; ++v) next.push_back(o + v * s);
    off = std::move(next);
  }
  return off;
}

// Basis indices whose digits on `sites` are all zero.
inline std::vector<Eigen::Index> base_indices(const LatticeConfig& lattice,
                                              std::span<const int> sites) {
  std::vector<int> rest;
  for (int l = 1; l <= lattice.n_sites(); ++l)
    if (std::find(sites.begin(), sites.end(), l) == sites.end()) rest.push_back(l);
  return local_offsets(lattice, rest);
}

}  // namespace detail

// 1 x ... x op x ... x 1 with op on `site`.
inline CMatrix embed_local(const CMatrix& op, int site, const LatticeConfig& lattice) {
  const int d = lattice.local_dim();
  if (op.rows() != d || op.cols() != d)
    throw Error(ErrorKind::dimension_mismatch, "local operator must be d x d");
  if (site < 1 || site > lattice.n_sites())
    throw Error(ErrorKind::invalid_input, "site " + std::to_string(site) + " out of range");
  const Eigen::Index left = lattice.dim() / (lattice.stride(site) * d);
  const Eigen::Index right = lattice.stride(site);
  return Eigen::kroneckerProduct(
             Eigen::kroneckerProduct(CMatrix::Identity(left, left), op).eval(),
             CMatrix::Identity(right, right))
      .eval();
}

// Dense embedding of an operator acting on the sites of `support`.
inline CMatrix embed_on_support(const CMatrix& op, const SubsystemSupport& support,
                                const LatticeConfig& lattice) {
  support.check_within(lattice);
  const Eigen::Index local = support.local_dim(lattice);
  if (op.rows() != local || op.cols() != local)
    throw Error(ErrorKind::dimension_mismatch, "operator size does not match support");
  const auto off = detail::local_offsets(lattice, support.sites());
  const auto bases = detail::base_indices(lattice, support.sites());
  CMatrix full = CMatrix::Zero(lattice.dim(), lattice.dim());
  for (Eigen::Index b : bases)
    for (Eigen::Index i = 0; i < local; ++i)
      for (Eigen::Index j = 0; j < local; ++j) full(b + off[i], b + off[j]) = op(i, j);
  return full;
}

// Replaces every column of `cols` (each a lattice vector) by op applied on
// the support sites.
inline void apply_on_support(const CMatrix& op, const SubsystemSupport& support,
                             const LatticeConfig& lattice, CMatrix& cols) {
  support.check_within(lattice);
  const Eigen::Index local = support.local_dim(lattice);
  if (op.rows() != local || op.cols() != local)
    throw Error(ErrorKind::dimension_mismatch, "operator size does not match support");
  if (cols.rows() != lattice.dim())
    throw Error(ErrorKind::dimension_mismatch, "vector length does not match lattice");
  const auto off = detail::local_offsets(lattice, support.sites());
  const auto bases = detail::base_indices(lattice, support.sites());
  if (local == 2) {
    const Complex m00 = op(0, 0), m01 = op(0, 1), m10 = op(1, 0), m11 = op(1, 1);
    const Eigen::Index s = off[1];
    for (Eigen::Index c = 0; c < cols.cols(); ++c) {
      Complex* col = cols.col(c).data();
      for (Eigen::Index b : bases) {
        const Complex x0 = col[b], x1 = col[b + s];
        col[b] = m00 * x0 + m01 * x1;
        col[b + s] = m10 * x0 + m11 * x1;
      }
    }
    return;
  }
  CVector gathered(local), result(local);
  for (Eigen::Index c = 0; c < cols.cols(); ++c) {
    auto col = cols.col(c);
    for (Eigen::Index b : bases) {
      for (Eigen::Index i = 0; i < local; ++i) gathered(i) = col(b + off[i]);
      result.noalias() = op * gathered;
      for (Eigen::Index i = 0; i < local; ++i) col(b + off[i]) = result(i);
    }
  }
}

inline CVector apply_on_support(const CMatrix& op, const SubsystemSupport& support,
                                const LatticeConfig& lattice, const CVector& v) {
  CMatrix m = v;
  apply_on_support(op, support, lattice, m);
  return m.col(0);
}

// Single-site operator applied to every column, without materializing the
// embedding.
inline void apply_local(const CMatrix& op, int site, const LatticeConfig& lattice,
                        CMatrix& cols) {
  apply_on_support(op, SubsystemSupport({site}), lattice, cols);
}

}  // namespace mqs
