#pragma once

// Kraus channels supported on a subsystem S. Kraus matrices are stored on
// S only (d^|S| x d^|S|) and act on lattice vectors through
// apply_on_support.

#include "mqs/schmidt.hpp"
#include "mqs/states.hpp"

namespace mqs {

class KrausChannel {
 public:
  KrausChannel(LatticeConfig lattice, SubsystemSupport support, std::vector<CMatrix> ops)
      : lattice_(lattice), support_(std::move(support)), ops_(std::move(ops)) {
    if (support_.empty()) throw Error(ErrorKind::invalid_input, "channel support is empty");
    support_.check_within(lattice_);
    if (ops_.empty()) throw Error(ErrorKind::invalid_input, "channel needs a Kraus operator");
    const Eigen::Index d = support_.local_dim(lattice_);
    for (const CMatrix& e : ops_) {
      if (e.rows() != d || e.cols() != d)
        throw Error(ErrorKind::dimension_mismatch, "Kraus operator size must be d^|S|");
      if (!e.allFinite()) throw Error(ErrorKind::invalid_input, "Kraus operator not finite");
    }
  }

  const LatticeConfig& lattice() const { return lattice_; }
  const SubsystemSupport& support() const { return support_; }
  const std::vector<CMatrix>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }

  // Sum_k E_k^dagger E_k on S.
  CMatrix completeness() const {
    CMatrix s = CMatrix::Zero(ops_.front().cols(), ops_.front().cols());
    for (const CMatrix& e : ops_) s += e.adjoint() * e;
    return 0.5 * (s + s.adjoint());
  }

  CMatrix embedded(std::size_t k) const { return embed_on_support(ops_[k], support_, lattice_); }

 private:
  LatticeConfig lattice_;
  SubsystemSupport support_;
  std::vector<CMatrix> ops_;
};

struct ChannelValidity {
  double max_eigenvalue = 0.0;  // of sum_k E_k^dagger E_k
  double min_eigenvalue = 0.0;
  double max_kraus_norm = 0.0;  // max_k ||E_k||_inf
  bool valid = false;           // max_eigenvalue <= 1 + 1e-10
  bool trace_preserving = false;
};

inline ChannelValidity validate(const KrausChannel& ch) {
  const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(ch.completeness(), Eigen::EigenvaluesOnly)
                         .eigenvalues();
  ChannelValidity v;
  v.max_eigenvalue = ev.maxCoeff();
  v.min_eigenvalue = ev.minCoeff();
  for (const CMatrix& e : ch.ops())
    v.max_kraus_norm = std::max(v.max_kraus_norm, Eigen::BDCSVD<CMatrix>(e).singularValues()(0));
  v.valid = v.max_eigenvalue <= 1.0 + tol::channel;
  v.trace_preserving =
      std::abs(v.max_eigenvalue - 1.0) <= tol::channel && std::abs(v.min_eigenvalue - 1.0) <= tol::channel;
  return v;
}

enum class Validation { enforce, skip };

inline void require_valid(const KrausChannel& ch, Validation policy) {
  if (policy == Validation::skip) return;
  const auto v = validate(ch);
  if (!v.valid)
    throw Error(ErrorKind::invalid_input,
                "channel violates sum E^dagger E <= 1 (max eigenvalue " +
                    std::to_string(v.max_eigenvalue) + ")");
}

struct PureOutcome {
  PureState output;
  double success_probability;
};

struct MixedOutcome {
  DensityState output;
  double success_probability;
};

// E|psi> / sqrt(G) with G = <psi|E^dagger E|psi>.
inline PureOutcome apply_pure(const KrausChannel& e, const PureState& psi,
                              Validation policy = Validation::enforce) {
  if (e.size() != 1)
    throw Error(ErrorKind::invalid_input, "pure-to-pure map needs a single Kraus operator");
  if (!(e.lattice() == psi.lattice()))
    throw Error(ErrorKind::dimension_mismatch, "channel and state lattices differ");
  require_valid(e, policy);
  const CVector out = apply_on_support(e.ops().front(), e.support(), e.lattice(), psi.amplitudes());
  const double g = out.squaredNorm();
  if (!(g >= tol::null_outcome))
    throw Error(ErrorKind::null_outcome, "success probability below 1e-14");
  return {PureState::normalized(psi.lattice(), out), g};
}

// sum_k E_k rho E_k^dagger / G with G = Tr(sum_k E_k^dagger E_k rho). The
// output factor is [E_1 W, ..., E_M W] for rho = W W^dagger.
inline MixedOutcome apply_mixed(const KrausChannel& ch, const DensityState& rho,
                                Validation policy = Validation::enforce) {
  if (!(ch.lattice() == rho.lattice()))
    throw Error(ErrorKind::dimension_mismatch, "channel and state lattices differ");
  require_valid(ch, policy);
  const CMatrix& w = rho.factor();
  CMatrix out(w.rows(), w.cols() * static_cast<Eigen::Index>(ch.size()));
  for (std::size_t k = 0; k < ch.size(); ++k) {
    CMatrix block = w;
    apply_on_support(ch.ops()[k], ch.support(), ch.lattice(), block);
    out.middleCols(static_cast<Eigen::Index>(k) * w.cols(), w.cols()) = block;
  }
  const double g = out.squaredNorm();
  if (!(g >= tol::null_outcome))
    throw Error(ErrorKind::null_outcome, "success probability below 1e-14");
  if (out.cols() > out.rows()) {
    // keep the factor no wider than the space
    CMatrix m = out * out.adjoint() / g;
    return {DensityState::from_matrix(rho.lattice(), 0.5 * (m + m.adjoint())), g};
  }
  return {DensityState::from_factor(rho.lattice(), out), g};
}

// ---------------------------------------------------------------------------
// Constructions

inline KrausChannel identity_channel(const LatticeConfig& lattice, const SubsystemSupport& s) {
  const auto d = s.local_dim(lattice);
  return {lattice, s, {CMatrix::Identity(d, d)}};
}

// Tensor power of a single-site operator over the support.
inline CMatrix tensor_power(const CMatrix& op, int count) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int i = 0; i < count; ++i) out = Eigen::kroneckerProduct(out, op).eval();
  return out;
}

// prod_{l even} sigma_x(l)
inline KrausChannel make_spin_flip_even(const LatticeConfig& lattice) {
  if (lattice.n_sites() < 2) throw Error(ErrorKind::invalid_input, "spin flip needs N >= 2");
  if (lattice.local_dim() != 2) throw Error(ErrorKind::invalid_input, "spin flip needs qubits");
  const auto s = SubsystemSupport::even_sites(lattice);
  return {lattice, s, {tensor_power(pauli_x(), s.volume())}};
}

struct LocalProjectionScenario {
  KrausChannel channel;
  PureState input;
  double a;  // N^-alpha
  double b;  // sqrt(1 - N^-2alpha)
};

// Rank-1 projector on site 1 onto b|1> + a|0>, with the tilted input
// a|1..1> + b|0..0>.
inline LocalProjectionScenario make_local_projection(const LatticeConfig& lattice, double alpha) {
  if (lattice.n_sites() < 2) throw Error(ErrorKind::invalid_input, "local projection needs N >= 2");
  if (lattice.local_dim() != 2) throw Error(ErrorKind::invalid_input, "local projection needs qubits");
  if (!(alpha > 0.0 && alpha <= 0.5))
    throw Error(ErrorKind::invalid_input, "alpha must lie in (0, 1/2]");
  const double a = std::pow(static_cast<double>(lattice.n_sites()), -alpha);
  const double b = std::sqrt(1.0 - a * a);
  CVector v(2);
  v << a, b;
  KrausChannel ch(lattice, SubsystemSupport({1}), {v * v.adjoint()});
  return {std::move(ch), tilted_state(lattice, alpha), a, b};
}

enum class CatCreatorMode { literal, completed };

// (|0..0> + |1..1>)/sqrt(2) on d^|S| local levels.
inline CVector local_cat(const LatticeConfig& lattice, const SubsystemSupport& s) {
  const auto d = s.local_dim(lattice);
  CVector c = CVector::Zero(d);
  Eigen::Index ones = 0, stride = 1;
  for (int i = 0; i < s.volume(); ++i) {
    ones += stride;
    stride *= lattice.local_dim();
  }
  c(0) = 1.0 / std::sqrt(2.0);
  c(ones) = 1.0 / std::sqrt(2.0);
  return c;
}

// literal: E = |c> sum_i <xi_i| as a single Kraus operator; its norm is
// sqrt(v) for Schmidt rank v, so it only validates when v = 1.
// completed: {|c><e_j|} over an orthonormal basis of the support space that
// starts with the xi_i; trace preserving, so G = 1 for every input.
inline KrausChannel make_cat_creator(const PureState& psi1, const SubsystemSupport& s,
                                     CatCreatorMode mode) {
  const auto& lattice = psi1.lattice();
  const SchmidtDecomposition sd = schmidt(psi1, s);
  const CVector c = local_cat(lattice, s);
  if (mode == CatCreatorMode::literal) {
    const CVector sum_xi = sd.xi.rowwise().sum();
    return {lattice, s, {c * sum_xi.adjoint()}};
  }
  const Eigen::Index d = s.local_dim(lattice);
  Eigen::HouseholderQR<CMatrix> qr(sd.xi);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  std::vector<CMatrix> ops;
  for (Eigen::Index i = 0; i < sd.xi.cols(); ++i) ops.push_back(c * sd.xi.col(i).adjoint());
  for (Eigen::Index j = sd.xi.cols(); j < d; ++j) ops.push_back(c * q.col(j).adjoint());
  return {lattice, s, std::move(ops)};
}

// Adds sqrt(1 - sum E^dagger E) so that the result is trace preserving.
inline KrausChannel complete_channel(const KrausChannel& ch) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ch.completeness());
  RVector rest = (1.0 - es.eigenvalues().array()).max(0.0).sqrt().matrix();
  CMatrix root = es.eigenvectors() * rest.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  auto ops = ch.ops();
  ops.push_back(root);
  return {ch.lattice(), ch.support(), std::move(ops)};
}

struct RandomChannelOptions {
  bool unitary = false;  // single Haar-random unitary Kraus operator
  std::optional<double> scale;  // operator norm of the stacked Kraus column
};

inline CMatrix haar_unitary(Eigen::Index d, Rng& rng) {
  const CMatrix z = gaussian_matrix(rng, d, d);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR();
  for (Eigen::Index i = 0; i < d; ++i) {
    const Complex diag = r(i, i);
    const double m = std::abs(diag);
    if (m > 0.0) q.col(i) *= diag / m;
  }
  return q;
}

// Gaussian Kraus operators rescaled so the stacked column [E_1; ...; E_M]
// has operator norm `scale` (default: uniform in [0.5, 1]).
inline KrausChannel random_channel(const LatticeConfig& lattice, const SubsystemSupport& s,
                                   int n_kraus, std::uint64_t seed,
                                   const RandomChannelOptions& opt = {}) {
  if (n_kraus < 1) throw Error(ErrorKind::invalid_input, "n_kraus must be >= 1");
  s.check_within(lattice);
  Rng rng(seed);
  const Eigen::Index d = s.local_dim(lattice);
  if (opt.unitary) {
    if (n_kraus != 1)
      throw Error(ErrorKind::invalid_input, "unitary random channel has a single Kraus operator");
    CMatrix u = haar_unitary(d, rng);
    if (opt.scale) u *= *opt.scale;
    return {lattice, s, {u}};
  }
  std::vector<CMatrix> ops;
  for (int k = 0; k < n_kraus; ++k) ops.push_back(gaussian_matrix(rng, d, d));
  const double target = opt.scale ? *opt.scale : rng.uniform(0.5, 1.0);
  KrausChannel raw(lattice, s, ops);
  const double top = Eigen::SelfAdjointEigenSolver<CMatrix>(raw.completeness(), Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff();
  const double factor = target / std::sqrt(top);
  for (auto& e : ops) e *= factor;
  return {lattice, s, std::move(ops)};
}

}  // namespace mqs
