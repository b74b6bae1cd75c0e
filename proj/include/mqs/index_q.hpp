#pragma once

// Index q machinery: trace norm of the double commutator [A,[A,rho]], the
// projector witness attaining ||X||_1 = 2 Tr(eta X), and a seeded search
// for the maximizing additive operator.

#include "mqs/index_p.hpp"
#include "mqs/parallel.hpp"

namespace mqs {

// [A,[A,rho]] as a dense matrix.
inline CMatrix double_commutator(const DensityState& rho, const AdditiveOperator& a) {
  check_same_lattice(rho.lattice(), a.lattice());
  CMatrix x = commutator_additive(a, commutator_additive(a, rho.matrix()));
  return 0.5 * (x + x.adjoint());
}

namespace detail {

// With rho = W W^dagger and K = [W, AW, A^2W] = Q R,
//   [A,[A,rho]] = K C K^dagger = Q (R C R^dagger) Q^dagger,
// C = [[0,0,1],[0,-2,0],[1,0,0]] blockwise. The nonzero spectrum lives in
// the small Hermitian core R C R^dagger.
struct CompressedDoubleCommutator {
  CMatrix basis;  // Q, orthonormal columns
  CMatrix core;   // R C R^dagger
};

// The basis is skipped when only the spectrum is needed.
inline CompressedDoubleCommutator compress_double_commutator(const CMatrix& w, const AdditiveOperator& a,
                                                             bool with_basis = true) {
  const Eigen::Index r = w.cols();
  const CMatrix aw = apply_additive(a, w);
  const CMatrix a2w = apply_additive(a, aw);
  CMatrix k(w.rows(), 3 * r);
  k << w, aw, a2w;
  Eigen::HouseholderQR<CMatrix> qr(k);
  const Eigen::Index m = 3 * r;
  CompressedDoubleCommutator out;
  if (with_basis) out.basis = qr.householderQ() * CMatrix::Identity(w.rows(), m);
  const CMatrix rr = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  const CMatrix r0 = rr.leftCols(r), r1 = rr.middleCols(r, r), r2 = rr.rightCols(r);
  out.core = r0 * r2.adjoint() + r2 * r0.adjoint() - 2.0 * r1 * r1.adjoint();
  out.core = 0.5 * (out.core + out.core.adjoint()).eval();
  return out;
}

inline double compressed_trace_norm(const CMatrix& w, const AdditiveOperator& a) {
  const auto c = compress_double_commutator(w, a, false);
  return schatten_from_spectrum(hermitian_eigenvalues(c.core), SchattenOrder::trace());
}

inline CompressedDoubleCommutator compress_double_commutator(const DensityState& rho,
                                                             const AdditiveOperator& a) {
  return compress_double_commutator(rho.factor(), a);
}

inline bool use_compressed_route(Eigen::Index rank, Eigen::Index dim) { return 3 * rank < dim; }

inline bool use_compressed_route(const DensityState& rho) {
  return use_compressed_route(rho.factor().cols(), rho.dim());
}

// Factor of rho - lambda_min * 1, which has the same double commutator as
// rho. Eigenvalues within a few ulps of lambda_min are dropped, so the
// maximally mixed state yields an empty factor.
inline CMatrix shifted_factor(const DensityState& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double lo = ev(0);
  const double cut = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(ev(ev.size() - 1)), 1e-300);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) - lo > cut) keep.push_back(i);
  CMatrix w(rho.dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const Eigen::Index i = keep[k];
    w.col(static_cast<Eigen::Index>(k)) = std::sqrt(ev(i) - lo) * es.eigenvectors().col(i);
  }
  return w;
}

}  // namespace detail

inline double double_commutator_trace_norm(const DensityState& rho, const AdditiveOperator& a) {
  check_same_lattice(rho.lattice(), a.lattice());
  if (detail::use_compressed_route(rho)) return detail::compressed_trace_norm(rho.factor(), a);
  const CMatrix x = double_commutator(rho, a);
  if (x.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  return schatten_from_spectrum(hermitian_eigenvalues(x), SchattenOrder::trace());
}

struct QWitness {
  CMatrix projector;  // onto the positive eigenspace of [A,[A,rho]]
  int rank = 0;
  bool degenerate = false;  // double commutator vanished
  double trace_norm = 0.0;
  double witness_value = 0.0;  // 2 Tr(projector X)
};

inline QWitness extract_witness(const DensityState& rho, const AdditiveOperator& a) {
  const CMatrix x = double_commutator(rho, a);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(x);
  const RVector& ev = es.eigenvalues();
  QWitness w;
  w.trace_norm = schatten_from_spectrum(ev, SchattenOrder::trace());
  const double cut = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  w.projector = CMatrix::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cut) {
      w.projector += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
      ++w.rank;
    }
  }
  w.degenerate = w.rank == 0;
  w.witness_value = 2.0 * (w.projector * x).trace().real();
  return w;
}

// ---------------------------------------------------------------------------
// Maximization over additive operators

struct QSearchOptions {
  int budget = 4;  // seeded random restarts
  std::uint64_t seed = 0;
  int max_sweeps = 50;
  double min_relative_improvement = 1e-6;
  int workers = 1;
};

struct IndexQReport {
  double best_value = 0.0;  // max(N, best_raw)
  double best_raw = 0.0;    // best trace norm found
  AdditiveOperator best_operator;
  std::string best_origin;  // candidate name or "restart-k"
  int evaluations = 0;
  bool floor_active = false;
};

namespace detail {

inline RMatrix random_unit_sites(const LatticeConfig& lattice, Rng& rng) {
  const int k = basis_size(lattice.local_dim());
  RMatrix c(lattice.n_sites(), k);
  for (int l = 0; l < lattice.n_sites(); ++l)
    for (int a = 0; a < k; ++a) c(l, a) = rng.normal();
  return AdditiveOperator::site_normalized(lattice, c).coeffs();
}

// Dominant eigenvector of rho, computed from the factor's Gram matrix.
inline PureState principal_component(const DensityState& rho) {
  const CMatrix& w = rho.factor();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(w.adjoint() * w);
  const CVector v = w * es.eigenvectors().col(es.eigenvalues().size() - 1);
  return PureState::normalized(rho.lattice(), v);
}

struct AscentResult {
  RMatrix coeffs;
  double value = 0.0;
  int evaluations = 0;
};

// Pattern search on each site's unit sphere of coefficients: per sweep,
// every site tries c_l +- h e_a (renormalized) and keeps improvements.
// The step shrinks after a sweep without progress.
template <class Objective>
AscentResult coordinate_ascent(const LatticeConfig& lattice, RMatrix c, Objective&& f,
                               const QSearchOptions& opt) {
  AscentResult res;
  double current = f(c);
  res.evaluations = 1;
  double step = 0.5;
  const int k = basis_size(lattice.local_dim());
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    const double start = current;
    for (int l = 0; l < lattice.n_sites(); ++l) {
      for (int a = 0; a < k; ++a) {
        for (double sign : {1.0, -1.0}) {
          RMatrix trial = c;
          trial(l, a) += sign * step;
          trial = AdditiveOperator::site_normalized(lattice, trial).coeffs();
          const double v = f(trial);
          ++res.evaluations;
          if (v > current) {
            current = v;
            c = std::move(trial);
          }
        }
      }
    }
    const double gain = current - start;
    if (gain <= 0.0) {
      step *= 0.25;
      if (step < 1e-3) break;
    } else if (gain < opt.min_relative_improvement * std::max(current, 1e-300)) {
      break;
    }
  }
  res.coeffs = std::move(c);
  res.value = current;
  return res;
}

}  // namespace detail

// Best of a fixed candidate library (uniform and staggered x/y/z, and the
// VCM-optimal operator of rho's principal component), the coordinate
// ascent started from the best candidate, and `budget` seeded random
// restarts. Restart k draws from derive_seed(seed, k), so a larger budget
// only adds candidates and the result never decreases.
inline IndexQReport maximize_q(const DensityState& rho, const QSearchOptions& opt = {}) {
  if (opt.budget < 1) throw Error(ErrorKind::invalid_input, "budget must be >= 1");
  const auto& lattice = rho.lattice();
  // Full-rank states are searched through the identity-shifted factor when
  // that one is small enough for the compressed route.
  std::optional<CMatrix> shifted;
  if (!detail::use_compressed_route(rho)) {
    CMatrix w = detail::shifted_factor(rho);
    if (detail::use_compressed_route(w.cols(), rho.dim())) shifted = std::move(w);
  }
  auto objective = [&](const RMatrix& c) {
    const AdditiveOperator a(lattice, c);
    if (!shifted) return double_commutator_trace_norm(rho, a);
    if (shifted->cols() == 0) return 0.0;
    return detail::compressed_trace_norm(*shifted, a);
  };

  std::vector<std::pair<std::string, RMatrix>> candidates;
  if (lattice.local_dim() == 2) {
    const char* names[] = {"uniform-x", "uniform-y", "uniform-z"};
    for (Axis ax : {Axis::x, Axis::y, Axis::z})
      candidates.emplace_back(names[static_cast<int>(ax)],
                              AdditiveOperator::uniform(lattice, ax).coeffs());
    const char* snames[] = {"staggered-x", "staggered-y", "staggered-z"};
    for (Axis ax : {Axis::x, Axis::y, Axis::z})
      candidates.emplace_back(snames[static_cast<int>(ax)],
                              AdditiveOperator::staggered(lattice, ax).coeffs());
  }
  candidates.emplace_back("vcm-principal",
                          max_variance(detail::principal_component(rho)).optimal_operator.coeffs());

  IndexQReport best{.best_operator = AdditiveOperator::zero(lattice)};
  best.best_raw = -1.0;
  auto consider = [&](const std::string& origin, const RMatrix& c, double v) {
    if (v > best.best_raw) {
      best.best_raw = v;
      best.best_operator = AdditiveOperator(lattice, c);
      best.best_origin = origin;
    }
  };
  std::size_t lead = 0;
  double lead_value = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double v = objective(candidates[i].second);
    ++best.evaluations;
    consider(candidates[i].first, candidates[i].second, v);
    if (v > lead_value) {
      lead_value = v;
      lead = i;
    }
  }

  // Task 0 refines the leading candidate, task k >= 1 is restart k.
  const auto runs = parallel_map(
      static_cast<std::size_t>(opt.budget) + 1, opt.workers, [&](std::size_t task) {
        RMatrix start;
        if (task == 0) {
          start = candidates[lead].second;
        } else {
          Rng rng(derive_seed(opt.seed, task));
          start = detail::random_unit_sites(lattice, rng);
        }
        return detail::coordinate_ascent(lattice, std::move(start), objective, opt);
      });
  for (std::size_t task = 0; task < runs.size(); ++task) {
    best.evaluations += runs[task].evaluations;
    consider(task == 0 ? candidates[lead].first + "+ascent" : "restart-" + std::to_string(task),
             runs[task].coeffs, runs[task].value);
  }

  const double n = lattice.n_sites();
  best.floor_active = best.best_raw <= n;
  best.best_value = std::max(n, best.best_raw);
  return best;
}

}  // namespace mqs
