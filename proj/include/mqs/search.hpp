#pragma once

// Adversarial search for near-tight instances: random starts followed by
// hill climbing on lhs/rhs. Each trial uses derive_seed(seed, t); the best
// trial is the first one reaching the maximum, so the result does not depend
// on the worker count.

#include "mqs/verify.hpp"

namespace mqs {

enum class SearchTarget { pure, mixed, support_bound };

inline std::string target_name(SearchTarget t) {
  switch (t) {
    case SearchTarget::pure: return "pure";
    case SearchTarget::mixed: return "mixed";
    case SearchTarget::support_bound: return "support_bound";
  }
  return "?";
}

struct SearchConfig {
  SearchTarget target = SearchTarget::pure;
  int trials = 100;
  std::uint64_t seed = 1;
  int max_sites = 6;
  int climb_steps = 20;
  bool single_site_projectors = false;  // pure target: rank-1 projector on one site
  int workers = 1;
};

struct SearchResult {
  SearchTarget target{};
  double max_ratio = 0.0;
  long long evaluations = 0;
  long long inapplicable = 0;
  Json instance;
};

namespace detail {

struct Candidate {
  LatticeConfig lattice{1};
  SubsystemSupport support{std::vector<int>{1}};
  std::vector<CMatrix> ops;
  RMatrix coeffs;
};

inline KrausChannel candidate_channel(const Candidate& c) {
  return {c.lattice, c.support, c.ops};
}

// Scales the Kraus set down to a valid channel if needed.
inline void make_valid(Candidate& c) {
  const double top = validate(candidate_channel(c)).max_eigenvalue;
  if (top > 1.0)
    for (auto& e : c.ops) e /= std::sqrt(top) * (1.0 + 1e-12);
}

inline void normalize_rows(RMatrix& c) {
  for (Eigen::Index l = 0; l < c.rows(); ++l) {
    const double n = c.row(l).norm();
    if (n > 1.0) c.row(l) /= n;
  }
}

inline Candidate perturb(const Candidate& c, bool projector, double step, Rng& rng) {
  Candidate out = c;
  out.coeffs += step * gaussian_matrix(rng, c.coeffs.rows(), c.coeffs.cols()).real();
  normalize_rows(out.coeffs);
  if (projector) {
    const CMatrix& p = c.ops.front();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(p);
    CVector v = es.eigenvectors().col(es.eigenvectors().cols() - 1);
    v += step * gaussian_matrix(rng, v.size(), 1).col(0);
    v.normalize();
    out.ops = {v * v.adjoint()};
  } else {
    for (auto& e : out.ops) e += step * gaussian_matrix(rng, e.rows(), e.cols());
    make_valid(out);
  }
  return out;
}

struct Evaluation {
  double ratio = 0.0;
  bool applicable = false;
  Json report;
};

inline Evaluation evaluate(SearchTarget target, const Candidate& c, const PureState* psi,
                           const DensityState* rho) {
  const KrausChannel ch = candidate_channel(c);
  const AdditiveOperator a(c.lattice, c.coeffs);
  Evaluation ev;
  switch (target) {
    case SearchTarget::support_bound: {
      const auto r = check_support_bound(a, ch);
      ev.ratio = r.max_ratio;
      ev.applicable = true;
      ev.report = to_json(r);
      break;
    }
    case SearchTarget::pure: {
      const auto r = check_pure_tradeoff(*psi, ch, a);
      ev.ratio = r.tightness_ratio;
      ev.applicable = r.applicable;
      ev.report = to_json(r);
      break;
    }
    case SearchTarget::mixed: {
      const auto r = check_mixed_tradeoff(*rho, ch, a);
      ev.ratio = r.tightness_ratio;
      ev.applicable = r.applicable;
      ev.report = to_json(r);
      break;
    }
  }
  return ev;
}

struct TrialBest {
  double ratio = -1.0;
  long long evaluations = 0;
  long long inapplicable = 0;
  Json instance;
};

inline TrialBest search_trial(const SearchConfig& cfg, std::uint64_t trial_seed, std::size_t t) {
  Rng rng(trial_seed);
  const int lo = cfg.target == SearchTarget::pure ? 2 : 1;
  Candidate c;
  c.lattice = LatticeConfig(rng.uniform_int(std::min(lo, cfg.max_sites), cfg.max_sites));
  const bool projector = cfg.target == SearchTarget::pure && cfg.single_site_projectors;

  // Trial 0 of the support-bound search is the structured tight instance
  // E = sigma_x(l), A = z on site l.
  if (cfg.target == SearchTarget::support_bound && t == 0) {
    c.support = SubsystemSupport({1});
    c.ops = {pauli_x()};
    c.coeffs = RMatrix::Zero(c.lattice.n_sites(), 3);
    c.coeffs(0, 2) = 1.0;
  } else {
    if (projector) {
      c.support = SubsystemSupport({rng.uniform_int(1, c.lattice.n_sites())});
      const CVector v = gaussian_matrix(rng, 2, 1).col(0).normalized();
      c.ops = {v * v.adjoint()};
    } else {
      c.support = random_support(c.lattice, rng);
      const int n_kraus = cfg.target == SearchTarget::mixed ? rng.uniform_int(1, 3) : 1;
      c.ops = random_channel(c.lattice, c.support, n_kraus, rng.next()).ops();
    }
    c.coeffs = random_additive(c.lattice, rng).coeffs();
  }

  std::optional<PureState> psi;
  std::optional<DensityState> rho;
  if (cfg.target == SearchTarget::pure) psi = random_pure_input(c.lattice, rng);
  if (cfg.target == SearchTarget::mixed) rho = random_mixed_input(c.lattice, rng);
  const PureState* pp = psi ? &*psi : nullptr;
  const DensityState* rp = rho ? &*rho : nullptr;

  TrialBest best;
  Evaluation cur = evaluate(cfg.target, c, pp, rp);
  ++best.evaluations;
  if (!cur.applicable) {
    ++best.inapplicable;
    cur.ratio = -1.0;
  }
  double step = 0.3;
  for (int k = 0; k < cfg.climb_steps; ++k) {
    Candidate next = perturb(c, projector, step, rng);
    Evaluation ev = evaluate(cfg.target, next, pp, rp);
    ++best.evaluations;
    if (!ev.applicable) {
      ++best.inapplicable;
      continue;
    }
    if (ev.ratio > cur.ratio) {
      c = std::move(next);
      cur = std::move(ev);
    } else {
      step *= 0.8;
    }
  }
  best.ratio = cur.ratio;
  if (cur.ratio >= 0.0) {
    Json inst{{"trial", t},
              {"trial_seed", trial_seed},
              {"channel", channel_to_json(candidate_channel(c))},
              {"operator", additive_to_json(AdditiveOperator(c.lattice, c.coeffs))},
              {"report", cur.report}};
    if (psi) inst["state"] = pure_state_to_json(*psi);
    if (rho) inst["state"] = density_state_to_json(*rho);
    best.instance = std::move(inst);
  }
  return best;
}

}  // namespace detail

inline SearchResult adversarial_search(const SearchConfig& cfg) {
  if (cfg.trials < 1) throw Error(ErrorKind::invalid_input, "trials must be >= 1");
  if (cfg.max_sites < 1) throw Error(ErrorKind::invalid_input, "max_sites must be >= 1");
  const std::uint64_t base = derive_seed(cfg.seed, 0x100u + static_cast<std::uint64_t>(cfg.target));
  auto trials = parallel_map(static_cast<std::size_t>(cfg.trials), cfg.workers, [&](std::size_t t) {
    return detail::search_trial(cfg, derive_seed(base, t), t);
  });
  SearchResult out;
  out.target = cfg.target;
  out.max_ratio = -1.0;
  for (auto& tr : trials) {
    out.evaluations += tr.evaluations;
    out.inapplicable += tr.inapplicable;
    if (tr.ratio > out.max_ratio) {
      out.max_ratio = tr.ratio;
      out.instance = std::move(tr.instance);
    }
  }
  out.max_ratio = std::max(out.max_ratio, 0.0);
  return out;
}

inline Json to_json(const SearchResult& r) {
  return Json{{"target", target_name(r.target)},
              {"max_ratio", r.max_ratio},
              {"evaluations", r.evaluations},
              {"inapplicable", r.inapplicable},
              {"instance", r.instance}};
}

}  // namespace mqs
