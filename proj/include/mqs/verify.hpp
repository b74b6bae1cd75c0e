#pragma once

// Seeded randomized verification suites. Trial t of a suite draws all its
// randomness from derive_seed(seed, t) (offset per suite), so summaries are
// identical for any worker count. Channels that fail validation are
// rejected before any inequality is evaluated and are never counted as
// violations.

#include "mqs/serialize.hpp"

namespace mqs {

enum class Suite { pure, mixed, lemma };

inline std::string suite_name(Suite s) {
  switch (s) {
    case Suite::pure: return "pure";
    case Suite::mixed: return "mixed";
    case Suite::lemma: return "lemma";
  }
  return "?";
}

struct VerifyConfig {
  std::vector<Suite> suites{Suite::pure, Suite::mixed, Suite::lemma};
  int trials = 500;
  std::uint64_t seed = 1;
  int max_sites_pure = 8;
  int max_sites_mixed = 6;
  int workers = 1;
  int inject_invalid_every = 0;  // >0: every k-th trial gets a norm-1.5 channel
  int max_counterexamples = 5;
};

// One named check inside a trial.
struct CheckOutcome {
  std::string name;
  double slack = 0.0;
  double ratio = 0.0;  // lhs / rhs
};

struct TrialOutcome {
  enum class Status { checked, rejected, inapplicable } status = Status::checked;
  std::vector<CheckOutcome> checks;
  Json instance;  // filled only when a check is violated
};

struct CheckStats {
  long long count = 0;
  long long violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
};

struct SuiteSummary {
  Suite suite{};
  long long trials = 0;
  long long checked = 0;
  long long rejected = 0;
  long long inapplicable = 0;
  long long violations = 0;
  bool aborted = false;
  std::map<std::string, CheckStats> checks;
  std::vector<Json> counterexamples;
};

struct VerifySummary {
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<SuiteSummary> suites;
  bool pass() const {
    for (const auto& s : suites)
      if (s.violations > 0) return false;
    return true;
  }
};

namespace detail {

inline SubsystemSupport random_support(const LatticeConfig& lattice, Rng& rng) {
  const int n = lattice.n_sites();
  const int vol = rng.uniform_int(1, n);
  std::vector<int> sites(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) sites[static_cast<std::size_t>(i)] = i + 1;
  // partial Fisher-Yates
  for (int i = 0; i < vol; ++i) {
    const int j = rng.uniform_int(i, n - 1);
    std::swap(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)]);
  }
  sites.resize(static_cast<std::size_t>(vol));
  return SubsystemSupport(std::move(sites));
}

// Per-site directions with radius 1 half of the time and uniform in [0,1]
// otherwise.
inline AdditiveOperator random_additive(const LatticeConfig& lattice, Rng& rng) {
  RMatrix c = random_unit_sites(lattice, rng);
  for (int l = 0; l < lattice.n_sites(); ++l)
    if (rng.uniform() < 0.5) c.row(l) *= rng.uniform();
  return AdditiveOperator::clamped(lattice, c);
}

inline PureState random_pure_input(const LatticeConfig& lattice, Rng& rng) {
  switch (rng.uniform_int(0, 3)) {
    case 0: return random_product_state(lattice, rng);
    case 1: return cat_state(lattice);
    case 2: return tilted_state(lattice, rng.uniform(0.05, 0.5));
    default: return random_state(lattice, rng);
  }
}

inline DensityState random_mixed_input(const LatticeConfig& lattice, Rng& rng) {
  switch (rng.uniform_int(0, 3)) {
    case 0: return product_mixture(lattice, rng.uniform_int(1, 6), rng);
    case 1: return DensityState::from_pure(cat_state(lattice));
    case 2: return classical_mixture(lattice);
    default: {
      const int max_rank = static_cast<int>(std::min<Eigen::Index>(lattice.dim(), 8));
      return random_density(lattice, rng.uniform_int(1, max_rank), rng);
    }
  }
}

// Single Kraus operator: Gaussian contraction, rank-1 projector or unitary.
inline KrausChannel random_single_kraus(const LatticeConfig& lattice, const SubsystemSupport& s,
                                        Rng& rng) {
  const std::uint64_t sub = rng.next();
  switch (rng.uniform_int(0, 2)) {
    case 0: return random_channel(lattice, s, 1, sub);
    case 1: {
      Rng r2(sub);
      const CVector v = gaussian_matrix(r2, s.local_dim(lattice), 1).col(0).normalized();
      return {lattice, s, {v * v.adjoint()}};
    }
    default: return random_channel(lattice, s, 1, sub, {.unitary = true, .scale = std::nullopt});
  }
}

inline KrausChannel scaled_invalid(const KrausChannel& ch) {
  const double top = validate(ch).max_eigenvalue;
  auto ops = ch.ops();
  for (auto& e : ops) e *= 1.5 / std::sqrt(top);
  return {ch.lattice(), ch.support(), std::move(ops)};
}

inline CheckOutcome make_check(std::string name, double lhs, double rhs) {
  return {std::move(name), rhs - lhs, rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? 1e300 : 0.0)};
}

inline TrialOutcome run_pure_trial(const VerifyConfig& cfg, std::uint64_t trial_seed, bool invalid) {
  Rng rng(trial_seed);
  const LatticeConfig lattice(rng.uniform_int(2, cfg.max_sites_pure));
  const PureState psi = random_pure_input(lattice, rng);
  const SubsystemSupport s = random_support(lattice, rng);
  KrausChannel e = random_single_kraus(lattice, s, rng);
  const AdditiveOperator a = random_additive(lattice, rng);
  if (invalid) e = scaled_invalid(e);
  TrialOutcome out;
  if (!validate(e).valid) {
    out.status = TrialOutcome::Status::rejected;
    return out;
  }
  const auto sb = check_support_bound(a, e);
  out.checks.push_back(make_check("support_bound", sb.max_ratio * sb.bound, sb.bound));
  const auto rep = check_pure_tradeoff(psi, e, a);
  if (!rep.applicable) {
    out.status = TrialOutcome::Status::inapplicable;
  } else {
    out.checks.push_back(make_check("pure_tradeoff", rep.lhs, rep.rhs));
  }
  for (const auto& c : out.checks) {
    if (c.slack < -tol::slack) {
      out.instance = Json{{"suite", "pure"},
                          {"trial_seed", trial_seed},
                          {"state", pure_state_to_json(psi)},
                          {"channel", channel_to_json(e)},
                          {"operator", additive_to_json(a)},
                          {"report", to_json(rep)},
                          {"support_bound", to_json(sb)}};
      break;
    }
  }
  return out;
}

inline TrialOutcome run_mixed_trial(const VerifyConfig& cfg, std::uint64_t trial_seed, bool invalid) {
  Rng rng(trial_seed);
  const LatticeConfig lattice(rng.uniform_int(2, cfg.max_sites_mixed));
  const DensityState rho = random_mixed_input(lattice, rng);
  const SubsystemSupport s = random_support(lattice, rng);
  const int n_kraus = rng.uniform_int(1, 4);
  KrausChannel ch = n_kraus == 1 ? random_single_kraus(lattice, s, rng)
                                 : random_channel(lattice, s, n_kraus, rng.next());
  if (rng.uniform() < 0.25) ch = complete_channel(ch);
  const AdditiveOperator a = random_additive(lattice, rng);
  if (invalid) ch = scaled_invalid(ch);
  TrialOutcome out;
  if (!validate(ch).valid) {
    out.status = TrialOutcome::Status::rejected;
    return out;
  }
  const auto sb = check_support_bound(a, ch);
  out.checks.push_back(make_check("support_bound", sb.max_ratio * sb.bound, sb.bound));
  const auto rep = check_mixed_tradeoff(rho, ch, a);
  const auto xi = compute_xi_terms(rho, ch, a);
  if (!rep.applicable || !xi.applicable) {
    out.status = TrialOutcome::Status::inapplicable;
  } else {
    out.checks.push_back(make_check("mixed_tradeoff", rep.lhs, rep.rhs));
    out.checks.push_back(make_check("xi1_bound", xi.xi1, xi.bound1));
    out.checks.push_back(make_check("xi2_bound", xi.xi2, xi.bound2));
    out.checks.push_back(make_check("xi3_bound", xi.xi3, xi.bound3));
    out.checks.push_back(make_check("xi_assembly", xi.lhs, xi.assembly_rhs));
    const CMatrix dc1 = double_commutator(rho, a);
    const auto lemma = check_contraction_lemma(dc1, ch);
    out.checks.push_back(make_check("lemma_on_double_commutator", lemma.output_norm, lemma.input_norm));
  }
  for (const auto& c : out.checks) {
    if (c.slack < -tol::slack) {
      out.instance = Json{{"suite", "mixed"},
                          {"trial_seed", trial_seed},
                          {"state", density_state_to_json(rho)},
                          {"channel", channel_to_json(ch)},
                          {"operator", additive_to_json(a)},
                          {"report", to_json(rep)},
                          {"xi_terms", to_json(xi)},
                          {"support_bound", to_json(sb)}};
      break;
    }
  }
  return out;
}

inline TrialOutcome run_lemma_trial(const VerifyConfig& cfg, std::uint64_t trial_seed, bool invalid) {
  Rng rng(trial_seed);
  const LatticeConfig lattice(rng.uniform_int(1, cfg.max_sites_mixed));
  const SubsystemSupport s = random_support(lattice, rng);
  KrausChannel ch = random_channel(lattice, s, rng.uniform_int(1, 4), rng.next());
  CMatrix x = gaussian_matrix(rng, lattice.dim(), lattice.dim());
  x = 0.5 * (x + x.adjoint()).eval();
  if (invalid) ch = scaled_invalid(ch);
  TrialOutcome out;
  if (!validate(ch).valid) {
    out.status = TrialOutcome::Status::rejected;
    return out;
  }
  const auto r = check_contraction_lemma(x, ch);
  out.checks.push_back(make_check("contraction_lemma", r.output_norm, r.input_norm));
  if (!r.holds())
    out.instance = Json{{"suite", "lemma"},
                        {"trial_seed", trial_seed},
                        {"operator", matrix_to_json(x)},
                        {"channel", channel_to_json(ch)},
                        {"input_norm", r.input_norm},
                        {"output_norm", r.output_norm}};
  return out;
}

}  // namespace detail

inline SuiteSummary run_suite(Suite suite, const VerifyConfig& cfg) {
  SuiteSummary sum;
  sum.suite = suite;
  const std::uint64_t suite_seed = derive_seed(cfg.seed, 0x5u + static_cast<std::uint64_t>(suite));
  const std::size_t chunk = static_cast<std::size_t>(std::max(16, 4 * cfg.workers));
  const auto total = static_cast<std::size_t>(std::max(0, cfg.trials));
  for (std::size_t begin = 0; begin < total && !sum.aborted; begin += chunk) {
    const std::size_t count = std::min(chunk, total - begin);
    auto outcomes = parallel_map(count, cfg.workers, [&](std::size_t i) {
      const std::size_t t = begin + i;
      const std::uint64_t ts = derive_seed(suite_seed, t);
      const bool invalid = cfg.inject_invalid_every > 0 &&
                           t % static_cast<std::size_t>(cfg.inject_invalid_every) == 0;
      switch (suite) {
        case Suite::pure: return detail::run_pure_trial(cfg, ts, invalid);
        case Suite::mixed: return detail::run_mixed_trial(cfg, ts, invalid);
        default: return detail::run_lemma_trial(cfg, ts, invalid);
      }
    });
    for (auto& o : outcomes) {
      ++sum.trials;
      switch (o.status) {
        case TrialOutcome::Status::rejected: ++sum.rejected; continue;
        case TrialOutcome::Status::inapplicable: ++sum.inapplicable; break;
        case TrialOutcome::Status::checked: ++sum.checked; break;
      }
      bool violated = false;
      for (const auto& c : o.checks) {
        auto& st = sum.checks[c.name];
        ++st.count;
        st.worst_slack = std::min(st.worst_slack, c.slack);
        st.max_ratio = std::max(st.max_ratio, c.ratio);
        if (c.slack < -tol::slack) {
          ++st.violations;
          violated = true;
        }
      }
      if (violated) {
        ++sum.violations;
        if (static_cast<int>(sum.counterexamples.size()) < cfg.max_counterexamples)
          sum.counterexamples.push_back(std::move(o.instance));
      }
    }
    // a genuine violation stops the suite; the instance is preserved
    if (sum.violations > 0) sum.aborted = true;
  }
  return sum;
}

inline VerifySummary run_verify(const VerifyConfig& cfg) {
  if (cfg.trials < 1) throw Error(ErrorKind::invalid_input, "trials must be >= 1");
  VerifySummary out;
  out.seed = cfg.seed;
  out.trials = cfg.trials;
  for (Suite s : cfg.suites) out.suites.push_back(run_suite(s, cfg));
  return out;
}

inline Json to_json(const VerifySummary& v) {
  Json suites = Json::object();
  for (const auto& s : v.suites) {
    Json checks = Json::object();
    for (const auto& [name, st] : s.checks)
      checks[name] = Json{{"count", st.count},
                          {"violations", st.violations},
                          {"worst_slack", st.worst_slack},
                          {"max_tightness_ratio", st.max_ratio}};
    suites[suite_name(s.suite)] = Json{{"trials", s.trials},
                                       {"checked", s.checked},
                                       {"rejected", s.rejected},
                                       {"inapplicable", s.inapplicable},
                                       {"violations", s.violations},
                                       {"aborted", s.aborted},
                                       {"checks", std::move(checks)},
                                       {"counterexamples", s.counterexamples}};
  }
  return Json{{"seed", v.seed}, {"trials", v.trials}, {"pass", v.pass()}, {"suites", std::move(suites)}};
}

}  // namespace mqs
