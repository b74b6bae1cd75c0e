// mqs: command-line front end for index sweeps, scenarios, verification
// suites and adversarial search.
//
// Exit codes: 0 all checks pass, 1 I/O or internal error, 2 inequality
// violation found, 3 invalid input.

#include "mqs/mqs.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_violation = 2;
constexpr int exit_invalid = 3;

struct Common {
  std::string format;
  std::string out;
  int threads = 0;
  bool timings = false;
};

struct RangeArgs {
  std::optional<int> n;
  std::string n_range;
};

std::vector<int> resolve_ns(const RangeArgs& r, const std::string& fallback) {
  if (r.n && !r.n_range.empty())
    throw mqs::Error(mqs::ErrorKind::invalid_input, "give either --n or --n-range, not both");
  if (r.n) return mqs::parse_n_range(std::to_string(*r.n));
  return mqs::parse_n_range(r.n_range.empty() ? fallback : r.n_range);
}

int workers(const Common& c) { return c.threads > 0 ? c.threads : mqs::default_workers(); }

void emit_text(const Common& c, const std::string& text) {
  if (c.out.empty() || c.out == "-") {
    std::cout << text;
  } else {
    mqs::write_file(c.out, text);
  }
}

void emit(const Common& c, const std::string& default_format, const mqs::SweepResult& r) {
  const std::string fmt = c.format.empty() ? default_format : c.format;
  emit_text(c, fmt == "csv" ? mqs::to_csv_text(mqs::to_csv_table(r)) : mqs::to_json_text(mqs::to_json(r)));
}

void emit_json_only(const Common& c, const mqs::Json& j) {
  if (c.format == "csv")
    throw mqs::Error(mqs::ErrorKind::invalid_input, "this report is nested; only --format json is supported");
  emit_text(c, mqs::to_json_text(j));
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--out", c.out, "Output path (default: stdout)");
  app->add_option("--threads", c.threads, "Worker threads (default: MQS_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app->add_flag("--timings", c.timings, "Include wall-clock seconds per record");
}

void add_range(CLI::App* app, RangeArgs& r) {
  app->add_option("--n", r.n, "Number of sites")->check(CLI::PositiveNumber);
  app->add_option("--n-range", r.n_range, "Inclusive site range A:B");
}

mqs::Suite parse_suite(const std::string& s) {
  if (s == "pure") return mqs::Suite::pure;
  if (s == "mixed") return mqs::Suite::mixed;
  return mqs::Suite::lemma;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Macroscopic quantum superposition indices and trade-off certifier"};
  app.require_subcommand(1);

  // index-p / index-q
  Common pc, qc, vc, sc, wc, ac;
  RangeArgs pr, qr, sr, wr;
  mqs::StateSpec ps{.kind = "cat"}, qs{.kind = "cat"};
  int q_budget = 4;

  auto* ip = app.add_subcommand("index-p", "Maximal additive-operator variance of a pure state");
  add_common(ip, pc);
  add_range(ip, pr);
  ip->add_option("--state", ps.kind, "Pure state kind")->check(CLI::IsMember(mqs::pure_state_kinds()));
  ip->add_option("--alpha", ps.alpha, "Tilted-state exponent")->check(CLI::Range(1e-12, 0.5));
  ip->add_option("--seed", ps.seed, "Master seed for random states");

  auto* iq = app.add_subcommand("index-q", "Maximal double-commutator trace norm of a state");
  add_common(iq, qc);
  add_range(iq, qr);
  iq->add_option("--state", qs.kind, "State kind")->check(CLI::IsMember(mqs::mixed_state_kinds()));
  iq->add_option("--alpha", qs.alpha, "Tilted-state exponent")->check(CLI::Range(1e-12, 0.5));
  iq->add_option("--seed", qs.seed, "Master seed");
  iq->add_option("--budget", q_budget, "Random restarts of the search")->check(CLI::PositiveNumber);

  // verify
  std::string suite = "all";
  mqs::VerifyConfig vcfg;
  auto* vf = app.add_subcommand("verify", "Seeded randomized verification suites");
  add_common(vf, vc);
  vf->add_option("--suite", suite, "Suite to run")->check(CLI::IsMember({"pure", "mixed", "lemma", "all"}));
  vf->add_option("--trials", vcfg.trials, "Trials per suite")->check(CLI::PositiveNumber);
  vf->add_option("--seed", vcfg.seed, "Master seed");
  vf->add_option("--max-sites-pure", vcfg.max_sites_pure, "Largest N in the pure suite")->check(CLI::Range(2, 14));
  vf->add_option("--max-sites-mixed", vcfg.max_sites_mixed, "Largest N in the mixed and lemma suites")
      ->check(CLI::Range(2, 10));
  vf->add_option("--inject-invalid", vcfg.inject_invalid_every,
                 "Replace every K-th channel by an invalid one (norm 1.5)")
      ->check(CLI::NonNegativeNumber);

  // scenario / sweep share their parameters
  struct ScenarioArgs {
    std::string name, config, mode, state, support;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    std::optional<int> budget;
  } sa, wa;
  auto add_scenario = [](CLI::App* sub, ScenarioArgs& a) {
    sub->add_option("name", a.name, "Scenario name")->check(CLI::IsMember(mqs::scenario_names()));
    sub->add_option("--config", a.config, "JSON scenario config");
    sub->add_option("--alpha", a.alpha, "Tilted-state exponent");
    sub->add_option("--mode", a.mode, "Cat-creator mode")->check(CLI::IsMember({"literal", "completed"}));
    sub->add_option("--state", a.state, "Input state kind");
    sub->add_option("--support", a.support, "Support: half, even or all");
    sub->add_option("--seed", a.seed, "Master seed");
    sub->add_option("--budget", a.budget, "Random restarts of the q search");
  };
  auto* sc_cmd = app.add_subcommand("scenario", "Run a named end-to-end scenario");
  add_common(sc_cmd, sc);
  add_range(sc_cmd, sr);
  add_scenario(sc_cmd, sa);
  auto* sw_cmd = app.add_subcommand("sweep", "Run a scenario over an N range and emit a per-N table");
  add_common(sw_cmd, wc);
  add_range(sw_cmd, wr);
  add_scenario(sw_cmd, wa);

  // search
  mqs::SearchConfig acfg;
  std::string target = "pure";
  auto* as = app.add_subcommand("search", "Adversarial search for near-tight instances");
  add_common(as, ac);
  as->add_option("--target", target, "Inequality")->check(CLI::IsMember({"pure", "mixed", "support-bound"}));
  as->add_option("--trials", acfg.trials, "Random starts")->check(CLI::PositiveNumber);
  as->add_option("--steps", acfg.climb_steps, "Hill-climbing steps per start")->check(CLI::NonNegativeNumber);
  as->add_option("--max-sites", acfg.max_sites, "Largest N")->check(CLI::Range(1, 8));
  as->add_option("--seed", acfg.seed, "Master seed");
  as->add_flag("--projectors", acfg.single_site_projectors, "Pure target: single-site rank-1 projectors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  }

  try {
    if (ip->parsed()) {
      const auto r = mqs::sweep_index_p(ps, resolve_ns(pr, "4:12"), {.workers = workers(pc), .timings = pc.timings});
      emit(pc, "csv", r);
      return exit_ok;
    }
    if (iq->parsed()) {
      const auto r = mqs::sweep_index_q(qs, resolve_ns(qr, "4:10"),
                                        {.budget = q_budget, .workers = workers(qc), .timings = qc.timings});
      emit(qc, "csv", r);
      return exit_ok;
    }
    if (vf->parsed()) {
      if (suite != "all") vcfg.suites = {parse_suite(suite)};
      vcfg.workers = workers(vc);
      const auto summary = mqs::run_verify(vcfg);
      emit_json_only(vc, mqs::to_json(summary));
      return summary.pass() ? exit_ok : exit_violation;
    }
    if (sc_cmd->parsed() || sw_cmd->parsed()) {
      const bool is_sweep = sw_cmd->parsed();
      const ScenarioArgs& a = is_sweep ? wa : sa;
      const RangeArgs& rg = is_sweep ? wr : sr;
      const Common& c = is_sweep ? wc : sc;
      mqs::ScenarioSpec spec;
      if (!a.config.empty()) {
        mqs::Json j;
        try {
          j = mqs::Json::parse(mqs::read_file(a.config));
        } catch (const mqs::Json::parse_error& e) {
          throw mqs::Error(mqs::ErrorKind::invalid_input, std::string("config is not valid JSON: ") + e.what());
        }
        spec = mqs::scenario_from_json(j);
        if (!a.name.empty() && a.name != spec.name)
          throw mqs::Error(mqs::ErrorKind::invalid_input, "scenario name conflicts with config");
      } else {
        if (a.name.empty()) throw mqs::Error(mqs::ErrorKind::invalid_input, "scenario name or --config required");
        spec.name = a.name;
      }
      // command-line flags override the config file
      auto& p = spec.parameters;
      if (rg.n && !rg.n_range.empty())
        throw mqs::Error(mqs::ErrorKind::invalid_input, "give either --n or --n-range, not both");
      if (rg.n) {
        p.erase("n_range");
        p["n"] = *rg.n;
      }
      if (!rg.n_range.empty()) {
        p.erase("n");
        p["n_range"] = rg.n_range;
      }
      if (is_sweep && !p.contains("n_range"))
        throw mqs::Error(mqs::ErrorKind::invalid_input, "sweep needs an N range (--n-range or n_range in config)");
      if (a.alpha) p["alpha"] = *a.alpha;
      if (!a.mode.empty()) p["mode"] = a.mode;
      if (!a.state.empty()) p["state"] = a.state;
      if (!a.support.empty()) p["support"] = a.support;
      if (a.seed) p["seed"] = *a.seed;
      if (a.budget) p["budget"] = *a.budget;
      const auto r = mqs::run_scenario(spec, {.workers = workers(c), .timings = c.timings});
      emit(c, is_sweep ? "csv" : "json", r);
      return r.violation ? exit_violation : exit_ok;
    }
    if (as->parsed()) {
      acfg.target = target == "pure"    ? mqs::SearchTarget::pure
                    : target == "mixed" ? mqs::SearchTarget::mixed
                                        : mqs::SearchTarget::support_bound;
      acfg.workers = workers(ac);
      const auto r = mqs::adversarial_search(acfg);
      emit_json_only(ac, mqs::to_json(r));
      return r.max_ratio > 1.0 + mqs::tol::slack ? exit_violation : exit_ok;
    }
  } catch (const mqs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == mqs::ErrorKind::io ? exit_internal : exit_invalid;
  } catch (const mqs::Json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return exit_internal;
  }
  return exit_internal;
}
