#pragma once

// Named end-to-end pipelines (input state -> channel -> indices before and
// after -> trade-off check) and index sweeps over N. Results hold one flat
// row per N for CSV output plus nested details for JSON output.

#include "mqs/search.hpp"

#include <chrono>
#include <set>

namespace mqs {

// ---------------------------------------------------------------------------
// State specifications

inline const std::vector<std::string>& pure_state_kinds() {
  static const std::vector<std::string> k{"cat", "zero", "plus", "tilted", "random-product", "random"};
  return k;
}

inline const std::vector<std::string>& mixed_state_kinds() {
  static const std::vector<std::string> k{"cat",       "zero",           "plus",
                                          "tilted",    "random-product", "random",
                                          "classical", "product-mixture", "maximally-mixed",
                                          "random-density"};
  return k;
}

inline bool is_pure_kind(const std::string& kind) {
  const auto& k = pure_state_kinds();
  return std::find(k.begin(), k.end(), kind) != k.end();
}

struct StateSpec {
  std::string kind = "cat";
  double alpha = 0.25;      // tilted
  std::uint64_t seed = 1;   // random kinds
  int mixture_count = 2;    // product-mixture
  int rank = 4;             // random-density
};

namespace detail {

// Product state whose site-l factor depends only on (seed, l), so the
// family is nested across N.
inline PureState nested_product(const LatticeConfig& lattice, std::uint64_t seed) {
  std::vector<CVector> sites;
  for (int l = 1; l <= lattice.n_sites(); ++l) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(l)));
    sites.push_back(gaussian_matrix(rng, lattice.local_dim(), 1).col(0));
  }
  return product_state(lattice, sites);
}

}  // namespace detail

// Random product kinds are nested across N; fully random kinds draw from
// derive_seed(seed, N).
inline PureState make_pure_state(const StateSpec& spec, const LatticeConfig& lattice) {
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(lattice.n_sites())));
  if (spec.kind == "cat") return cat_state(lattice);
  if (spec.kind == "zero") return all_zero_state(lattice);
  if (spec.kind == "plus") return plus_state(lattice);
  if (spec.kind == "tilted") return tilted_state(lattice, spec.alpha);
  if (spec.kind == "random-product") return detail::nested_product(lattice, spec.seed);
  if (spec.kind == "random") return random_state(lattice, rng);
  throw Error(ErrorKind::invalid_input, "unknown pure state kind '" + spec.kind + "'");
}

inline DensityState make_density_state(const StateSpec& spec, const LatticeConfig& lattice) {
  if (is_pure_kind(spec.kind)) return DensityState::from_pure(make_pure_state(spec, lattice));
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(lattice.n_sites())));
  if (spec.kind == "classical") return classical_mixture(lattice);
  if (spec.kind == "product-mixture") {
    std::vector<PureState> states;
    for (int i = 0; i < spec.mixture_count; ++i)
      states.push_back(detail::nested_product(lattice, derive_seed(spec.seed, 0xC000u + static_cast<std::uint64_t>(i))));
    return DensityState::mixture(std::vector<double>(states.size(), 1.0 / static_cast<double>(states.size())), states);
  }
  if (spec.kind == "maximally-mixed") return DensityState::maximally_mixed(lattice);
  if (spec.kind == "random-density") {
    const int r = static_cast<int>(std::min<Eigen::Index>(spec.rank, lattice.dim()));
    return random_density(lattice, r, rng);
  }
  throw Error(ErrorKind::invalid_input, "unknown state kind '" + spec.kind + "'");
}

// "A:B" or "N" -> inclusive list.
inline std::vector<int> parse_n_range(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(s, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != s.size()) throw Error(ErrorKind::invalid_input, "malformed N range '" + text + "'");
    return v;
  };
  const auto colon = text.find(':');
  const int a = to_int(text.substr(0, colon));
  const int b = colon == std::string::npos ? a : to_int(text.substr(colon + 1));
  if (a < 1 || b < a) throw Error(ErrorKind::invalid_input, "N range must satisfy 1 <= A <= B");
  std::vector<int> out;
  for (int n = a; n <= b; ++n) out.push_back(n);
  return out;
}

// ---------------------------------------------------------------------------
// Results

struct SweepRecord {
  Json row;      // flat scalars, one CSV line
  Json details;  // nested reports
};

struct SweepResult {
  std::string name;
  std::uint64_t seed = 0;
  Json parameters = Json::object();
  std::vector<SweepRecord> records;
  std::vector<std::pair<std::string, Json>> fits;
  bool violation = false;  // some trade-off check failed
};

namespace detail {

inline CsvCell json_cell(const Json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  return std::string(v.dump());
}

inline Json fit_json(const std::vector<std::pair<int, double>>& pts, bool floored) {
  if (pts.size() < 3) return nullptr;
  try {
    if (!floored) return to_json(fit_exponent(pts));
    const auto f = fit_with_floor(pts);
    Json j = to_json(f.primary);
    j["unfloored"] = f.unfloored ? to_json(*f.unfloored) : Json(nullptr);
    return j;
  } catch (const Error& e) {
    return Json{{"error", e.what()}};
  }
}

}  // namespace detail

inline CsvTable to_csv_table(const SweepResult& r) {
  CsvTable t;
  if (r.records.empty()) return t;
  // union of row keys in first-seen order; missing cells stay empty
  for (const auto& rec : r.records)
    for (const auto& [k, v] : rec.row.items())
      if (std::find(t.header.begin(), t.header.end(), k) == t.header.end()) t.header.push_back(k);
  const std::size_t n_cols = t.header.size();
  for (const auto& [name, fit] : r.fits) {
    t.header.push_back(name + "_exponent");
    t.header.push_back(name + "_stderr");
  }
  for (const auto& rec : r.records) {
    std::vector<CsvCell> row;
    for (std::size_t i = 0; i < n_cols; ++i) {
      const auto& k = t.header[i];
      row.push_back(rec.row.contains(k) ? detail::json_cell(rec.row[k]) : CsvCell(std::string()));
    }
    for (const auto& [name, fit] : r.fits) {
      if (fit.is_object() && fit.contains("exponent")) {
        row.emplace_back(fit["exponent"].get<double>());
        row.emplace_back(fit["stderr"].get<double>());
      } else {
        row.emplace_back(std::string());
        row.emplace_back(std::string());
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Json to_json(const SweepResult& r) {
  Json recs = Json::array();
  for (const auto& rec : r.records) {
    Json j = rec.row;
    for (const auto& [k, v] : rec.details.items()) j[k] = v;
    recs.push_back(std::move(j));
  }
  Json fits = Json::object();
  for (const auto& [name, fit] : r.fits) fits[name] = fit;
  return Json{{"name", r.name},
              {"seed", r.seed},
              {"parameters", r.parameters},
              {"violation", r.violation},
              {"records", std::move(recs)},
              {"fits", std::move(fits)}};
}

// ---------------------------------------------------------------------------
// Index sweeps

struct SweepOptions {
  int budget = 4;
  int workers = 1;
  bool timings = false;
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::vector<std::pair<int, double>> column(const SweepResult& r, const std::string& key) {
  std::vector<std::pair<int, double>> pts;
  for (const auto& rec : r.records) pts.emplace_back(rec.row["N"].get<int>(), rec.row[key].get<double>());
  return pts;
}

}  // namespace detail

inline SweepResult sweep_index_p(const StateSpec& state, const std::vector<int>& ns,
                                 const SweepOptions& opt = {}) {
  if (!is_pure_kind(state.kind))
    throw Error(ErrorKind::invalid_input, "index p needs a pure state kind, got '" + state.kind + "'");
  SweepResult r;
  r.name = "index-p";
  r.seed = state.seed;
  r.parameters = Json{{"state", state.kind}, {"n_values", ns}};
  if (state.kind == "tilted") r.parameters["alpha"] = state.alpha;
  for (int n : ns) {
    const LatticeConfig lattice(n);
    lattice.check_cap(StateMode::pure);
    detail::Stopwatch sw;
    const auto rep = max_variance(make_pure_state(state, lattice));
    SweepRecord rec;
    rec.row = Json{{"N", n},
                   {"max_variance", rep.max_variance},
                   {"vcm_upper_bound", rep.vcm_upper_bound},
                   {"refinement_steps", rep.refinement_steps}};
    if (opt.timings) rec.row["seconds"] = sw.seconds();
    rec.details = Json{{"report", to_json(rep)}};
    r.records.push_back(std::move(rec));
  }
  r.fits.emplace_back("max_variance", detail::fit_json(detail::column(r, "max_variance"), false));
  return r;
}

inline SweepResult sweep_index_q(const StateSpec& state, const std::vector<int>& ns,
                                 const SweepOptions& opt = {}) {
  SweepResult r;
  r.name = "index-q";
  r.seed = state.seed;
  r.parameters = Json{{"state", state.kind}, {"n_values", ns}, {"budget", opt.budget}};
  if (state.kind == "tilted") r.parameters["alpha"] = state.alpha;
  for (int n : ns) {
    const LatticeConfig lattice(n);
    lattice.check_cap(StateMode::mixed);
    detail::Stopwatch sw;
    const DensityState rho = make_density_state(state, lattice);
    const auto rep = maximize_q(rho, {.budget = opt.budget,
                                      .seed = derive_seed(state.seed, 0x9000u + static_cast<std::uint64_t>(n)),
                                      .workers = opt.workers});
    SweepRecord rec;
    rec.row = Json{{"N", n},
                   {"q_value", rep.best_value},
                   {"q_raw", rep.best_raw},
                   {"floor_active", rep.floor_active},
                   {"best_origin", rep.best_origin}};
    if (opt.timings) rec.row["seconds"] = sw.seconds();
    rec.details = Json{{"report", to_json(rep)}};
    r.records.push_back(std::move(rec));
  }
  r.fits.emplace_back("q_value", detail::fit_json(detail::column(r, "q_raw"), true));
  return r;
}

// ---------------------------------------------------------------------------
// Scenarios

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> k{"cat-creation", "local-projection", "spin-flip",
                                          "classical-mixture", "custom"};
  return k;
}

struct ScenarioSpec {
  std::string name;
  Json parameters = Json::object();
};

namespace detail {

inline const std::set<std::string>& allowed_keys(const std::string& name) {
  static const std::map<std::string, std::set<std::string>> keys{
      {"cat-creation", {"n", "n_range", "support", "mode", "state", "seed", "budget"}},
      {"local-projection", {"n", "n_range", "alpha", "seed", "budget"}},
      {"spin-flip", {"n", "n_range", "state", "seed", "budget"}},
      {"classical-mixture", {"n", "n_range", "seed", "budget"}},
      {"custom", {"n", "n_range", "state", "alpha", "channel", "operator", "seed", "budget"}},
  };
  const auto it = keys.find(name);
  if (it == keys.end()) throw Error(ErrorKind::invalid_input, "unknown scenario '" + name + "'");
  return it->second;
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::invalid_input, msg);
}

inline std::vector<int> scenario_ns(const Json& p, std::vector<int> fallback) {
  if (p.contains("n") && p.contains("n_range"))
    throw Error(ErrorKind::invalid_input, "give either n or n_range, not both");
  if (p.contains("n")) return {p["n"].get<int>()};
  if (p.contains("n_range")) {
    const Json& r = p["n_range"];
    if (r.is_string()) return parse_n_range(r.get<std::string>());
    return parse_n_range(std::to_string(r[0].get<int>()) + ":" + std::to_string(r[1].get<int>()));
  }
  return fallback;
}

inline SubsystemSupport parse_support(const Json& p, const LatticeConfig& lattice) {
  const int n = lattice.n_sites();
  if (!p.contains("support") || p["support"] == "half")
    return SubsystemSupport::range(1, std::max(1, n / 2));
  const Json& s = p["support"];
  if (s == "even") return SubsystemSupport::even_sites(lattice);
  if (s == "all") return SubsystemSupport::all(lattice);
  SubsystemSupport out(s.get<std::vector<int>>());
  out.check_within(lattice);
  return out;
}

inline AdditiveOperator parse_operator(const Json& p, const LatticeConfig& lattice) {
  const std::string op = p.value("operator", std::string("uniform-z"));
  const std::map<std::string, Axis> axes{{"x", Axis::x}, {"y", Axis::y}, {"z", Axis::z}};
  for (const auto& [name, axis] : axes) {
    if (op == "uniform-" + name) return AdditiveOperator::uniform(lattice, axis);
    if (op == "staggered-" + name) return AdditiveOperator::staggered(lattice, axis);
  }
  throw Error(ErrorKind::invalid_input, "unknown operator '" + op + "'");
}

inline KrausChannel parse_channel(const Json& p, const LatticeConfig& lattice, std::uint64_t seed) {
  require(p.contains("channel") && p["channel"].is_object(), "custom scenario needs a channel object");
  const Json& c = p["channel"];
  const std::string kind = c.value("kind", std::string());
  if (kind == "spin-flip-even") return make_spin_flip_even(lattice);
  if (kind == "kraus") return channel_from_json(c);
  const SubsystemSupport s = parse_support(c, lattice);
  if (kind == "identity") return identity_channel(lattice, s);
  if (kind == "random")
    return random_channel(lattice, s, c.value("n_kraus", 1),
                          derive_seed(seed, 0x7000u + static_cast<std::uint64_t>(lattice.n_sites())));
  throw Error(ErrorKind::invalid_input, "unknown channel kind '" + kind + "'");
}

struct PipelineOutput {
  Json row;
  Json details;
  bool violation = false;
};

// Shared tail: apply the channel, compute indices and run the trade-off
// checks. `a` is the operator used in the inequalities.
inline PipelineOutput run_pipeline(const DensityState& rho1, const std::optional<PureState>& psi1,
                                   const KrausChannel& ch, const AdditiveOperator& a, int budget,
                                   std::uint64_t seed) {
  PipelineOutput out;
  const int n = rho1.lattice().n_sites();
  const auto mixed = check_mixed_tradeoff(rho1, ch, a);
  out.violation = mixed.violated();
  out.row["G"] = mixed.G;
  out.row["volume_S"] = mixed.volume_S;
  out.row["dc_in"] = double_commutator_trace_norm(rho1, a);
  out.details["mixed_tradeoff"] = to_json(mixed);
  if (psi1 && ch.size() == 1) {
    const auto pure = check_pure_tradeoff(*psi1, ch, a);
    out.violation = out.violation || pure.violated();
    out.row["pure_slack"] = pure.slack;
    out.details["pure_tradeoff"] = to_json(pure);
  }
  if (!mixed.applicable) {
    out.row["applicable"] = false;
    return out;
  }
  out.row["applicable"] = true;
  const DensityState rho2 = apply_mixed(ch, rho1, Validation::skip).output;
  out.row["dc_out"] = double_commutator_trace_norm(rho2, a);
  out.row["mixed_lhs"] = mixed.lhs;
  out.row["mixed_rhs"] = mixed.rhs;
  out.row["mixed_slack"] = mixed.slack;
  const auto q = maximize_q(rho2, {.budget = budget, .seed = derive_seed(seed, 0xA000u + static_cast<std::uint64_t>(n))});
  out.row["q_out"] = q.best_value;
  out.details["q_out"] = to_json(q);
  return out;
}

}  // namespace detail

inline void validate_spec(const ScenarioSpec& spec) {
  const auto& keys = detail::allowed_keys(spec.name);
  detail::require(spec.parameters.is_object(), "scenario parameters must be an object");
  for (const auto& [k, v] : spec.parameters.items()) {
    detail::require(keys.count(k) > 0, "parameter '" + k + "' is not valid for scenario '" + spec.name + "'");
    if (k == "n" || k == "budget") detail::require(v.is_number_integer() && v.get<int>() >= 1, k + " must be a positive integer");
    if (k == "seed") detail::require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0), "seed must be a non-negative integer");
    if (k == "alpha") detail::require(v.is_number() && v.get<double>() > 0.0 && v.get<double>() <= 0.5, "alpha must lie in (0, 1/2]");
    if (k == "mode") detail::require(v == "literal" || v == "completed", "mode must be literal or completed");
    if (k == "state") detail::require(v.is_string(), "state must be a string");
    if (k == "operator") detail::require(v.is_string(), "operator must be a string");
    if (k == "n_range")
      detail::require(v.is_string() || (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()),
                      "n_range must be \"A:B\" or [A, B]");
    if (k == "support")
      detail::require(v == "half" || v == "even" || v == "all" || v.is_array(), "support must be half, even, all or a site list");
  }
}

// {"scenario": name, ...parameters}
inline ScenarioSpec scenario_from_json(const Json& j) {
  detail::require(j.is_object() && j.contains("scenario") && j["scenario"].is_string(),
                  "scenario config needs a \"scenario\" name");
  ScenarioSpec spec;
  spec.name = j["scenario"].get<std::string>();
  for (const auto& [k, v] : j.items())
    if (k != "scenario") spec.parameters[k] = v;
  return spec;
}

inline SweepResult run_scenario(const ScenarioSpec& spec, const SweepOptions& opt = {}) {
  validate_spec(spec);
  const Json& p = spec.parameters;
  const std::uint64_t seed = p.value("seed", std::uint64_t{1});
  const int budget = p.value("budget", opt.budget);
  SweepResult r;
  r.name = spec.name;
  r.seed = seed;
  r.parameters = p;

  auto finish = [&](SweepRecord rec, const detail::Stopwatch& sw) {
    if (opt.timings) rec.row["seconds"] = sw.seconds();
    r.records.push_back(std::move(rec));
  };

  if (spec.name == "local-projection") {
    const double alpha = p.value("alpha", 0.5);
    for (int n : detail::scenario_ns(p, {4, 5, 6, 7, 8, 9, 10})) {
      detail::Stopwatch sw;
      const LatticeConfig lattice(n);
      lattice.check_cap(StateMode::pure);
      const auto sc = make_local_projection(lattice, alpha);
      const auto a = AdditiveOperator::uniform(lattice, Axis::z);
      const auto outc = apply_pure(sc.channel, sc.input);
      CVector v(2);
      v << sc.a, sc.b;
      const LatticeConfig rest(n - 1);
      const PureState target(lattice, kroneckerProduct(v, cat_state(rest).amplitudes()).eval());
      const auto p_in = max_variance(sc.input);
      const auto p_out = max_variance(outc.output);
      const auto pure = check_pure_tradeoff(sc.input, sc.channel, a);
      const double x = std::pow(static_cast<double>(n), -2.0 * alpha);
      SweepRecord rec;
      rec.row = Json{{"N", n},
                     {"alpha", alpha},
                     {"G", outc.success_probability},
                     {"G_expected", 2.0 * x * (1.0 - x)},
                     {"fidelity", fidelity(outc.output, target)},
                     {"max_variance_in", p_in.max_variance},
                     {"max_variance_out", p_out.max_variance},
                     {"lhs", pure.lhs},
                     {"rhs", pure.rhs},
                     {"slack", pure.slack}};
      rec.details = Json{{"pure_tradeoff", to_json(pure)},
                         {"index_p_in", to_json(p_in)},
                         {"index_p_out", to_json(p_out)}};
      r.violation = r.violation || pure.violated();
      finish(std::move(rec), sw);
    }
    r.fits.emplace_back("max_variance_in", detail::fit_json(detail::column(r, "max_variance_in"), false));
    r.fits.emplace_back("max_variance_out", detail::fit_json(detail::column(r, "max_variance_out"), false));
    return r;
  }

  if (spec.name == "cat-creation") {
    const auto mode = p.value("mode", std::string("completed")) == "literal" ? CatCreatorMode::literal
                                                                             : CatCreatorMode::completed;
    StateSpec st{.kind = p.value("state", std::string("zero")), .seed = seed};
    detail::require(is_pure_kind(st.kind), "cat-creation needs a pure input state");
    for (int n : detail::scenario_ns(p, {8})) {
      detail::Stopwatch sw;
      const LatticeConfig lattice(n);
      lattice.check_cap(StateMode::mixed);
      const PureState psi = make_pure_state(st, lattice);
      const SubsystemSupport s = detail::parse_support(p, lattice);
      const KrausChannel ch = make_cat_creator(psi, s, mode);
      const auto validity = validate(ch);
      detail::require(validity.valid, "literal cat creator is not trace non-increasing for this input "
                                      "(Schmidt rank > 1); use mode completed");
      const auto a = AdditiveOperator::uniform(lattice, Axis::z);
      const DensityState rho1 = DensityState::from_pure(psi);
      auto out = detail::run_pipeline(rho1, psi, ch, a, budget, seed);
      SweepRecord rec;
      rec.row = Json{{"N", n}, {"mode", mode == CatCreatorMode::literal ? "literal" : "completed"}};
      for (const auto& [k, v] : out.row.items()) rec.row[k] = v;
      if (out.row["applicable"].get<bool>()) {
        const DensityState rho2 = apply_mixed(ch, rho1, Validation::skip).output;
        const auto as = AdditiveOperator::on_support(lattice, s, Axis::z);
        rec.row["q_uniform_z_S"] = double_commutator_trace_norm(rho2, as);
        rec.row["q_expected"] = 4.0 * s.volume() * s.volume();
      }
      rec.details = std::move(out.details);
      r.violation = r.violation || out.violation;
      finish(std::move(rec), sw);
    }
    if (r.records.front().row.contains("dc_out"))
      r.fits.emplace_back("dc_out", detail::fit_json(detail::column(r, "dc_out"), false));
    return r;
  }

  if (spec.name == "spin-flip" || spec.name == "custom") {
    StateSpec st{.kind = p.value("state", std::string("cat")), .alpha = p.value("alpha", 0.25), .seed = seed};
    for (int n : detail::scenario_ns(p, {4, 5, 6, 7, 8})) {
      detail::Stopwatch sw;
      const LatticeConfig lattice(n);
      lattice.check_cap(StateMode::mixed);
      const DensityState rho1 = make_density_state(st, lattice);
      std::optional<PureState> psi;
      if (is_pure_kind(st.kind)) psi = make_pure_state(st, lattice);
      const KrausChannel ch = spec.name == "spin-flip" ? make_spin_flip_even(lattice)
                                                       : detail::parse_channel(p, lattice, seed);
      require_valid(ch, Validation::enforce);
      const AdditiveOperator a = detail::parse_operator(p, lattice);
      auto out = detail::run_pipeline(rho1, psi, ch, a, budget, seed);
      SweepRecord rec;
      rec.row = Json{{"N", n}, {"state", st.kind}};
      for (const auto& [k, v] : out.row.items()) rec.row[k] = v;
      if (psi) {
        const auto p_in = max_variance(*psi);
        rec.row["max_variance_in"] = p_in.max_variance;
        rec.details["index_p_in"] = to_json(p_in);
      }
      for (const auto& [k, v] : out.details.items()) rec.details[k] = v;
      r.violation = r.violation || out.violation;
      finish(std::move(rec), sw);
    }
    return r;
  }

  // classical-mixture
  for (int n : detail::scenario_ns(p, {4, 5, 6, 7, 8, 9, 10})) {
    detail::Stopwatch sw;
    const LatticeConfig lattice(n);
    lattice.check_cap(StateMode::mixed);
    const DensityState rho = classical_mixture(lattice);
    const auto mz = AdditiveOperator::uniform(lattice, Axis::z);
    const auto q = maximize_q(rho, {.budget = budget,
                                    .seed = derive_seed(seed, 0xB000u + static_cast<std::uint64_t>(n)),
                                    .workers = opt.workers});
    // Tr(rho M^2) - Tr(rho M)^2 for the diagonal M_z
    const RVector m = realize_additive(mz).diagonal().real();
    const RVector pr = rho.matrix().diagonal().real();
    const double mean = pr.dot(m);
    const double var = pr.dot(m.cwiseProduct(m)) - mean * mean;
    SweepRecord rec;
    rec.row = Json{{"N", n},
                   {"q_value", q.best_value},
                   {"q_raw", q.best_raw},
                   {"q_over_N", q.best_value / n},
                   {"dc_at_Mz", double_commutator_trace_norm(rho, mz)},
                   {"variance_Mz", var}};
    rec.details = Json{{"index_q", to_json(q)}};
    finish(std::move(rec), sw);
  }
  r.fits.emplace_back("q_value", detail::fit_json(detail::column(r, "q_raw"), true));
  return r;
}

}  // namespace mqs
