// Unit and property tests: Kraus channels, trade-off certifier, JSON/CSV
// emission, verification suites, adversarial search and scenarios.

#include "mqs/mqs.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

using namespace mqs;

namespace {

CVector bits(const LatticeConfig& l, std::string_view b) { return basis_state(l, b).amplitudes(); }

CMatrix proj0() {
  CMatrix p = CMatrix::Zero(2, 2);
  p(0, 0) = 1.0;
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// channels

TEST(Channels, ValidateExamples) {
  Rng rng(1);
  const LatticeConfig l(3);
  const SubsystemSupport s({2});
  const auto u = validate(random_channel(l, s, 1, 5, {.unitary = true, .scale = std::nullopt}));
  EXPECT_TRUE(u.valid);
  EXPECT_TRUE(u.trace_preserving);
  const auto p = validate(KrausChannel(l, s, {proj0()}));
  EXPECT_TRUE(p.valid);
  EXPECT_FALSE(p.trace_preserving);
  CMatrix g = gaussian_matrix(rng, 2, 2);
  g *= 1.5 / oracle::op_norm(g);
  const auto bad = validate(KrausChannel(l, s, {g}));
  EXPECT_FALSE(bad.valid);
  EXPECT_NEAR(bad.max_eigenvalue, 2.25, 1e-10);
  EXPECT_THROW(require_valid(KrausChannel(l, s, {g}), Validation::enforce), Error);
  EXPECT_THROW(KrausChannel(l, s, {CMatrix::Identity(4, 4)}), Error);
}

TEST(Channels, ApplyPureExamples) {
  const LatticeConfig l(3);
  const PureState cat = cat_state(l);
  const auto id = apply_pure(identity_channel(l, SubsystemSupport({1})), cat);
  EXPECT_NEAR(id.success_probability, 1.0, 1e-14);
  EXPECT_NEAR(fidelity(id.output, cat), 1.0, 1e-14);

  const LatticeConfig l4(4);
  const auto sc = make_local_projection(l4, 0.5);
  EXPECT_NEAR(sc.a, 0.5, 1e-15);
  EXPECT_NEAR(sc.b, std::sqrt(3.0) / 2.0, 1e-15);
  CMatrix expect(2, 2);
  expect << 0.25, std::sqrt(3.0) / 4.0, std::sqrt(3.0) / 4.0, 0.75;
  EXPECT_LT((sc.channel.ops().front() - expect).cwiseAbs().maxCoeff(), 1e-15);
  const auto out = apply_pure(sc.channel, sc.input);
  EXPECT_NEAR(out.success_probability, 3.0 / 8.0, 1e-14);
  CVector v(2);
  v << 0.5, std::sqrt(3.0) / 2.0;
  const CVector target = oracle::kron(v, oracle::cat(3));
  EXPECT_NEAR(std::norm(target.dot(out.output.amplitudes())), 1.0, 1e-12);
  EXPECT_GE(max_variance(out.output).max_variance, 9.0 - 1e-9);

  try {
    apply_pure(KrausChannel(l, SubsystemSupport({1}), {proj0()}), basis_state(l, "101"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::null_outcome);
  }
  EXPECT_THROW(apply_pure(random_channel(l, SubsystemSupport({1}), 2, 3), cat), Error);
}

TEST(Channels, ApplyMixedExamples) {
  Rng rng(2);
  const LatticeConfig l(2);
  const auto mm = apply_mixed(KrausChannel(l, SubsystemSupport({1}), {proj0()}), DensityState::maximally_mixed(l));
  EXPECT_NEAR(mm.success_probability, 0.5, 1e-14);
  const LatticeConfig l4(4);
  const auto rho = random_density(l4, 3, rng);
  const auto tp = complete_channel(random_channel(l4, SubsystemSupport({1, 3}), 2, 8));
  EXPECT_TRUE(validate(tp).trace_preserving);
  EXPECT_NEAR(apply_mixed(tp, rho).success_probability, 1.0, 1e-10);
}

TEST(Channels, SpinFlipEven) {
  const LatticeConfig l4(4), l2(2), l5(5);
  const auto out = apply_pure(make_spin_flip_even(l4), all_zero_state(l4));
  EXPECT_NEAR(out.success_probability, 1.0, 1e-14);
  EXPECT_NEAR(std::norm(out.output.amplitudes().dot(bits(l4, "0101"))), 1.0, 1e-14);
  CVector v = CVector::Zero(4);
  v(1) = v(2) = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(fidelity(apply_pure(make_spin_flip_even(l2), cat_state(l2)).output, PureState(l2, v)), 1.0, 1e-14);
  EXPECT_EQ(make_spin_flip_even(l5).support().volume(), 2);
}

TEST(Channels, LocalProjectionProbabilityAndFidelity) {
  for (double alpha : {0.25, 0.5})
    for (int n = 4; n <= 8; ++n) {
      const LatticeConfig l(n);
      const auto sc = make_local_projection(l, alpha);
      const auto out = apply_pure(sc.channel, sc.input);
      const double x = std::pow(n, -2.0 * alpha);
      EXPECT_NEAR(out.success_probability, 2.0 * x * (1.0 - x), 1e-12);
      EXPECT_GE(max_variance(out.output).max_variance, (n - 1.0) * (n - 1.0) - 1e-9);
    }
  EXPECT_THROW(make_local_projection(LatticeConfig(4), 0.7), Error);
}

TEST(Channels, CatCreatorExamples) {
  const LatticeConfig l(6);
  const SubsystemSupport s = SubsystemSupport::range(1, 3);
  const PureState zero = all_zero_state(l);
  const CVector expect = oracle::kron(oracle::cat(3), bits(LatticeConfig(3), "000"));
  for (auto mode : {CatCreatorMode::literal, CatCreatorMode::completed}) {
    const auto ch = make_cat_creator(zero, s, mode);
    const auto out = apply_mixed(ch, DensityState::from_pure(zero));
    EXPECT_NEAR(out.success_probability, 1.0, 1e-12);
    EXPECT_NEAR((expect.adjoint() * out.output.matrix() * expect)(0, 0).real(), 1.0, 1e-12);
  }
  // Schmidt rank 2 input: literal operator has norm sqrt(2)
  Rng rng(4);
  const LatticeConfig l2(2);
  CVector v(4);
  v << 0.6, 0.0, 0.0, 0.8;
  const auto lit = make_cat_creator(PureState(l2, v), SubsystemSupport({1}), CatCreatorMode::literal);
  EXPECT_NEAR(validate(lit).max_eigenvalue, 2.0, 1e-12);
  EXPECT_FALSE(validate(lit).valid);
  const PureState r = random_state(LatticeConfig(4), rng);
  const auto comp = make_cat_creator(r, SubsystemSupport({1, 2}), CatCreatorMode::completed);
  EXPECT_LT((comp.completeness() - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(apply_mixed(comp, DensityState::from_pure(r)).success_probability, 1.0, 1e-10);
  EXPECT_THROW(make_cat_creator(r, SubsystemSupport::all(r.lattice()), CatCreatorMode::completed), Error);
}

TEST(ChannelsProperty, CatCreatorReducedStateIsCat) {
  Rng rng(13);
  for (int t = 0; t < 10; ++t) {
    const LatticeConfig l(rng.uniform_int(3, 6));
    const PureState psi = random_state(l, rng);
    const SubsystemSupport s = SubsystemSupport::range(1, l.n_sites() / 2);
    const auto out = apply_mixed(make_cat_creator(psi, s, CatCreatorMode::completed), DensityState::from_pure(psi));
    // <cat_S| Tr_rest(rho) |cat_S> = 1: project with |cat><cat| (x) 1
    const CVector c = oracle::cat(s.volume());
    const CMatrix p = oracle::kron(c * c.adjoint(), CMatrix::Identity(Eigen::Index{1} << (l.n_sites() - s.volume()),
                                                                      Eigen::Index{1} << (l.n_sites() - s.volume())));
    EXPECT_NEAR((p * out.output.matrix()).trace().real(), 1.0, 1e-10);
  }
}

TEST(ChannelsProperty, RandomChannelInvariantsAndDeterminism) {
  Rng rng(14);
  for (int t = 0; t < 30; ++t) {
    const LatticeConfig l(rng.uniform_int(1, 5));
    const auto s = mqs::detail::random_support(l, rng);
    const int k = rng.uniform_int(1, 4);
    const std::uint64_t seed = rng.next();
    const auto a = random_channel(l, s, k, seed), b = random_channel(l, s, k, seed);
    EXPECT_TRUE(validate(a).valid);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a.ops()[i] == b.ops()[i]);
    const auto rho = random_density(l, 2, rng);
    const auto out = apply_mixed(a, rho);
    EXPECT_GE(out.success_probability, 0.0);
    EXPECT_LE(out.success_probability, 1.0 + 1e-10);
    EXPECT_NEAR(out.output.matrix().trace().real(), 1.0, 1e-10);
  }
  const auto u = random_channel(LatticeConfig(2), SubsystemSupport({1, 2}), 1, 3, {.unitary = true, .scale = 1.0});
  EXPECT_TRUE(validate(u).trace_preserving);
}

TEST(ChannelsProperty, ApplyMixedAgreesWithApplyPure) {
  Rng rng(15);
  for (int t = 0; t < 20; ++t) {
    const LatticeConfig l(rng.uniform_int(2, 6));
    const PureState psi = random_state(l, rng);
    const auto ch = random_channel(l, mqs::detail::random_support(l, rng), 1, rng.next());
    const auto p = apply_pure(ch, psi);
    const auto m = apply_mixed(ch, DensityState::from_pure(psi));
    EXPECT_NEAR(p.success_probability, m.success_probability, 1e-12);
    const CVector& a = p.output.amplitudes();
    EXPECT_LT((a * a.adjoint() - m.output.matrix()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

// ---------------------------------------------------------------------------
// certifier

TEST(Certifier, SupportBoundExamples) {
  const LatticeConfig l(3);
  const auto mz = AdditiveOperator::uniform(l, Axis::z);
  const auto tight = check_support_bound(mz, KrausChannel(l, SubsystemSupport({1}), {pauli_x()}));
  EXPECT_NEAR(tight.commutator_norms.front(), 2.0, 1e-12);
  EXPECT_NEAR(tight.max_ratio, 1.0, 1e-12);
  const auto zero = check_support_bound(mz, KrausChannel(l, SubsystemSupport({2}), {pauli_z()}));
  EXPECT_NEAR(zero.max_ratio, 0.0, 1e-14);
}

TEST(CertifierProperty, SupportBoundRandomAgainstOracle) {
  Rng rng(16);
  for (int t = 0; t < 100; ++t) {
    const LatticeConfig l(rng.uniform_int(1, 6));
    const auto s = mqs::detail::random_support(l, rng);
    const auto ch = random_channel(l, s, rng.uniform_int(1, 3), rng.next());
    const auto a = mqs::detail::random_additive(l, rng);
    const auto r = check_support_bound(a, ch);
    EXPECT_EQ(r.violations, 0);
    const oracle::M am = oracle::additive(a.coeffs());
    for (std::size_t k = 0; k < ch.size(); ++k) {
      const oracle::M e = oracle::embed(ch.ops()[k], s.sites(), l.n_sites());
      const double ref = oracle::op_norm(am * e - e * am);
      EXPECT_NEAR(r.commutator_norms[k], ref, 1e-9);
      EXPECT_LE(ref, 2.0 * s.volume() + 1e-9);
    }
  }
}

TEST(Certifier, PureTradeoffLocalProjection) {
  const LatticeConfig l(4);
  const auto sc = make_local_projection(l, 0.5);
  const auto r = check_pure_tradeoff(sc.input, sc.channel, AdditiveOperator::uniform(l, Axis::z));
  EXPECT_NEAR(r.lhs, std::sqrt(9.75), 1e-10);
  EXPECT_NEAR(r.rhs, (8.0 / 3.0) * (4.0 + std::sqrt(12.0)), 1e-10);
  EXPECT_NEAR(r.G, 0.375, 1e-14);
  EXPECT_GT(r.slack, 0.0);
  EXPECT_NEAR(r.rhs, (r.components.at("4|S|") + r.components.at("||[A,rho1]||_inf")) / r.G, 1e-10);
  // dense oracle for both sides
  const oracle::M mz = oracle::uniform_z(4);
  const oracle::V psi1 = sc.input.amplitudes();
  const oracle::M e = oracle::embed(sc.channel.ops().front(), {1}, l.n_sites());
  const oracle::V out = (e * psi1).normalized();
  const oracle::M rho1 = psi1 * psi1.adjoint(), rho2 = out * out.adjoint();
  EXPECT_NEAR(r.lhs, oracle::op_norm(mz * rho2 - rho2 * mz), 1e-10);
  EXPECT_NEAR(r.components.at("||[A,rho1]||_inf"), oracle::op_norm(mz * rho1 - rho1 * mz), 1e-10);
}

TEST(Certifier, PureTradeoffIdentity) {
  Rng rng(17);
  const LatticeConfig l(4);
  const PureState psi = random_state(l, rng);
  const auto a = mqs::detail::random_additive(l, rng);
  const SubsystemSupport s({1, 3});
  const auto r = check_pure_tradeoff(psi, identity_channel(l, s), a);
  EXPECT_NEAR(r.G, 1.0, 1e-12);
  EXPECT_NEAR(r.slack, 4.0 * s.volume(), 1e-10);
  EXPECT_THROW(check_pure_tradeoff(psi, random_channel(l, s, 2, 1), a), Error);
}

TEST(Certifier, PureTradeoffInapplicableWhenGIsZero) {
  const LatticeConfig l(3);
  const auto r = check_pure_tradeoff(basis_state(l, "100"), KrausChannel(l, SubsystemSupport({1}), {proj0()}),
                                     AdditiveOperator::uniform(l, Axis::z));
  EXPECT_FALSE(r.applicable);
  EXPECT_FALSE(r.violated());
}

TEST(Certifier, LemmaExamples) {
  Rng rng(18);
  const LatticeConfig l(2);
  CMatrix x = gaussian_matrix(rng, 4, 4);
  x = (x + x.adjoint()).eval();
  const auto u = check_contraction_lemma(x, random_channel(l, SubsystemSupport({1, 2}), 1, 2, {.unitary = true, .scale = 1.0}));
  EXPECT_NEAR(u.output_norm, u.input_norm, 1e-10);
  const auto p = check_contraction_lemma(embed_local(pauli_x(), 1, l), KrausChannel(l, SubsystemSupport({1}), {proj0()}));
  EXPECT_LE(p.output_norm, 2.0 + 1e-12);
  EXPECT_NEAR(p.input_norm, 4.0, 1e-12);
  EXPECT_THROW(check_contraction_lemma(gaussian_matrix(rng, 4, 4), KrausChannel(l, SubsystemSupport({1}), {proj0()})), Error);
}

TEST(Certifier, XiExamples) {
  Rng rng(19);
  const LatticeConfig l(4);
  const auto mz = AdditiveOperator::uniform(l, Axis::z);
  const auto rho = random_density(l, 2, rng);
  const auto c = compute_xi_terms(rho, KrausChannel(l, SubsystemSupport({2}), {pauli_z()}), mz);
  EXPECT_LT(c.xi2, 1e-12);
  EXPECT_LT(c.xi3, 1e-12);
  EXPECT_LE(c.xi1, c.bound1 + 1e-9);
  const auto id = compute_xi_terms(rho, identity_channel(l, SubsystemSupport({1, 2})), mz);
  EXPECT_NEAR(id.xi1, id.bound1, 1e-9);
  EXPECT_LT(id.xi2, 1e-12);
  EXPECT_LT(id.xi3, 1e-12);
  EXPECT_NEAR(id.assembly_rhs, id.lhs, 1e-9);
  EXPECT_TRUE(id.all_hold());
}

TEST(CertifierProperty, XiDecompositionIsExact) {
  Rng rng(20);
  for (int t = 0; t < 30; ++t) {
    const LatticeConfig l(rng.uniform_int(2, 5));
    const auto rho = random_density(l, rng.uniform_int(1, 3), rng);
    const auto ch = random_channel(l, mqs::detail::random_support(l, rng), rng.uniform_int(1, 3), rng.next());
    const auto a = mqs::detail::random_additive(l, rng);
    const auto xi = compute_xi_terms(rho, ch, a);
    ASSERT_TRUE(xi.applicable);
    EXPECT_LT(xi.decomposition_residual, 1e-10);
    EXPECT_TRUE(xi.all_hold());
    const auto m = check_mixed_tradeoff(rho, ch, a);
    EXPECT_NEAR(m.lhs, xi.lhs, 1e-9 * std::max(1.0, m.lhs));
    EXPECT_NEAR(m.G, xi.G, 1e-12);
  }
}

TEST(Certifier, MixedTradeoffExamples) {
  for (int n = 2; n <= 6; ++n) {
    const LatticeConfig l(n);
    const auto mz = AdditiveOperator::uniform(l, Axis::z);
    const auto flip = check_mixed_tradeoff(classical_mixture(l), make_spin_flip_even(l), mz);
    EXPECT_NEAR(flip.lhs, 0.0, 1e-10);
    EXPECT_NEAR(flip.slack, flip.rhs, 1e-10);
    const SubsystemSupport s({1});
    const auto id = check_mixed_tradeoff(DensityState::from_pure(cat_state(l)), identity_channel(l, s), mz);
    EXPECT_NEAR(id.lhs, 4.0 * n * n, 1e-9);
    EXPECT_NEAR(id.rhs, 4.0 * n * n + 16.0 * n + 4.0 + 12.0, 1e-9);
    double sum = 0.0;
    for (const auto& [k, v] : id.components) sum += v;
    EXPECT_NEAR(id.rhs, sum / id.G, 1e-10);
  }
}

TEST(CertifierProperty, PureAndMixedPipelinesAgreeOnSingleKraus) {
  Rng rng(22);
  for (int t = 0; t < 30; ++t) {
    const LatticeConfig l(rng.uniform_int(2, 6));
    const PureState psi = random_state(l, rng);
    const auto ch = mqs::detail::random_single_kraus(l, mqs::detail::random_support(l, rng), rng);
    const auto a = mqs::detail::random_additive(l, rng);
    const auto p = check_pure_tradeoff(psi, ch, a);
    const auto m = check_mixed_tradeoff(DensityState::from_pure(psi), ch, a);
    EXPECT_NEAR(p.G, m.G, 1e-12);
    EXPECT_GE(p.slack, -1e-9);
    EXPECT_GE(m.slack, -1e-9);
  }
}

TEST(CertifierProperty, LargeLatticeRoutesMatchDense) {
  // dimension above the dense limit uses the compressed routes
  Rng rng(23);
  const LatticeConfig l(9);
  const PureState psi = random_state(l, rng);
  const SubsystemSupport s({2, 7});
  const auto ch = random_channel(l, s, 1, 77);
  const auto a = mqs::detail::random_additive(l, rng);
  const auto r = check_pure_tradeoff(psi, ch, a);
  const oracle::M am = oracle::additive(a.coeffs());
  const oracle::V out = (oracle::embed(ch.ops().front(), s.sites(), l.n_sites()) * psi.amplitudes()).normalized();
  const oracle::M rho2 = out * out.adjoint();
  EXPECT_NEAR(r.lhs, oracle::op_norm_h(oracle::M(oracle::C(0, 1) * (am * rho2 - rho2 * am))), 1e-9);
  const auto sb = check_support_bound(a, ch);
  const oracle::M e = oracle::embed(ch.ops().front(), s.sites(), l.n_sites());
  EXPECT_NEAR(sb.commutator_norms.front(), oracle::op_norm(am * e - e * am), 1e-9);
}

TEST(Certifier, CatCreationScalingAtFixedG) {
  // completed cat creator with |S| = N/2: the output double commutator at
  // M_z grows as N^2 while G stays 1
  std::vector<std::pair<int, double>> pts;
  for (int n = 4; n <= 10; n += 2) {
    const LatticeConfig l(n);
    const auto s = SubsystemSupport::range(1, n / 2);
    const auto r = check_mixed_tradeoff(DensityState::from_pure(all_zero_state(l)),
                                        make_cat_creator(all_zero_state(l), s, CatCreatorMode::completed),
                                        AdditiveOperator::uniform(l, Axis::z));
    EXPECT_NEAR(r.G, 1.0, 1e-12);
    EXPECT_NEAR(r.lhs, n * n, 1e-9);
    EXPECT_GE(r.slack, 0.0);
    pts.emplace_back(n, r.lhs);
  }
  EXPECT_NEAR(fit_exponent(pts).exponent, 2.0, 1e-9);
}

// ---------------------------------------------------------------------------
// serialization

TEST(Serialize, DoubleFormattingAndDeterminism) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(4.0), "4");
  const LatticeConfig l(4);
  const auto sc = make_local_projection(l, 0.5);
  const auto r = check_pure_tradeoff(sc.input, sc.channel, AdditiveOperator::uniform(l, Axis::z));
  const std::string a = to_json_text(to_json(r)), b = to_json_text(to_json(r));
  EXPECT_EQ(a, b);
  const Json j = Json::parse(a);
  EXPECT_TRUE(j["components"].contains("4|S|"));
  EXPECT_EQ(j["G"].get<double>(), 0.375);
}

TEST(Serialize, RoundTrips) {
  Rng rng(24);
  const LatticeConfig l(3);
  const auto ch = random_channel(l, SubsystemSupport({1, 3}), 2, 5);
  const auto ch2 = channel_from_json(Json::parse(to_json_text(channel_to_json(ch))));
  for (std::size_t k = 0; k < ch.size(); ++k) EXPECT_TRUE(ch.ops()[k] == ch2.ops()[k]);
  const PureState psi = random_state(l, rng);
  EXPECT_TRUE(pure_state_from_json(Json::parse(to_json_text(pure_state_to_json(psi)))).amplitudes() == psi.amplitudes());
  const auto a = mqs::detail::random_additive(l, rng);
  EXPECT_TRUE(additive_from_json(Json::parse(to_json_text(additive_to_json(a)))).coeffs() == a.coeffs());
  const auto rho = random_density(l, 2, rng);
  EXPECT_TRUE(density_state_from_json(Json::parse(to_json_text(density_state_to_json(rho)))).matrix() == rho.matrix());
}

TEST(Serialize, CsvQuotingAndWriteFailure) {
  CsvTable t{{"N", "label"}, {{CsvCell(4LL), CsvCell(std::string("a,b"))}, {CsvCell(5LL), CsvCell(0.5)}}};
  EXPECT_EQ(to_csv_text(t), "N,label\n4,\"a,b\"\n5,0.5\n");
  try {
    write_file("/nonexistent-dir/x.json", "{}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}

// ---------------------------------------------------------------------------
// verification suites and search

TEST(Verify, SmallSuitesPassAndAreDeterministic) {
  VerifyConfig cfg{.trials = 40, .seed = 3, .max_sites_pure = 5, .max_sites_mixed = 4};
  const auto a = run_verify(cfg);
  EXPECT_TRUE(a.pass());
  cfg.workers = 3;
  const auto b = run_verify(cfg);
  EXPECT_EQ(to_json_text(to_json(a)), to_json_text(to_json(b)));
  EXPECT_THROW(run_verify({.trials = 0}), Error);
}

TEST(Verify, InvalidChannelsAreRejectedNotViolations) {
  const auto r = run_verify({.suites = {Suite::pure, Suite::lemma},
                             .trials = 20,
                             .seed = 5,
                             .max_sites_pure = 4,
                             .max_sites_mixed = 3,
                             .inject_invalid_every = 2});
  EXPECT_TRUE(r.pass());
  for (const auto& s : r.suites) EXPECT_EQ(s.rejected, 10);
}

TEST(Search, SupportBoundReachesOne) {
  const auto r = adversarial_search({.target = SearchTarget::support_bound, .trials = 5, .seed = 2, .max_sites = 4});
  EXPECT_GE(r.max_ratio, 1.0 - 1e-9);
  EXPECT_LE(r.max_ratio, 1.0 + 1e-9);
}

TEST(Search, PureProjectorsStayBelowOne) {
  const auto r = adversarial_search({.target = SearchTarget::pure,
                                     .trials = 2000,
                                     .seed = 3,
                                     .max_sites = 6,
                                     .climb_steps = 0,
                                     .single_site_projectors = true});
  EXPECT_LE(r.max_ratio, 1.0 + 1e-9);
  EXPECT_GT(r.max_ratio, 0.0);
}

TEST(Search, MixedRatioRecorded) {
  const auto a = adversarial_search({.target = SearchTarget::mixed, .trials = 6, .seed = 4, .max_sites = 4, .climb_steps = 5});
  EXPECT_LT(a.max_ratio, 1.0);
  const auto b = adversarial_search(
      {.target = SearchTarget::mixed, .trials = 6, .seed = 4, .max_sites = 4, .climb_steps = 5, .workers = 2});
  EXPECT_EQ(to_json_text(to_json(a)), to_json_text(to_json(b)));
}

// ---------------------------------------------------------------------------
// scenarios

TEST(Scenario, LocalProjection) {
  const auto r = run_scenario({"local-projection", Json{{"n", 4}, {"alpha", 0.5}}});
  ASSERT_EQ(r.records.size(), 1u);
  const Json& row = r.records.front().row;
  EXPECT_NEAR(row["G"].get<double>(), 0.375, 1e-14);
  EXPECT_GE(row["max_variance_out"].get<double>(), 9.0 - 1e-9);
  EXPECT_GT(row["slack"].get<double>(), 0.0);
  EXPECT_FALSE(r.violation);
}

TEST(Scenario, CatCreationCompleted) {
  const auto r = run_scenario({"cat-creation", Json{{"n", 8}, {"mode", "completed"}, {"budget", 1}}});
  const Json& row = r.records.front().row;
  EXPECT_NEAR(row["G"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(row["q_uniform_z_S"].get<double>(), 64.0, 1e-9);
  EXPECT_NEAR(row["q_expected"].get<double>(), 64.0, 0.0);
  EXPECT_FALSE(r.violation);
}

TEST(Scenario, ClassicalMixture) {
  const auto r = run_scenario({"classical-mixture", Json{{"n", 6}, {"budget", 1}}});
  const Json& row = r.records.front().row;
  EXPECT_LE(row["q_over_N"].get<double>(), 8.0 + 1e-9);
  EXPECT_NEAR(row["variance_Mz"].get<double>(), 36.0, 1e-9);
  EXPECT_NEAR(row["dc_at_Mz"].get<double>(), 0.0, 1e-12);
}

TEST(Scenario, SpinFlipAndCustom) {
  const auto sf = run_scenario({"spin-flip", Json{{"n_range", "3:5"}, {"budget", 1}}});
  EXPECT_EQ(sf.records.size(), 3u);
  EXPECT_FALSE(sf.violation);
  const auto cu = run_scenario({"custom", Json{{"n", 4},
                                               {"state", "random-density"},
                                               {"channel", Json{{"kind", "random"}, {"support", Json::array({1, 2})}, {"n_kraus", 2}}},
                                               {"operator", "staggered-x"},
                                               {"budget", 1}}});
  EXPECT_FALSE(cu.violation);
  EXPECT_TRUE(cu.records.front().details.contains("mixed_tradeoff"));
}

TEST(Scenario, SchemaValidation) {
  EXPECT_THROW(run_scenario({"local-projection", Json{{"mode", "literal"}}}), Error);
  EXPECT_THROW(run_scenario({"local-projection", Json{{"alpha", 0.9}}}), Error);
  EXPECT_THROW(run_scenario({"nope", Json::object()}), Error);
  EXPECT_THROW(run_scenario({"cat-creation", Json{{"n", 4}, {"n_range", "4:6"}}}), Error);
  EXPECT_THROW(scenario_from_json(Json{{"n", 4}}), Error);
  EXPECT_THROW(parse_n_range("4-6"), Error);
  EXPECT_THROW(parse_n_range("6:4"), Error);
}

TEST(Scenario, SweepEmissionIsByteIdentical) {
  const ScenarioSpec spec{"local-projection", Json{{"n_range", "4:6"}, {"alpha", 0.25}}};
  const auto a = run_scenario(spec), b = run_scenario(spec);
  EXPECT_EQ(to_csv_text(to_csv_table(a)), to_csv_text(to_csv_table(b)));
  EXPECT_EQ(to_json_text(to_json(a)), to_json_text(to_json(b)));
  const std::string csv = to_csv_text(to_csv_table(a));
  EXPECT_EQ(csv.substr(0, csv.find('\n')).rfind("N,alpha,G,", 0), 0u);
  EXPECT_NE(csv.find("max_variance_out_exponent"), std::string::npos);
}

TEST(Sweep, IndexSweeps) {
  const auto p = sweep_index_p({.kind = "zero"}, {4, 6, 8});
  EXPECT_NEAR(p.fits.front().second["exponent"].get<double>(), 1.0, 1e-9);
  const auto q = sweep_index_q({.kind = "maximally-mixed"}, {4, 5, 6}, {.budget = 1});
  for (const auto& rec : q.records) EXPECT_EQ(rec.row["q_value"].get<double>(), rec.row["N"].get<double>());
  EXPECT_TRUE(q.fits.front().second["floor_applied"].get<bool>());
  EXPECT_NEAR(q.fits.front().second["exponent"].get<double>(), 1.0, 1e-12);
  EXPECT_THROW(sweep_index_p({.kind = "classical"}, {4}), Error);
  EXPECT_THROW(sweep_index_p({.kind = "cat"}, {15}), Error);
}

TEST(Sweep, ProductMixtureExponent) {
  const auto q = sweep_index_q({.kind = "product-mixture"}, {4, 5, 6, 7, 8, 9, 10}, {.budget = 1});
  const double e = q.fits.front().second["exponent"].get<double>();
  RecordProperty("fitted_slope", std::to_string(e));
  EXPECT_LE(e, 1.1);
}
