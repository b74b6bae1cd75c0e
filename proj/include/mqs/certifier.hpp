#pragma once

// Numerical certification of the trade-off inequalities between index
// growth, CP success probability G and support volume |S|:
//
//   pure:  ||[A,rho2]||_inf <= (4|S| + ||[A,rho1]||_inf) / G
//   mixed: ||[A,[A,rho2]]||_1 <= (||[A,[A,rho1]]||_1 + 16|S|N
//                                 + 4|S|^2 G + 12|S|^2) / G
//
// together with the intermediate steps they rest on: ||[A,E]||_inf <= 2|S|,
// the trace-norm contraction of trace-non-increasing CP maps, and the
// bounds on the three terms of the double-commutator decomposition.

#include "mqs/channels.hpp"
#include "mqs/index_q.hpp"

#include <map>

namespace mqs {

// Lattices up to this dimension are certified with dense full-space
// linear algebra; larger ones use the exact compressed routes.
inline constexpr Eigen::Index dense_certify_limit = 256;

struct SupportBoundReport {
  std::vector<double> commutator_norms;  // ||[A, E_k]||_inf
  double bound = 0.0;                    // 2|S|
  double max_ratio = 0.0;                // max_k ||[A,E_k]||_inf / 2|S|
  int violations = 0;
};

inline SupportBoundReport check_support_bound(const AdditiveOperator& a, const KrausChannel& ch) {
  check_same_lattice(a.lattice(), ch.lattice());
  const auto& lattice = ch.lattice();
  SupportBoundReport r;
  r.bound = 2.0 * ch.support().volume();
  if (lattice.dim() <= dense_certify_limit) {
    const CMatrix am = realize_additive(a);
    for (std::size_t k = 0; k < ch.size(); ++k)
      r.commutator_norms.push_back(operator_norm(commutator(am, ch.embedded(k))));
  } else {
    // [A, E] = [A_S, E] is supported on S; its norm is the same on S alone.
    const LatticeConfig local(ch.support().volume(), lattice.local_dim());
    RMatrix c(local.n_sites(), a.coeffs().cols());
    for (int i = 0; i < local.n_sites(); ++i)
      c.row(i) = a.coeffs().row(ch.support().sites()[static_cast<std::size_t>(i)] - 1);
    const CMatrix as = realize_additive(AdditiveOperator(local, c));
    for (const CMatrix& e : ch.ops()) r.commutator_norms.push_back(operator_norm(commutator(as, e)));
  }
  for (double n : r.commutator_norms) {
    r.max_ratio = std::max(r.max_ratio, n / r.bound);
    if (n > r.bound + tol::slack) ++r.violations;
  }
  return r;
}

struct TradeoffReport {
  std::string inequality;  // "pure" or "mixed"
  bool applicable = false;
  std::string note;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double G = 0.0;
  int volume_S = 0;
  double tightness_ratio = 0.0;
  std::map<std::string, double> components;
  std::map<std::string, double> diagnostics;

  bool violated() const { return applicable && slack < -tol::slack; }
};

namespace detail {

// ||[A, |psi><psi|]||_inf, dense or through the two-dimensional range
// span{psi, A psi}.
inline double pure_commutator_norm(const PureState& psi, const AdditiveOperator& a) {
  if (psi.dim() <= dense_certify_limit) {
    const CMatrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
    return operator_norm(commutator(realize_additive(a), rho));
  }
  CMatrix k(psi.dim(), 2);
  k.col(0) = psi.amplitudes();
  k.col(1) = apply_additive(a, psi.amplitudes()).col(0);
  Eigen::HouseholderQR<CMatrix> qr(k);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(psi.dim(), 2);
  const CVector p = q.adjoint() * k.col(0);
  const CVector ap = q.adjoint() * k.col(1);
  const CMatrix c = ap * p.adjoint() - p * ap.adjoint();
  return operator_norm(c);
}

inline double double_commutator_norm(const DensityState& rho, const AdditiveOperator& a) {
  if (rho.dim() <= dense_certify_limit) return trace_norm(double_commutator(rho, a));
  return double_commutator_trace_norm(rho, a);
}

inline void finish(TradeoffReport& r) {
  r.slack = r.rhs - r.lhs;
  r.tightness_ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
}

}  // namespace detail

inline TradeoffReport check_pure_tradeoff(const PureState& psi1, const KrausChannel& e,
                                          const AdditiveOperator& a) {
  check_same_lattice(psi1.lattice(), a.lattice());
  const auto validity = validate(e);
  if (e.size() != 1 || !validity.valid)
    throw Error(ErrorKind::invalid_input,
                "pure trade-off needs a single Kraus operator with norm <= 1");
  TradeoffReport r;
  r.inequality = "pure";
  r.volume_S = e.support().volume();
  const CVector out = apply_on_support(e.ops().front(), e.support(), e.lattice(), psi1.amplitudes());
  r.G = out.squaredNorm();
  const double c1 = detail::pure_commutator_norm(psi1, a);
  r.components["4|S|"] = 4.0 * r.volume_S;
  r.components["||[A,rho1]||_inf"] = c1;
  if (!(r.G >= tol::null_outcome)) {
    r.note = "success probability below 1e-14";
    return r;
  }
  r.applicable = true;
  const PureState psi2 = apply_pure(e, psi1, Validation::skip).output;
  r.lhs = detail::pure_commutator_norm(psi2, a);
  r.rhs = (r.components["4|S|"] + c1) / r.G;
  const auto sb = check_support_bound(a, e);
  r.diagnostics["||[A,E]||_inf"] = sb.commutator_norms.front();
  r.diagnostics["chain_intermediate"] = (2.0 * sb.commutator_norms.front() + c1) / r.G;
  detail::finish(r);
  return r;
}

struct LemmaReport {
  double input_norm = 0.0;   // ||X||_1
  double output_norm = 0.0;  // ||sum_k E_k X E_k^dagger||_1
  double slack = 0.0;
  bool holds() const { return slack >= -tol::slack; }
};

// sum_k E_k X E_k^dagger for a lattice matrix X.
inline CMatrix apply_channel_map(const KrausChannel& ch, const CMatrix& x) {
  CMatrix out = CMatrix::Zero(x.rows(), x.cols());
  for (const CMatrix& e : ch.ops()) {
    CMatrix ex = x;
    apply_on_support(e, ch.support(), ch.lattice(), ex);
    CMatrix exe = ex.adjoint();
    apply_on_support(e, ch.support(), ch.lattice(), exe);
    out += exe.adjoint();
  }
  return out;
}

inline LemmaReport check_contraction_lemma(const CMatrix& x, const KrausChannel& ch) {
  if (x.rows() != ch.lattice().dim() || x.cols() != ch.lattice().dim())
    throw Error(ErrorKind::dimension_mismatch, "operator does not match channel lattice");
  if (hermiticity_defect(x) > 1e-10 * std::max(1.0, x.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::invalid_input, "lemma operand must be Hermitian");
  require_valid(ch, Validation::enforce);
  LemmaReport r;
  r.input_norm = trace_norm(x);
  CMatrix y = apply_channel_map(ch, x);
  r.output_norm = trace_norm(0.5 * (y + y.adjoint()));
  r.slack = r.input_norm - r.output_norm;
  return r;
}

struct XiReport {
  bool applicable = false;
  double G = 0.0;
  int volume_S = 0;
  int n_sites = 0;
  double xi1 = 0.0, xi2 = 0.0, xi3 = 0.0;  // trace norms
  double bound1 = 0.0;  // ||[A,[A,rho1]]||_1
  double bound2 = 0.0;  // 16|S|N
  double bound3 = 0.0;  // 4|S|^2 G + 12|S|^2
  double lhs = 0.0;     // ||[A,[A,rho2]]||_1
  double assembly_rhs = 0.0;  // (xi1 + xi2 + xi3) / G
  double decomposition_residual = 0.0;  // max |G [A,[A,rho2]] - sum Xi_j|

  double slack1() const { return bound1 - xi1; }
  double slack2() const { return bound2 - xi2; }
  double slack3() const { return bound3 - xi3; }
  double assembly_slack() const { return assembly_rhs - lhs; }
  bool all_hold() const {
    return !applicable || (slack1() >= -tol::slack && slack2() >= -tol::slack &&
                           slack3() >= -tol::slack && assembly_slack() >= -tol::slack);
  }
};

// Dense assembly of
//   Xi1 = sum E [A,[A,rho1]] E^dag
//   Xi2 = 2 sum ([A_S,E][A,rho1]E^dag + E[A,rho1][A_S,E^dag])
//   Xi3 = sum ([A_S,[A_S,E]]rho1 E^dag + E rho1 [A_S,[A_S,E^dag]]
//              + 2[A_S,E] rho1 [A_S,E^dag])
// with A_S = sum_{l in S} a(l).
inline XiReport compute_xi_terms(const DensityState& rho1, const KrausChannel& ch,
                                 const AdditiveOperator& a) {
  check_same_lattice(rho1.lattice(), a.lattice());
  require_valid(ch, Validation::enforce);
  const auto& lattice = ch.lattice();
  XiReport r;
  r.volume_S = ch.support().volume();
  r.n_sites = lattice.n_sites();
  const double s = r.volume_S, n = r.n_sites;
  const CMatrix& rho = rho1.matrix();
  const CMatrix am = realize_additive(a);
  const CMatrix as = realize_additive(a.restricted(ch.support()));
  const CMatrix c1 = commutator(am, rho);
  const CMatrix cc1 = commutator(am, c1);
  r.bound1 = trace_norm(0.5 * (cc1 + cc1.adjoint()));
  r.bound2 = 16.0 * s * n;

  const Eigen::Index d = lattice.dim();
  CMatrix xi1 = CMatrix::Zero(d, d), xi2 = CMatrix::Zero(d, d), xi3 = CMatrix::Zero(d, d);
  CMatrix numerator = CMatrix::Zero(d, d);
  for (std::size_t k = 0; k < ch.size(); ++k) {
    const CMatrix e = ch.embedded(k);
    const CMatrix ed = e.adjoint();
    const CMatrix ae = commutator(as, e);
    const CMatrix aed = commutator(as, ed);
    const CMatrix aae = commutator(as, ae);
    const CMatrix aaed = commutator(as, aed);
    xi1 += e * cc1 * ed;
    xi2 += 2.0 * (ae * c1 * ed + e * c1 * aed);
    xi3 += aae * rho * ed + e * rho * aaed + 2.0 * ae * rho * aed;
    numerator += e * rho * ed;
  }
  r.G = numerator.trace().real();
  r.bound3 = 4.0 * s * s * r.G + 12.0 * s * s;
  if (!(r.G >= tol::null_outcome)) return r;
  r.applicable = true;
  auto herm = [](const CMatrix& m) { return CMatrix(0.5 * (m + m.adjoint())); };
  r.xi1 = trace_norm(herm(xi1));
  r.xi2 = trace_norm(herm(xi2));
  r.xi3 = trace_norm(herm(xi3));
  const CMatrix gdc = commutator(am, commutator(am, numerator));
  r.lhs = trace_norm(herm(gdc)) / r.G;
  r.assembly_rhs = (r.xi1 + r.xi2 + r.xi3) / r.G;
  r.decomposition_residual = (gdc - (xi1 + xi2 + xi3)).cwiseAbs().maxCoeff();
  return r;
}

inline TradeoffReport check_mixed_tradeoff(const DensityState& rho1, const KrausChannel& ch,
                                           const AdditiveOperator& a) {
  check_same_lattice(rho1.lattice(), a.lattice());
  require_valid(ch, Validation::enforce);
  TradeoffReport r;
  r.inequality = "mixed";
  r.volume_S = ch.support().volume();
  const double s = r.volume_S, n = ch.lattice().n_sites();
  // G = sum_k ||E_k W||_F^2 for rho = W W^dagger
  double g = 0.0;
  for (const CMatrix& e : ch.ops()) {
    CMatrix ew = rho1.factor();
    apply_on_support(e, ch.support(), ch.lattice(), ew);
    g += ew.squaredNorm();
  }
  r.G = g;
  const double dc1 = detail::double_commutator_norm(rho1, a);
  r.components["||[A,[A,rho1]]||_1"] = dc1;
  r.components["16|S|N"] = 16.0 * s * n;
  r.components["4|S|^2G"] = 4.0 * s * s * g;
  r.components["12|S|^2"] = 12.0 * s * s;
  if (!(g >= tol::null_outcome)) {
    r.note = "success probability below 1e-14";
    return r;
  }
  r.applicable = true;
  const DensityState rho2 = apply_mixed(ch, rho1, Validation::skip).output;
  r.lhs = detail::double_commutator_norm(rho2, a);
  double sum = 0.0;
  for (const auto& [name, v] : r.components) sum += v;
  r.rhs = sum / g;
  detail::finish(r);
  return r;
}

}  // namespace mqs
