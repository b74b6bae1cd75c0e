#pragma once

// Test-side reference computations. Everything here is built from explicit
// Kronecker products and dense eigen-solvers, without calling the
// library's embedding, norm or index routines.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;
using V = Eigen::VectorXcd;

inline M sx() {
  M m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline M sy() {
  M m(2, 2);
  m << 0, C(0, -1), C(0, 1), 0;
  return m;
}
inline M sz() {
  M m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline M kron(const M& a, const M& b) {
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// op on 1-based site `site` of n qubits, site 1 leftmost.
inline M on_site(const M& op, int site, int n) {
  M out = M::Identity(1, 1);
  for (int l = 1; l <= n; ++l) out = kron(out, l == site ? op : M::Identity(2, 2));
  return out;
}

// op acting on the sorted 1-based `sites` of n qubits, built entry by
// entry from bit strings.
inline M embed(const M& op, const std::vector<int>& sites, int n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  auto sub = [&](Eigen::Index x) {
    Eigen::Index s = 0;
    for (int site : sites) s = (s << 1) | ((x >> (n - site)) & 1);
    return s;
  };
  Eigen::Index mask = 0;
  for (int site : sites) mask |= Eigen::Index{1} << (n - site);
  M out = M::Zero(d, d);
  for (Eigen::Index x = 0; x < d; ++x)
    for (Eigen::Index y = 0; y < d; ++y)
      if ((x & ~mask) == (y & ~mask)) out(x, y) = op(sub(x), sub(y));
  return out;
}

// sum_l (c_l . sigma) with c an n x 3 real array.
inline M additive(const Eigen::MatrixXd& c) {
  const int n = static_cast<int>(c.rows());
  const Eigen::Index d = Eigen::Index{1} << n;
  M a = M::Zero(d, d);
  for (int l = 0; l < n; ++l) {
    const M local = c(l, 0) * sx() + c(l, 1) * sy() + c(l, 2) * sz();
    a += on_site(local, l + 1, n);
  }
  return a;
}

inline M uniform_z(int n) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, 3);
  c.col(2).setOnes();
  return additive(c);
}

inline V cat(int n) {
  V v = V::Zero(Eigen::Index{1} << n);
  v(0) = v(v.size() - 1) = 1.0 / std::sqrt(2.0);
  return v;
}

inline double variance(const V& psi, const M& a) {
  const V ap = a * psi;
  const double mean = psi.dot(ap).real();
  return ap.squaredNorm() - mean * mean;
}

inline Eigen::VectorXd eigs(const M& h) {
  Eigen::SelfAdjointEigenSolver<M> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double trace_norm_h(const M& h) { return eigs(h).cwiseAbs().sum(); }
inline double op_norm_h(const M& h) { return eigs(h).cwiseAbs().maxCoeff(); }
inline double op_norm(const M& x) {
  Eigen::JacobiSVD<M> svd(x);
  return svd.singularValues()(0);
}

inline M dcomm(const M& a, const M& rho) {
  const M c = a * rho - rho * a;
  return a * c - c * a;
}

// Fibonacci lattice of `count` unit vectors on the sphere.
inline std::vector<std::array<double, 3>> fibonacci_sphere(int count) {
  std::vector<std::array<double, 3>> out;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double r = std::sqrt(1.0 - z * z);
    const double t = golden * i;
    out.push_back({r * std::cos(t), r * std::sin(t), z});
  }
  return out;
}

// Exhaustive per-site grid search of f over unit directions on every site,
// followed by a shrinking local grid around the incumbent. Returns the
// best value found.
inline double grid_maximize(int n, int grid, const std::function<double(const Eigen::MatrixXd&)>& f,
                            int zoom_rounds = 12) {
  const auto pts = fibonacci_sphere(grid);
  Eigen::MatrixXd c(n, 3), best_c(n, 3);
  double best = -1.0;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < 3; ++k) c(l, k) = pts[static_cast<std::size_t>(idx[static_cast<std::size_t>(l)])][static_cast<std::size_t>(k)];
    const double v = f(c);
    if (v > best) {
      best = v;
      best_c = c;
    }
    int l = 0;
    while (l < n && ++idx[static_cast<std::size_t>(l)] == grid) idx[static_cast<std::size_t>(l++)] = 0;
    if (l == n) break;
  }
  // local refinement: perturb one site at a time along two tangent
  // directions with a shrinking step
  double h = 0.5;
  for (int round = 0; round < zoom_rounds; ++round) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int l = 0; l < n; ++l) {
        for (int a = 0; a < 3; ++a)
          for (double s : {-1.0, 1.0}) {
            Eigen::MatrixXd t = best_c;
            t(l, a) += s * h;
            t.row(l).normalize();
            const double v = f(t);
            if (v > best + 1e-14) {
              best = v;
              best_c = t;
              improved = true;
            }
          }
      }
    }
    h *= 0.5;
  }
  return best;
}

}  // namespace oracle
