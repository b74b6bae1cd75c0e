#pragma once

// Schatten k-norms. Hermitian and anti-Hermitian inputs go through the
// eigenvalue route; anything else uses singular values.

#include "mqs/core.hpp"

namespace mqs {

class SchattenOrder {
 public:
  explicit SchattenOrder(double k) : k_(k) {
    if (!(k >= 1.0)) throw Error(ErrorKind::invalid_input, "Schatten order must be >= 1");
  }
  static SchattenOrder trace() { return SchattenOrder(1.0); }
  static SchattenOrder frobenius() { return SchattenOrder(2.0); }
  static SchattenOrder operator_norm() {
    return SchattenOrder(std::numeric_limits<double>::infinity());
  }

  double k() const { return k_; }
  bool is_infinite() const { return std::isinf(k_); }

 private:
  double k_;
};

// (sum |e_j|^k)^(1/k) over the given spectrum; max |e_j| for k = inf.
inline double schatten_from_spectrum(const RVector& values, SchattenOrder order) {
  if (values.size() == 0) return 0.0;
  const RVector mags = values.cwiseAbs();
  const double top = mags.maxCoeff();
  if (order.is_infinite() || top == 0.0) return top;
  if (order.k() == 1.0) return mags.sum();
  // scale by the largest magnitude to keep pow() in range
  double acc = 0.0;
  for (double m : mags) acc += std::pow(m / top, order.k());
  return top * std::pow(acc, 1.0 / order.k());
}

inline RVector hermitian_eigenvalues(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline RVector singular_values(const CMatrix& x) {
  Eigen::BDCSVD<CMatrix> svd(x);
  return svd.singularValues();
}

inline double schatten_norm(const CMatrix& x, SchattenOrder order) {
  if (x.rows() != x.cols()) return schatten_from_spectrum(singular_values(x), order);
  if (x.size() == 0) return 0.0;
  if (!x.allFinite()) throw Error(ErrorKind::invalid_input, "matrix must be finite");
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  if ((x - x.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale)
    return schatten_from_spectrum(hermitian_eigenvalues(0.5 * (x + x.adjoint())), order);
  if ((x + x.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale) {
    const CMatrix h = Complex(0, 0.5) * (x - x.adjoint());
    return schatten_from_spectrum(hermitian_eigenvalues(h), order);
  }
  return schatten_from_spectrum(singular_values(x), order);
}

inline double trace_norm(const CMatrix& x) { return schatten_norm(x, SchattenOrder::trace()); }
inline double operator_norm(const CMatrix& x) {
  return schatten_norm(x, SchattenOrder::operator_norm());
}

}  // namespace mqs
