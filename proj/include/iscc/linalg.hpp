#pragma once

// Small dense helpers shared by the metrics and optimizers. Templated on the
// Eigen expression type so callers can pass columns, blocks and maps.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace iscc {

/// u^H A u for Hermitian A (real part; the imaginary part is round-off).
template <class DerivedU, class DerivedA>
typename DerivedU::RealScalar hermitian_form(const Eigen::MatrixBase<DerivedU>& u,
                                             const Eigen::MatrixBase<DerivedA>& a) {
  return (u.adjoint() * a * u).value().real();
}

/// |u^H h|^2
template <class DerivedU, class DerivedH>
typename DerivedU::RealScalar combining_gain(const Eigen::MatrixBase<DerivedU>& u,
                                             const Eigen::MatrixBase<DerivedH>& h) {
  return std::norm(u.dot(h));
}

/// (u^H h h^H u) / (u^H D u): the generalized Rayleigh quotient maximized by
/// the receive beamformer.
template <class DerivedU, class DerivedH, class DerivedD>
typename DerivedU::RealScalar rayleigh_quotient(const Eigen::MatrixBase<DerivedU>& u,
                                                const Eigen::MatrixBase<DerivedH>& h,
                                                const Eigen::MatrixBase<DerivedD>& d) {
  return combining_gain(u, h) / hermitian_form(u, d);
}

/// Scales `u` to unit norm and rotates it so its first non-negligible entry is
/// real and positive.
template <class Derived>
void canonicalize_beam(Eigen::MatrixBase<Derived>& u) {
  using Real = typename Derived::RealScalar;
  u /= u.norm();
  const Real eps = Real(1e-12);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const auto z = u(i);
    if (std::abs(z) > eps) {
      u *= std::conj(z) / std::abs(z);
      u(i) = std::abs(u(i));
      break;
    }
  }
}

template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> matched_filter(const Eigen::MatrixBase<Derived>& h) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> u = h;
  canonicalize_beam(u);
  return u;
}

}  // namespace iscc
