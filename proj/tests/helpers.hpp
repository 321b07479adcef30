#pragma once

#include <Eigen/Dense>

#include "majolyap/basis.hpp"
#include "majolyap/rng.hpp"
#include "majolyap/state.hpp"

namespace majolyap::testing {

// Random one-body generator with the Bogoliubov symmetry Sx h* Sx = -h,
// h Hermitian: blocks [[A, B], [-conj(B), -transpose(A)]] with A Hermitian
// and B antisymmetric.
inline Eigen::MatrixXcd random_ph_generator(int L, Rng& rng) {
  Eigen::MatrixXcd a(L, L), b(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      a(i, j) = rng.complex_gaussian();
      b(i, j) = rng.complex_gaussian();
    }
  a = ((a + a.adjoint()) / 2).eval();
  b = ((b - b.transpose()) / 2).eval();
  Eigen::MatrixXcd h(2 * L, 2 * L);
  h.topLeftCorner(L, L) = a;
  h.topRightCorner(L, L) = b;
  h.bottomLeftCorner(L, L) = -b.conjugate();
  h.bottomRightCorner(L, L) = -a.transpose();
  return h;
}

// Vacuum evolved by a random particle-hole-symmetric Gaussian unitary: a
// Haar-ish valid pure Gaussian state. A plain random isometry would violate
// the constraint Sx C* Sx = I - C and is not a physical state.
inline Eigen::MatrixXcd random_valid_isometry(int L, Rng& rng) {
  const Eigen::MatrixXcd h = random_ph_generator(L, rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd phases =
      (cxd(0.0, -1.0) * es.eigenvalues().cast<cxd>().array()).exp();
  const Eigen::MatrixXcd u =
      es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return u.leftCols(L);
}

inline GaussianPureState random_state(int L, std::uint64_t seed) {
  Rng rng(seed);
  return GaussianPureState::from_isometry(random_valid_isometry(L, rng));
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace majolyap::testing
