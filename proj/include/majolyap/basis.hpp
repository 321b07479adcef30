#pragma once

// Mode conventions and small dense helpers used everywhere else.
//
// L complex fermion modes c_1..c_L correspond to 2L Majorana operators
//   gamma_{2j-1} = c_j + c_j^dag,   gamma_{2j} = -i (c_j - c_j^dag),
// and the mode vector phi = (c_1..c_L, c_1^dag..c_L^dag)^T collects all
// annihilators first. Omega is the 2L x 2L map with gamma = Omega phi; it is
// sqrt(2) times a unitary, Omega Omega^dag = Omega^dag Omega = 2 Id, and its
// conjugate satisfies Omega* = Omega Sigma_x with Sigma_x = [[0,I],[I,0]].
//
// A pure Gaussian state is held as a 2L x L isometry U whose columns are the
// coefficient vectors of the state's annihilation operators d = U^dag phi.
// Its complex-mode correlation matrix is C = U U^dag = <phi phi^dag>, and the
// real antisymmetric Majorana covariance is
//   Gamma = i (Omega C Omega^dag - Id),    Gamma_ij = (i/2) <[gamma_i, gamma_j]>,
// with inverse C = Omega^dag (-i Gamma + Id) Omega / 4. On the vacuum the
// 2x2 site blocks of Gamma are [[0,-1],[1,0]] (i.e. <i gamma_1 gamma_2> = -1).

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace majolyap {

using cxd = std::complex<double>;

// gamma = Omega phi. Row 2j-1 of Omega reads c_j + c_j^dag, row 2j reads
// -i c_j + i c_j^dag (1-based rows).
inline Eigen::MatrixXcd majorana_map(int L) {
  if (L < 1) throw std::invalid_argument("majorana_map: L must be >= 1");
  Eigen::MatrixXcd omega = Eigen::MatrixXcd::Zero(2 * L, 2 * L);
  const cxd I(0.0, 1.0);
  for (int j = 0; j < L; ++j) {
    omega(2 * j, j) = 1.0;
    omega(2 * j, L + j) = 1.0;
    omega(2 * j + 1, j) = -I;
    omega(2 * j + 1, L + j) = I;
  }
  return omega;
}

// Sigma_x conjugation x -> Sigma_x x* for 2L-row matrices: swap the top and
// bottom halves and conjugate. This is the particle-hole map on coefficient
// vectors (annihilator block <-> creator block).
inline Eigen::MatrixXcd particle_hole_conjugate(const Eigen::MatrixXcd& x) {
  const Eigen::Index n = x.rows();
  if (n % 2 != 0) throw std::invalid_argument("particle_hole_conjugate: odd row count");
  const Eigen::Index L = n / 2;
  Eigen::MatrixXcd y(n, x.cols());
  y.topRows(L) = x.bottomRows(L).conjugate();
  y.bottomRows(L) = x.topRows(L).conjugate();
  return y;
}

inline Eigen::MatrixXd correlation_to_covariance(const Eigen::MatrixXcd& C,
                                                 double imag_tol = 1e-8) {
  const Eigen::Index n = C.rows();
  if (n % 2 != 0 || C.cols() != n)
    throw std::invalid_argument("correlation_to_covariance: C must be 2L x 2L");
  const int L = static_cast<int>(n / 2);
  const Eigen::MatrixXcd omega = majorana_map(L);
  const cxd I(0.0, 1.0);
  Eigen::MatrixXcd g = I * (omega * C * omega.adjoint() -
                            Eigen::MatrixXcd::Identity(n, n));
  const double imag_res = g.imag().cwiseAbs().maxCoeff();
  if (imag_res > imag_tol)
    throw std::runtime_error(
        "correlation_to_covariance: covariance has imaginary residue " +
        std::to_string(imag_res) + " (corrupted state?)");
  return g.real();
}

inline Eigen::MatrixXcd covariance_to_correlation(const Eigen::MatrixXd& gamma) {
  const Eigen::Index n = gamma.rows();
  if (n % 2 != 0 || gamma.cols() != n)
    throw std::invalid_argument("covariance_to_correlation: Gamma must be 2L x 2L");
  const int L = static_cast<int>(n / 2);
  const Eigen::MatrixXcd omega = majorana_map(L);
  const cxd I(0.0, 1.0);
  return omega.adjoint() *
         (-I * gamma.cast<cxd>() + Eigen::MatrixXcd::Identity(n, n)) * omega /
         4.0;
}

// Thin QR in place: A (m x k, m >= k, full column rank) is replaced by its Q
// factor, with the phase convention that R has a real positive diagonal.
// Returns log|R_jj|, the per-column growth factors.
inline Eigen::VectorXd orthonormalize_columns(Eigen::MatrixXcd& A,
                                              double rank_tol = 0.0) {
  const Eigen::Index m = A.rows(), k = A.cols();
  if (m < k) throw std::invalid_argument("orthonormalize_columns: need rows >= cols");
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
  Eigen::MatrixXcd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, k);
  Eigen::VectorXd logdiag(k);
  double max_abs = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) max_abs = std::max(max_abs, std::abs(R(j, j)));
  for (Eigen::Index j = 0; j < k; ++j) {
    const double a = std::abs(R(j, j));
    if (a <= rank_tol * max_abs || a == 0.0)
      throw std::runtime_error("orthonormalize_columns: rank-deficient input");
    Q.col(j) *= R(j, j) / a;  // absorb the phase so that R_jj > 0
    logdiag(j) = std::log(a);
  }
  A = std::move(Q);
  return logdiag;
}

}  // namespace majolyap
