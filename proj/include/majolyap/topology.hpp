#pragma once
// Trajectory-resolved topological invariant. A Born-sampled closed-chain run
// fixes an outcome record; its twisted partner flips the ring-bond outcome of
// every step and the ring sector of the couplings, and is replayed through an
// independent Lyapunov frame with no sampling (the partner trajectory is
// postselected by construction). The invariant is the product of the two
// Lyapunov-vector determinants, chi = det(O_pbc) det(O_apbc): continuous near
// +-1 at convergence, with a separate hard sign. A Pfaffian route through the
// dense effective Hamiltonian exists for small-T validation only.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "majolyap/basis.hpp"
#include "majolyap/circuit.hpp"
#include "majolyap/lyapunov.hpp"
#include "majolyap/trajectory.hpp"

namespace majolyap {

// Fermion parity carried by the assembled Lyapunov vectors.
inline double parity(const LyapunovVectors& v) { return v.otilde.determinant(); }

// A determinant far from +-1 on a converged run means the vectors never
// reached orthogonality; downstream analysis masks such points.
inline bool parity_reliable(double det_value, bool converged) {
  const double a = std::abs(det_value);
  return !converged || (a >= 0.5 && a <= 1.5);
}

enum class ChiMode { converged, fixed_t };

struct ChiResult {
  double p_pbc = 0.0;
  double p_apbc = 0.0;
  double chi = 0.0;
  long T = 0;
  bool converged_pbc = false;
  bool converged_apbc = false;
  double det_residual = 0.0;  // worse orthogonality residual of the two runs
  bool reliable = true;

  int sign() const { return chi >= 0.0 ? +1 : -1; }
};

// One invariant evaluation: sample the periodic run (to convergence, or for a
// fixed horizon such as the dynamical T = L protocol), twist its record, and
// replay the antiperiodic partner. The runs share outcomes but not frames;
// the partner draws its initial frame from a separate stream.
inline ChiResult chi(const CircuitParams& p, std::uint64_t seed,
                     ChiMode mode = ChiMode::converged, long fixed_T = 0,
                     std::uint64_t trajectory = 0,
                     const ConvergencePolicy& policy = {}) {
  p.validate();
  if (p.bc != Boundary::periodic)
    throw std::invalid_argument("chi: params must describe the periodic run");

  LyapunovRun pbc;
  if (mode == ChiMode::converged) {
    pbc = run_until_converged(p, seed, trajectory, policy);
  } else {
    const long T = fixed_T > 0 ? fixed_T : p.L;
    const OutcomeRecord rec = sample_outcome_record(p, seed, trajectory, T);
    ConvergencePolicy rp = policy;
    rp.max_steps = std::max(policy.max_steps, T);
    pbc = run_replay(p, rec, seed, trajectory, rp, kStreamFrame);
  }

  CircuitParams ap = p;
  ap.bc = Boundary::antiperiodic;
  const OutcomeRecord twisted = twist_ring_outcomes(pbc.record);
  ConvergencePolicy rp = policy;
  rp.max_steps = std::max<long>(policy.max_steps, pbc.record.T());
  const LyapunovRun apbc =
      run_replay(ap, twisted, seed, trajectory, rp, kStreamFramePartner);

  ChiResult r;
  r.p_pbc = parity(pbc.vectors);
  r.p_apbc = parity(apbc.vectors);
  r.chi = r.p_pbc * r.p_apbc;
  r.T = pbc.meta.T;
  r.converged_pbc = pbc.meta.converged;
  r.converged_apbc = apbc.meta.converged;
  r.det_residual =
      std::max(pbc.vectors.ortho_residual, apbc.vectors.ortho_residual);
  r.reliable = parity_reliable(r.p_pbc, r.converged_pbc) &&
               parity_reliable(r.p_apbc, r.converged_apbc);
  return r;
}

struct ChiEnsemble {
  std::vector<ChiResult> per_seed;
  long T = 0;
  double mean = 0.0;
  // standard error of the mean; needs at least two seeds, otherwise NaN
  double std_error = std::numeric_limits<double>::quiet_NaN();
};

// Sample-averaged invariant at fixed horizon (default the dynamical T = L).
inline ChiEnsemble chi_ensemble(const CircuitParams& p, std::uint64_t base_seed,
                                int n_seeds, long T = 0,
                                const ConvergencePolicy& policy = {}) {
  if (n_seeds < 1)
    throw std::invalid_argument("chi_ensemble: need at least one seed");
  ChiEnsemble e;
  e.T = T > 0 ? T : p.L;
  e.per_seed.reserve(static_cast<std::size_t>(n_seeds));
  double sum = 0.0;
  for (int k = 0; k < n_seeds; ++k) {
    e.per_seed.push_back(
        chi(p, base_seed + static_cast<std::uint64_t>(k), ChiMode::fixed_t, e.T,
            0, policy));
    sum += e.per_seed.back().chi;
  }
  e.mean = sum / n_seeds;
  if (n_seeds >= 2) {
    double ss = 0.0;
    for (const auto& r : e.per_seed) {
      const double d = r.chi - e.mean;
      ss += d * d;
    }
    e.std_error = std::sqrt(ss / (n_seeds - 1) / n_seeds);
  }
  return e;
}

// --- Pfaffian validation route ----------------------------------------------------

// Majorana representation of a particle-hole-odd Hermitian matrix: with
// Sx conj(H) Sx = -H the rotation Omega H Omega^dag is purely imaginary, and
// A = Im(Omega H Omega^dag)/2 is the real antisymmetric form whose Pfaffian
// sign carries the parity content of H.
inline Eigen::MatrixXd majorana_antisymmetric_form(const Eigen::MatrixXcd& h,
                                                   double tol = 1e-8) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n || n % 2 != 0 || n < 2)
    throw std::invalid_argument("majorana_antisymmetric_form: need a 2L x 2L matrix");
  const int L = static_cast<int>(n / 2);
  const Eigen::MatrixXcd omega = majorana_map(L);
  const Eigen::MatrixXcd m = omega * h * omega.adjoint();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (m.real().cwiseAbs().maxCoeff() > tol * scale)
    throw std::invalid_argument(
        "majorana_antisymmetric_form: matrix is not particle-hole odd");
  return m.imag() / 2.0;
}

// Sign of the Pfaffian of a real antisymmetric matrix, by skew-symmetric
// elimination to tridiagonal form with full pivoting. Row/column swaps flip
// the sign (tracked through the permutation parity); the congruence updates
// leave the Pfaffian unchanged, so Pf = parity * product of pair pivots. The
// magnitude is accumulated in logs and cross-checked against det = Pf^2.
inline int pfaffian_sign(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || n < 2 || n % 2 != 0)
    throw std::invalid_argument("pfaffian_sign: need an even-dimensional square matrix");
  const double scale = a.cwiseAbs().maxCoeff();
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, scale))
    throw std::invalid_argument("pfaffian_sign: matrix is not antisymmetric");
  if (scale == 0.0)
    throw std::runtime_error("pfaffian_sign: gap closing: parity ill-defined");

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = std::abs(lu.matrixLU()(i, i));
    if (d == 0.0)
      throw std::runtime_error("pfaffian_sign: gap closing: parity ill-defined");
    log_det += std::log(d);
  }

  int sign = 1;
  double log_pf = 0.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index bi = k, bj = k + 1;
    double best = -1.0;
    for (Eigen::Index i = k; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (std::abs(a(i, j)) > best) {
          best = std::abs(a(i, j));
          bi = i;
          bj = j;
        }
    if (best <= 0.0)
      throw std::runtime_error("pfaffian_sign: gap closing: parity ill-defined");
    if (bi != k) {
      a.row(k).swap(a.row(bi));
      a.col(k).swap(a.col(bi));
      sign = -sign;
      if (bj == k) bj = bi;
    }
    if (bj != k + 1) {
      a.row(k + 1).swap(a.row(bj));
      a.col(k + 1).swap(a.col(bj));
      sign = -sign;
    }
    const double piv = a(k, k + 1);
    log_pf += std::log(std::abs(piv));
    if (piv < 0.0) sign = -sign;
    for (Eigen::Index i = k + 2; i < n; ++i) {
      // zero a(i, k) against the (k+1, k) pivot, then a(i, k+1) against (k, k+1)
      const double f = a(i, k) / a(k + 1, k);
      if (f != 0.0) {
        a.row(i) -= f * a.row(k + 1);
        a.col(i) -= f * a.col(k + 1);
      }
      const double g = a(i, k + 1) / a(k, k + 1);
      if (g != 0.0) {
        a.row(i) -= g * a.row(k);
        a.col(i) -= g * a.col(k);
      }
    }
  }

  // gap-closing guard: |Pf| below 1e-12 * scale^(n/2) means the parity is
  // carried by a near-singular form
  const double floor_log =
      std::log(1e-12) + static_cast<double>(n / 2) * std::log(scale);
  if (log_pf < floor_log)
    throw std::runtime_error("pfaffian_sign: gap closing: parity ill-defined");
  if (std::abs(2.0 * log_pf - log_det) > 1e-6 * std::max(1.0, std::abs(log_det)))
    throw std::runtime_error("pfaffian_sign: Pf^2 is inconsistent with det");
  return sign;
}

}  // namespace majolyap
