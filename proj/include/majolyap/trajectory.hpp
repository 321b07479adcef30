#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "majolyap/basis.hpp"
#include "majolyap/circuit.hpp"
#include "majolyap/state.hpp"

// Trajectory engine on the two-point correlation matrix C = <phi phi^dag>.
// The isometry representation in state.hpp is exact but pays a full QR per
// measurement, O(L^3) per bond. Tracking the normalized state through C
// instead costs O(L^2) per bond: with K = exp(-2 Tt) supported on rows R,
//
//   C' = K [ C - (C_{:,R} V) (D^{-1} + V^T C_RR V)^{-1} (C_{:,R} V)^dag ] K
//
// where V D V^T is the eigenfactorization of K^2 - 1 restricted to R. The
// even-bond generator has two zero modes on its four-site support, so the
// correction is rank 2 for both bond kinds (a rank-4 inverse would be
// singular). Sampling statistics are identical to the isometry path: Born
// probabilities read off C entries, and both paths consume one uniform per
// bond in the same sweep order.

namespace majolyap {

class CorrelationState {
 public:
  static CorrelationState vacuum(int L) {
    if (L < 2) throw std::invalid_argument("CorrelationState: need L >= 2");
    CorrelationState st;
    st.L_ = L;
    st.c_ = Eigen::MatrixXcd::Zero(2 * L, 2 * L);
    st.c_.topLeftCorner(L, L).setIdentity();
    return st;
  }

  static CorrelationState from_state(const GaussianPureState& s) {
    CorrelationState st;
    st.L_ = s.sites();
    st.c_ = s.correlation();
    return st;
  }

  static CorrelationState from_correlation(Eigen::MatrixXcd c, double tol = 1e-8) {
    if (c.rows() != c.cols() || c.rows() < 4 || c.rows() % 2 != 0)
      throw std::invalid_argument("CorrelationState: matrix must be 2L x 2L, L >= 2");
    CorrelationState st;
    st.L_ = static_cast<int>(c.rows()) / 2;
    st.c_ = std::move(c);
    if ((st.c_ - st.c_.adjoint()).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("CorrelationState: matrix is not Hermitian");
    if (st.purity_residual() > tol)
      throw std::invalid_argument("CorrelationState: matrix is not a projector");
    if (st.particle_hole_residual() > tol)
      throw std::invalid_argument("CorrelationState: particle-hole constraint violated");
    return st;
  }

  int sites() const { return L_; }
  const Eigen::MatrixXcd& correlation() const { return c_; }
  Eigen::MatrixXcd& correlation() { return c_; }
  std::complex<double> entry(int a, int b) const { return c_(a, b); }

  Eigen::MatrixXd covariance(double imag_tol = 1e-8) const {
    return correlation_to_covariance(c_, imag_tol);
  }

  // Isometry whose range is the occupied subspace (defined up to a right
  // unitary; snapshots care about the subspace, not the column frame).
  GaussianPureState to_state() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c_);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("CorrelationState: eigensolver failed");
    return GaussianPureState::from_isometry(es.eigenvectors().rightCols(L_), 1e-6);
  }

  double purity_residual() const {
    return (c_ * c_ - c_).cwiseAbs().maxCoeff();
  }

  double particle_hole_residual() const {
    const int n = 2 * L_;
    return (ph_conjugate() + c_ - Eigen::MatrixXcd::Identity(n, n))
        .cwiseAbs()
        .maxCoeff();
  }

  // Contract accumulated roundoff: Hermitize, average with the particle-hole
  // image (an exact identity for valid states), then one Newton-Schulz sweep
  // toward idempotency. f(x) = 3x^2 - 2x^3 satisfies f(1-x) = 1 - f(x), so
  // the steps commute.
  void repurify() {
    const int n = 2 * L_;
    c_ = (0.5 * (c_ + c_.adjoint())).eval();
    c_ = (0.5 * (c_ + Eigen::MatrixXcd::Identity(n, n) - ph_conjugate())).eval();
    const Eigen::MatrixXcd c2 = c_ * c_;
    c_ = 3.0 * c2 - 2.0 * (c2 * c_);
  }

  // Called once per circuit step by step()/replay_step(). The rank-2 update
  // is exact on the projector manifold but amplifies off-manifold drift by
  // ~e^5 per step, so roundoff must be squared away faster than it grows;
  // every other step keeps the residual at the machine floor, every 4th
  // already lets spikes through at strong measurement.
  void tick() {
    if (++age_ % kRepurifyInterval == 0) repurify();
  }

 private:
  // Sx C* Sx, the particle-hole image of C (equals 1 - C for valid states).
  Eigen::MatrixXcd ph_conjugate() const {
    const int L = L_;
    Eigen::MatrixXcd t(2 * L, 2 * L);
    t.topLeftCorner(L, L) = c_.bottomRightCorner(L, L).conjugate();
    t.topRightCorner(L, L) = c_.bottomLeftCorner(L, L).conjugate();
    t.bottomLeftCorner(L, L) = c_.topRightCorner(L, L).conjugate();
    t.bottomRightCorner(L, L) = c_.topLeftCorner(L, L).conjugate();
    return t;
  }

  static constexpr std::uint64_t kRepurifyInterval = 2;

  int L_ = 0;
  Eigen::MatrixXcd c_;
  std::uint64_t age_ = 0;
};

inline double born_probability(const CorrelationState& st, const CircuitParams& p,
                               Bond bond, int s) {
  if (s != 1 && s != -1) throw std::invalid_argument("born_probability: s must be +-1");
  const int L = p.L;
  if (!bond.even) {
    const double mu = p.mu_odd;
    const int j = bond.j - 1;
    const double g = st.entry(j, j).real();
    return ((s - mu) * (s - mu) + 4.0 * s * mu * g) / (2.0 * (1.0 + mu * mu));
  }
  const double mu = p.mu_even;
  const int a = bond.j - 1;
  const int b = bond.j % L;
  const double re = (st.entry(a, b) + st.entry(a, L + b)).real();
  return (1.0 + mu * mu - 4.0 * s * mu * re) / (2.0 * (1.0 + mu * mu));
}

namespace detail {

inline Eigen::Matrix2cd invert_2x2_or_throw(const Eigen::Matrix2cd& m) {
  const std::complex<double> det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double scale = m.cwiseAbs().maxCoeff();
  if (std::abs(det) <= 1e-14 * std::max(1.0, scale * scale))
    throw std::runtime_error("apply_kraus: measurement annihilated the state");
  Eigen::Matrix2cd inv;
  inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return inv / det;
}

}  // namespace detail

inline void apply_unitary(CorrelationState& st, const CompiledOps& ops) {
  if (!ops.has_unitary()) return;
  const Eigen::MatrixXcd& u = ops.unitary();
  st.correlation() = u * st.correlation() * u.adjoint();
}

inline void apply_kraus(CorrelationState& st, const CompiledOps& ops, Bond bond,
                        int s) {
  if (s != 1 && s != -1) throw std::invalid_argument("apply_kraus: s must be +-1");
  const CircuitParams& p = ops.params();
  const int L = p.L;
  const int n = 2 * L;
  Eigen::MatrixXcd& c = st.correlation();

  if (!bond.even) {
    const double k0 = ops.odd_scale(s);
    if (k0 == 1.0) return;  // zero-strength measurement
    const double k1 = 1.0 / k0;
    const int r0 = bond.j - 1;
    const int r1 = L + bond.j - 1;
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 2> pc(n, 2);
    pc.col(0) = c.col(r0);
    pc.col(1) = c.col(r1);
    Eigen::Matrix2cd m2;
    m2 << pc(r0, 0) + 1.0 / (k0 * k0 - 1.0), pc(r0, 1),
          pc(r1, 0), pc(r1, 1) + 1.0 / (k1 * k1 - 1.0);
    const Eigen::Matrix2cd inv = detail::invert_2x2_or_throw(m2);
    c.noalias() -= pc * inv * pc.adjoint();
    c.row(r0) *= k0;
    c.row(r1) *= k1;
    c.col(r0) *= k0;
    c.col(r1) *= k1;
    return;
  }

  const double th = p.theta_even();
  if (th == 0.0) return;
  const auto rows = CompiledOps::even_support(L, bond);
  // K^2 - 1 on the support has rank 2; V2 spans it with B^2 eigenvalues
  // exp(-+4 s theta) on the two columns.
  const double d_minus = std::exp(-4.0 * s * th) - 1.0;
  const double d_plus = std::exp(+4.0 * s * th) - 1.0;
  Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 2> pc(n, 2);
  pc.col(0) = 0.5 * (c.col(rows[0]) + c.col(rows[1]) - c.col(rows[2]) + c.col(rows[3]));
  pc.col(1) = 0.5 * (c.col(rows[0]) - c.col(rows[1]) - c.col(rows[2]) - c.col(rows[3]));
  Eigen::Matrix2cd m2;
  m2(0, 0) = 0.5 * (pc(rows[0], 0) + pc(rows[1], 0) - pc(rows[2], 0) + pc(rows[3], 0)) +
             1.0 / d_minus;
  m2(0, 1) = 0.5 * (pc(rows[0], 1) + pc(rows[1], 1) - pc(rows[2], 1) + pc(rows[3], 1));
  m2(1, 0) = 0.5 * (pc(rows[0], 0) - pc(rows[1], 0) - pc(rows[2], 0) - pc(rows[3], 0));
  m2(1, 1) = 0.5 * (pc(rows[0], 1) - pc(rows[1], 1) - pc(rows[2], 1) - pc(rows[3], 1)) +
             1.0 / d_plus;
  const Eigen::Matrix2cd inv = detail::invert_2x2_or_throw(m2);
  c.noalias() -= pc * inv * pc.adjoint();

  const Eigen::Matrix4cd blk = ops.even_block(bond, s).cast<std::complex<double>>();
  Eigen::Matrix<std::complex<double>, 4, Eigen::Dynamic> tr(4, n);
  for (int r = 0; r < 4; ++r) tr.row(r) = c.row(rows[r]);
  tr = (blk * tr).eval();
  for (int r = 0; r < 4; ++r) c.row(rows[r]) = tr.row(r);
  Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 4> tc(n, 4);
  for (int r = 0; r < 4; ++r) tc.col(r) = c.col(rows[r]);
  tc = (tc * blk).eval();
  for (int r = 0; r < 4; ++r) c.col(rows[r]) = tc.col(r);
}

// One brickwork step: unitary, then Born-sample and apply every bond in sweep
// order, consuming one uniform per bond. Mirrors step() on the isometry path
// draw for draw, so equal seeds give identical outcome streams.
inline std::vector<std::int8_t> step(CorrelationState& st, const CompiledOps& ops,
                                     Rng& rng, OutcomeRecord* record = nullptr,
                                     std::vector<double>* born_trace = nullptr) {
  const CircuitParams& p = ops.params();
  apply_unitary(st, ops);
  const auto bonds = measured_bonds(p);
  std::vector<std::int8_t> outcomes;
  outcomes.reserve(bonds.size());
  for (Bond bond : bonds) {
    const double p_plus = born_probability(st, p, bond, +1);
    if (born_trace) born_trace->push_back(p_plus);
    const int s = (rng.uniform() < p_plus) ? +1 : -1;
    apply_kraus(st, ops, bond, s);
    outcomes.push_back(static_cast<std::int8_t>(s));
  }
  if (record) {
    record->L = p.L;
    record->bc = p.bc;
    record->steps.push_back(outcomes);
  }
  st.tick();
  return outcomes;
}

inline void replay_step(CorrelationState& st, const CompiledOps& ops,
                        const std::vector<std::int8_t>& outcomes) {
  const CircuitParams& p = ops.params();
  const auto bonds = measured_bonds(p);
  if (outcomes.size() != bonds.size())
    throw std::invalid_argument("replay_step: outcome count mismatch");
  apply_unitary(st, ops);
  for (std::size_t i = 0; i < bonds.size(); ++i)
    apply_kraus(st, ops, bonds[i], outcomes[i]);
  st.tick();
}

// Born-sample a trajectory from the vacuum for a fixed number of steps and
// keep only its outcomes.
inline OutcomeRecord sample_outcome_record(const CircuitParams& p,
                                           std::uint64_t seed,
                                           std::uint64_t trajectory, long steps) {
  p.validate();
  if (steps < 1)
    throw std::invalid_argument("sample_outcome_record: need at least one step");
  const CompiledOps ops(p);
  Rng born = trajectory_rng(seed, trajectory, kStreamBorn);
  CorrelationState st = CorrelationState::vacuum(p.L);
  OutcomeRecord rec;
  rec.L = p.L;
  rec.bc = p.bc;
  for (long t = 0; t < steps; ++t) step(st, ops, born, &rec);
  return rec;
}

}  // namespace majolyap
