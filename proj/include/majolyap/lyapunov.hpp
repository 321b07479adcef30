#pragma once
// Lyapunov analysis of the monitored single-particle dynamics. A 2L x L
// orthonormal frame is dragged through the same per-bond transfer matrices
// that act on the physical state; one QR per time step keeps the columns
// orthonormal and accumulates log-stretches acc_j = sum_t ln (R_t)_jj, so the
// snapshot exponents z_j = acc_j / T never overflow. The QR convention fixes
// (R_t)_jj > 0 by absorbing phases into Q, which makes the iterated
// decomposition unique and exactly telescoping: the accumulated logs equal
// the one-shot QR of K_T W_0 column by column. That identity (evaluated in
// multiprecision arithmetic) is the dense cross-check for the QR path.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "majolyap/basis.hpp"
#include "majolyap/circuit.hpp"
#include "majolyap/mp.hpp"
#include "majolyap/rng.hpp"
#include "majolyap/trajectory.hpp"

namespace majolyap {

// Convergence of the snapshot spectrum is judged on the gaps between
// consecutive exponents over a sliding window: converged once every gap has
// std/mean below rel_std. Gaps whose window mean sits below the degeneracy
// floor are exact degeneracies (topological zero modes); they are exempted
// from the relative test and reported.
struct ConvergencePolicy {
  long warmup = 10000;  // no convergence verdict before this many steps
  int window = 1000;    // snapshots entering the gap statistics
  double rel_std = 3.1622776601683794e-3;  // sqrt(10) * 1e-3
  long max_steps = 60000;
  double degenerate_abs_floor = 1e-12;
  double degenerate_rel_floor = 1e-9;  // scaled by the window mean of max z
};

struct EffectiveSpectrum {
  Eigen::VectorXd z;  // non-negative half, ascending (z(0) is the edge mode)
  long T = 0;
  bool converged = false;
};

struct LyapunovVectors {
  Eigen::MatrixXcd wtilde;  // 2L x 2L, [W | Sx conj(W)] with columns ascending
  Eigen::MatrixXd otilde;   // real Majorana-basis matrix, orthogonal at convergence
  double realness_residual = 0.0;  // max |Im(Omega Wt Omega^dag / 2)|
  double ortho_residual = 0.0;     // max |O^T O - I|
};

struct RunMetadata {
  CircuitParams params;
  std::uint64_t seed = 0;
  std::uint64_t trajectory = 0;
  long T = 0;
  bool converged = false;
  // Single-particle transfer matrices drop the scalar Kraus prefactors, so
  // reported exponents carry no normalization shift.
  double log_norm_shift = 0.0;
  double frame_ortho_residual = 0.0;
  double vector_ortho_residual = 0.0;
  double vector_realness_residual = 0.0;
  double edge_weight = 0.0;  // averaged over the final window
  double lowest_gap = 0.0;   // z(1) - z(0); small values flag a degenerate pair
  double tau_relax = std::numeric_limits<double>::infinity();  // 1 / z(0)
  std::vector<int> degenerate_gaps;  // gap indices exempted at the verdict
};

struct LyapunovRun {
  EffectiveSpectrum spectrum;
  LyapunovVectors vectors;
  OutcomeRecord record;
  RunMetadata meta;
};

// --- frame -----------------------------------------------------------------------

class LyapunovFrame {
 public:
  // W0 = Q from the thin QR of a 2L x L complex-Gaussian draw.
  LyapunovFrame(int L, Rng& rng) : w_(2 * L, L), acc_(Eigen::VectorXd::Zero(L)) {
    if (L < 1) throw std::invalid_argument("LyapunovFrame: L must be >= 1");
    for (Eigen::Index k = 0; k < w_.size(); ++k)
      w_.data()[k] = rng.complex_gaussian();
    orthonormalize_columns(w_);
  }

  static LyapunovFrame from_isometry(const Eigen::MatrixXcd& w0) {
    if (w0.rows() != 2 * w0.cols() || w0.cols() < 1)
      throw std::invalid_argument("LyapunovFrame: frame must be 2L x L");
    const Eigen::MatrixXcd g = w0.adjoint() * w0;
    if ((g - Eigen::MatrixXcd::Identity(w0.cols(), w0.cols())).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("LyapunovFrame: initial frame is not orthonormal");
    return LyapunovFrame(w0);
  }

  int sites() const { return static_cast<int>(w_.cols()); }
  long t() const { return t_; }
  const Eigen::MatrixXcd& frame() const { return w_; }
  const Eigen::VectorXd& acc() const { return acc_; }

  // One circuit step: the unitary, then every measured bond in sweep order,
  // then a single re-orthonormalization whose log-diagonal feeds acc.
  void propagate(const CompiledOps& ops, const std::vector<Bond>& bonds,
                 const std::vector<std::int8_t>& outcomes) {
    if (outcomes.size() != bonds.size())
      throw std::invalid_argument("LyapunovFrame: outcome count does not match bonds");
    ops.apply_unitary(w_);
    for (std::size_t i = 0; i < bonds.size(); ++i)
      ops.apply_measurement(w_, bonds[i], outcomes[i]);
    finish_step();
  }

  // Same update with an explicit dense step matrix (tests, external drivers).
  void propagate_dense(const Eigen::MatrixXcd& m) {
    if (m.rows() != w_.rows() || m.cols() != w_.rows())
      throw std::invalid_argument("LyapunovFrame: step matrix has wrong shape");
    w_ = (m * w_).eval();
    finish_step();
  }

  // Snapshot exponents acc / t, ascending.
  Eigen::VectorXd snapshot_values() const {
    if (t_ == 0) throw std::logic_error("LyapunovFrame: no steps taken yet");
    Eigen::VectorXd z = acc_ / static_cast<double>(t_);
    std::stable_sort(z.data(), z.data() + z.size());
    return z;
  }

  EffectiveSpectrum snapshot() const {
    EffectiveSpectrum s;
    s.z = snapshot_values();
    s.T = t_;
    return s;
  }

  // Column order that sorts the accumulated stretches ascending (stable).
  std::vector<int> ascending_order() const {
    std::vector<int> idx(static_cast<std::size_t>(w_.cols()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return acc_(a) < acc_(b); });
    return idx;
  }

  // Site weight of the slowest mode on the two boundary sites. Equals the
  // spinor edge weight of the assembled vectors: the Majorana-basis 2x2
  // column blocks of Otilde have the same Frobenius norm as the particle-hole
  // blocks of Wtilde they rotate into.
  double lowest_mode_edge_weight() const {
    const int L = sites();
    int c = 0;
    for (int j = 1; j < L; ++j)
      if (acc_(j) < acc_(c)) c = j;
    const auto site = [&](int j) {
      return std::norm(w_(j, c)) + std::norm(w_(L + j, c));
    };
    return site(0) + site(L - 1);
  }

  double orthonormality_residual() const {
    const Eigen::MatrixXcd g = w_.adjoint() * w_;
    return (g - Eigen::MatrixXcd::Identity(w_.cols(), w_.cols())).cwiseAbs().maxCoeff();
  }

 private:
  explicit LyapunovFrame(const Eigen::MatrixXcd& w0)
      : w_(w0), acc_(Eigen::VectorXd::Zero(w0.cols())) {}

  void finish_step() {
    if (!w_.allFinite())
      throw std::runtime_error("LyapunovFrame: non-finite frame entries");
    acc_ += orthonormalize_columns(w_);
    ++t_;
  }

  Eigen::MatrixXcd w_;
  Eigen::VectorXd acc_;
  long t_ = 0;
};

// --- vectors and spinor ----------------------------------------------------------

// Wtilde = [W_asc | Sx conj(W_asc)]: the particle-hole partners of the frame
// columns carry the mirrored exponents, and column pair (j, L+j) holds the
// +-z_j modes with z ascending. Otilde = Omega Wtilde Omega^dag / 2 rotates
// that pair structure into adjacent Majorana column pairs (2j, 2j+1); with
// Omega Omega^dag = 2 the /2 normalization keeps Otilde orthogonal.
inline LyapunovVectors assemble_vectors(const Eigen::MatrixXcd& w,
                                        const std::vector<int>& ascending) {
  const int L = static_cast<int>(w.cols());
  if (w.rows() != 2 * L || static_cast<int>(ascending.size()) != L)
    throw std::invalid_argument("assemble_vectors: frame and order size mismatch");
  LyapunovVectors v;
  v.wtilde.resize(2 * L, 2 * L);
  for (int j = 0; j < L; ++j) v.wtilde.col(j) = w.col(ascending[j]);
  v.wtilde.topRightCorner(L, L) = v.wtilde.bottomLeftCorner(L, L).conjugate();
  v.wtilde.bottomRightCorner(L, L) = v.wtilde.topLeftCorner(L, L).conjugate();
  const Eigen::MatrixXcd omega = majorana_map(L);
  const Eigen::MatrixXcd oc = omega * v.wtilde * omega.adjoint() / 2.0;
  v.realness_residual = oc.imag().cwiseAbs().maxCoeff();
  v.otilde = oc.real();
  v.ortho_residual = (v.otilde.transpose() * v.otilde -
                      Eigen::MatrixXd::Identity(2 * L, 2 * L))
                         .cwiseAbs()
                         .maxCoeff();
  return v;
}

inline LyapunovVectors assemble_vectors(const LyapunovFrame& frame) {
  return assemble_vectors(frame.frame(), frame.ascending_order());
}

struct SpinorProfile {
  Eigen::VectorXd psi_sq;     // site weights of the slowest mode pair, sum 1
  double edge_weight = 0.0;   // psi_sq(0) + psi_sq(L-1)
  double normalization = 0.0; // sum of psi_sq, 1 up to the ortho residual
};

// Spinor wave function of the slowest pair: Otilde columns 0,1 restricted to
// the Majorana row pair (2j, 2j+1) of site j, squared and halved.
inline SpinorProfile spinor_edge_weight(const LyapunovVectors& v) {
  const int L = static_cast<int>(v.otilde.rows()) / 2;
  if (v.otilde.rows() != 2 * L || v.otilde.cols() != 2 * L || L < 1)
    throw std::invalid_argument("spinor_edge_weight: vectors not assembled");
  SpinorProfile p;
  p.psi_sq.resize(L);
  for (int j = 0; j < L; ++j)
    p.psi_sq(j) = v.otilde.block(2 * j, 0, 2, 2).squaredNorm() / 2.0;
  p.edge_weight = p.psi_sq(0) + p.psi_sq(L - 1);
  p.normalization = p.psi_sq.sum();
  return p;
}

// --- convergence tracking --------------------------------------------------------

// Sliding window of spectral gaps. Statistics are recomputed from the stored
// ring at each verdict; no running sums, so no drift over long runs.
class GapTracker {
 public:
  GapTracker(int L, int window)
      : window_(window),
        ring_(window, std::max(L - 1, 0)),
        zmax_ring_(Eigen::VectorXd::Zero(window)) {
    if (L < 1 || window < 2)
      throw std::invalid_argument("GapTracker: need L >= 1 and window >= 2");
  }

  void push(const Eigen::VectorXd& z_ascending) {
    const int g = static_cast<int>(ring_.cols());
    for (int j = 0; j < g; ++j)
      ring_(head_, j) = z_ascending(j + 1) - z_ascending(j);
    zmax_ring_(head_) = z_ascending(z_ascending.size() - 1);
    head_ = (head_ + 1) % window_;
    if (count_ < window_) ++count_;
  }

  bool full() const { return count_ == window_; }

  // True when every gap's window std is below rel_std * mean; gaps whose mean
  // lies under the degeneracy floor are skipped and reported via *degenerate.
  bool satisfied(const ConvergencePolicy& policy,
                 std::vector<int>* degenerate = nullptr) const {
    if (!full()) return false;
    const int g = static_cast<int>(ring_.cols());
    const double zmax_mean = zmax_ring_.sum() / window_;
    const double floor = std::max(policy.degenerate_abs_floor,
                                  policy.degenerate_rel_floor * std::abs(zmax_mean));
    std::vector<int> exempt;
    for (int j = 0; j < g; ++j) {
      const double mean = ring_.col(j).sum() / window_;
      if (mean <= floor) {
        exempt.push_back(j);
        continue;
      }
      const double var =
          (ring_.col(j).array() - mean).square().sum() / window_;
      if (std::sqrt(var) >= policy.rel_std * mean) return false;
    }
    if (degenerate) *degenerate = std::move(exempt);
    return true;
  }

 private:
  int window_;
  int head_ = 0;
  int count_ = 0;
  Eigen::MatrixXd ring_;  // window x (L-1) gap history
  Eigen::VectorXd zmax_ring_;
};

// --- run drivers -----------------------------------------------------------------

namespace detail {

// Common frame loop. next_outcomes(t) supplies the sweep outcomes of step t
// (sampling them or reading a record); when stop_at_convergence is set the
// loop ends at the first satisfied verdict, otherwise the verdict of the
// final step is reported.
template <class StepOutcomes>
LyapunovRun drive_frame_loop(const CircuitParams& p, const CompiledOps& ops,
                             LyapunovFrame frame, long horizon,
                             bool stop_at_convergence,
                             const ConvergencePolicy& policy,
                             StepOutcomes&& next_outcomes) {
  const auto bonds = measured_bonds(p);
  GapTracker tracker(p.L, policy.window);
  std::vector<double> edge_ring(static_cast<std::size_t>(policy.window), 0.0);
  long edge_count = 0;
  std::vector<int> degenerate;
  bool converged = false;

  for (long t = 1; t <= horizon; ++t) {
    const std::vector<std::int8_t>& outs = next_outcomes(t);
    frame.propagate(ops, bonds, outs);
    tracker.push(frame.snapshot_values());
    edge_ring[static_cast<std::size_t>((t - 1) % policy.window)] =
        frame.lowest_mode_edge_weight();
    ++edge_count;
    if (frame.t() >= policy.warmup) {
      degenerate.clear();
      converged = tracker.satisfied(policy, &degenerate);
      if (converged && stop_at_convergence) break;
    }
  }

  LyapunovRun run;
  run.spectrum = frame.snapshot();
  run.spectrum.converged = converged;
  run.vectors = assemble_vectors(frame);

  run.meta.params = p;
  run.meta.T = frame.t();
  run.meta.converged = converged;
  run.meta.frame_ortho_residual = frame.orthonormality_residual();
  run.meta.vector_ortho_residual = run.vectors.ortho_residual;
  run.meta.vector_realness_residual = run.vectors.realness_residual;
  const long n_edge = std::min<long>(edge_count, policy.window);
  if (n_edge > 0) {
    double s = 0.0;
    for (long i = 0; i < n_edge; ++i) s += edge_ring[static_cast<std::size_t>(i)];
    run.meta.edge_weight = s / static_cast<double>(n_edge);
  }
  if (p.L >= 2) run.meta.lowest_gap = run.spectrum.z(1) - run.spectrum.z(0);
  if (run.spectrum.z(0) > 0.0) run.meta.tau_relax = 1.0 / run.spectrum.z(0);
  run.meta.degenerate_gaps = degenerate;
  return run;
}

}  // namespace detail

// Joint evolution of a Born-sampled trajectory and its Lyapunov frame. The
// physical state alone decides the outcomes; the frame rides along and never
// feeds back into sampling. Stops at the first converged verdict or at
// policy.max_steps (converged = false in the result).
inline LyapunovRun run_until_converged(const CircuitParams& p, std::uint64_t seed,
                                       std::uint64_t trajectory = 0,
                                       const ConvergencePolicy& policy = {}) {
  p.validate();
  if (policy.max_steps < policy.warmup + policy.window)
    throw std::invalid_argument(
        "run_until_converged: max_steps must cover warmup plus one window");
  const CompiledOps ops(p);
  Rng born = trajectory_rng(seed, trajectory, kStreamBorn);
  Rng frame_rng = trajectory_rng(seed, trajectory, kStreamFrame);
  LyapunovFrame frame(p.L, frame_rng);
  CorrelationState state = CorrelationState::vacuum(p.L);
  OutcomeRecord rec;
  rec.L = p.L;
  rec.bc = p.bc;
  std::vector<std::int8_t> buf;
  auto next = [&](long) -> const std::vector<std::int8_t>& {
    buf = step(state, ops, born, &rec);
    return buf;
  };
  LyapunovRun run = detail::drive_frame_loop(p, ops, std::move(frame),
                                             policy.max_steps, true, policy, next);
  run.record = std::move(rec);
  run.meta.seed = seed;
  run.meta.trajectory = trajectory;
  return run;
}

// Frame-only replay of a fixed record under the given parameters (used for
// the twisted-boundary partner, which reuses outcomes but not the state).
// Runs the whole record; the reported verdict is that of the final step.
inline LyapunovRun run_replay_from(const CircuitParams& p, const OutcomeRecord& rec,
                                   LyapunovFrame frame,
                                   const ConvergencePolicy& policy = {}) {
  p.validate();
  rec.validate();
  if (rec.L != p.L)
    throw std::invalid_argument("run_replay: record size does not match params");
  if (outcomes_per_step(rec.L, rec.bc) != outcomes_per_step(p.L, p.bc))
    throw std::invalid_argument("run_replay: record sweep shape does not match params");
  const CompiledOps ops(p);
  const long horizon = std::min<long>(rec.T(), policy.max_steps);
  auto next = [&](long t) -> const std::vector<std::int8_t>& {
    return rec.steps[static_cast<std::size_t>(t - 1)];
  };
  LyapunovRun run = detail::drive_frame_loop(p, ops, std::move(frame), horizon,
                                             false, policy, next);
  run.record = rec;
  return run;
}

inline LyapunovRun run_replay(const CircuitParams& p, const OutcomeRecord& rec,
                              std::uint64_t seed, std::uint64_t trajectory = 0,
                              const ConvergencePolicy& policy = {},
                              std::uint64_t frame_stream = kStreamFramePartner) {
  Rng frame_rng = trajectory_rng(seed, trajectory, frame_stream);
  LyapunovFrame frame(p.L, frame_rng);
  LyapunovRun run = run_replay_from(p, rec, std::move(frame), policy);
  run.meta.seed = seed;
  run.meta.trajectory = trajectory;
  return run;
}

// --- dense reference path (multiprecision) ---------------------------------------

// Full single-particle matrix of one step for the given outcomes.
inline Eigen::MatrixXcd dense_step_matrix(const CompiledOps& ops,
                                          const std::vector<Bond>& bonds,
                                          const std::vector<std::int8_t>& outcomes) {
  if (outcomes.size() != bonds.size())
    throw std::invalid_argument("dense_step_matrix: outcome count mismatch");
  const int L = ops.params().L;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2 * L, 2 * L);
  ops.apply_unitary(m);
  for (std::size_t i = 0; i < bonds.size(); ++i)
    ops.apply_measurement(m, bonds[i], outcomes[i]);
  return m;
}

// Working precision for the dense product: enough bits to keep the full
// dynamic range e^{2T (2 theta_o + 4 theta_e + 2|J| + 2)} representable with
// a 256-bit mantissa floor and a 25% margin.
inline int dense_precision_bits(const CircuitParams& p, int T) {
  const double rate = 2.0 * p.theta_odd() + 4.0 * p.theta_even() +
                      2.0 * std::abs(p.J) + 2.0;
  const double need = 256.0 + 1.25 * (2.0 * T * rate) / std::log(2.0);
  if (!(need <= 16384.0))
    throw std::runtime_error(
        "dense path: dynamic range needs more than 16384 bits; "
        "use the iterated-QR path instead");
  return std::max(512, static_cast<int>(std::ceil(need)));
}

struct DenseSpectrum {
  Eigen::MatrixXcd h_eff;      // 2L x 2L Hermitian, eigenvalues are the +-z pairs
  Eigen::VectorXd eigenvalues; // full spectrum, ascending
  double pairing_residual = 0.0;  // max |z_k + z_{2L-1-k}|
  int precision_bits = 0;
};

// H_eff = ln(K_T K_T^dag) / (2T), evaluated by accumulating the product in the
// real 4L x 4L embedding R(M) = [[Re,-Im],[Im,Re]] at high precision and
// diagonalizing with Jacobi rotations. R doubles every eigenvalue; physical
// values are recovered by averaging the adjacent duplicates.
inline DenseSpectrum effective_hamiltonian_direct(const CircuitParams& p,
                                                  const OutcomeRecord& rec,
                                                  int bits = 0) {
  p.validate();
  rec.validate();
  if (rec.L != p.L || outcomes_per_step(rec.L, rec.bc) != outcomes_per_step(p.L, p.bc))
    throw std::invalid_argument("effective_hamiltonian_direct: record/params mismatch");
  const int T = rec.T();
  if (T == 0)
    throw std::invalid_argument("effective_hamiltonian_direct: empty record");
  const int L = p.L;
  const int n = 2 * L;
  if (bits <= 0) bits = dense_precision_bits(p, T);
  mp::PrecisionGuard guard(bits);

  const CompiledOps ops(p);
  const auto bonds = measured_bonds(p);
  mp::MpMatrix acc = mp::MpMatrix::identity(2 * n);
  for (int t = 0; t < T; ++t) {
    const Eigen::MatrixXcd m =
        dense_step_matrix(ops, bonds, rec.steps[static_cast<std::size_t>(t)]);
    acc = mp::MpMatrix::from_double(mp::real_embedding(m)) * acc;
  }

  mp::MpMatrix g = acc * acc.transpose();  // R(K) R(K)^T = R(K K^dag)
  std::vector<mp::MpReal> lam;
  mp::MpMatrix v;
  mp::jacobi_eigh(g, lam, v);

  std::vector<double> zall(static_cast<std::size_t>(2 * n));
  mp::MpMatrix d(2 * n, 2 * n);
  const mp::MpReal inv2t(1.0 / (2.0 * T));
  for (int k = 0; k < 2 * n; ++k) {
    if (lam[static_cast<std::size_t>(k)].sign() <= 0)
      throw std::runtime_error("effective_hamiltonian_direct: singular product");
    const mp::MpReal zk = log(lam[static_cast<std::size_t>(k)]) * inv2t;
    d(k, k) = zk;
    zall[static_cast<std::size_t>(k)] = zk.to_double();
  }
  const mp::MpMatrix h_emb = v * d * v.transpose();

  DenseSpectrum out;
  out.precision_bits = bits;
  const Eigen::MatrixXcd h = mp::from_real_embedding(h_emb.to_double());
  out.h_eff = 0.5 * (h + h.adjoint());
  std::sort(zall.begin(), zall.end());
  out.eigenvalues.resize(n);
  for (int k = 0; k < n; ++k)
    out.eigenvalues(k) = 0.5 * (zall[static_cast<std::size_t>(2 * k)] +
                                zall[static_cast<std::size_t>(2 * k + 1)]);
  double pairing = 0.0;
  for (int k = 0; k < L; ++k)
    pairing = std::max(pairing, std::abs(out.eigenvalues(k) +
                                         out.eigenvalues(n - 1 - k)));
  out.pairing_residual = pairing;
  return out;
}

// One-shot log-stretches ln R_jj of the QR of K_T W0, the dense counterpart of
// an iterated frame started at the same W0. The product is carried as the
// real 4L x L stack (Re over Im), halving the embedded width.
inline Eigen::VectorXd dense_oneshot_logs(const CircuitParams& p,
                                          const OutcomeRecord& rec,
                                          const Eigen::MatrixXcd& w0,
                                          int bits = 0) {
  p.validate();
  rec.validate();
  if (rec.L != p.L || outcomes_per_step(rec.L, rec.bc) != outcomes_per_step(p.L, p.bc))
    throw std::invalid_argument("dense_oneshot_logs: record/params mismatch");
  const int T = rec.T();
  if (T == 0) throw std::invalid_argument("dense_oneshot_logs: empty record");
  const int n = 2 * p.L;
  const int k = static_cast<int>(w0.cols());
  if (w0.rows() != n || k < 1 || k > n)
    throw std::invalid_argument("dense_oneshot_logs: frame shape mismatch");
  if (bits <= 0) bits = dense_precision_bits(p, T);
  mp::PrecisionGuard guard(bits);

  Eigen::MatrixXd stack(2 * n, k);
  stack.topRows(n) = w0.real();
  stack.bottomRows(n) = w0.imag();
  mp::MpMatrix acc = mp::MpMatrix::from_double(stack);

  const CompiledOps ops(p);
  const auto bonds = measured_bonds(p);
  for (int t = 0; t < T; ++t) {
    const Eigen::MatrixXcd m =
        dense_step_matrix(ops, bonds, rec.steps[static_cast<std::size_t>(t)]);
    acc = mp::MpMatrix::from_double(mp::real_embedding(m)) * acc;
  }

  std::vector<std::vector<mp::MpComplex>> cols(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    auto& col = cols[static_cast<std::size_t>(j)];
    col.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      col[static_cast<std::size_t>(i)].re = acc(i, j);
      col[static_cast<std::size_t>(i)].im = acc(n + i, j);
    }
  }
  const std::vector<mp::MpReal> logs = mp::gram_schmidt_log_diag(cols);
  Eigen::VectorXd out(k);
  for (int j = 0; j < k; ++j) out(j) = logs[static_cast<std::size_t>(j)].to_double();
  return out;
}

}  // namespace majolyap
