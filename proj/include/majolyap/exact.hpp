#pragma once

// Exact many-body reference implementation on the full Fock space, used to
// validate the Gaussian evolution. Jordan-Wigner encoding: bit j of a basis
// index is the occupation of (0-based) site j, so
//   c_j |n> = (-1)^{popcount(n & (2^j - 1))} n_j |n ^ 2^j>,
// gamma_{2j+1} = c_j + c_j^dag and gamma_{2j+2} = -i (c_j - c_j^dag)
// (1-based gamma labels; the code indexes gammas 0-based).
//
// Two layers:
//  * functional statevector updates (apply_majorana, ExactCircuit), fine up
//    to L = 10;
//  * dense operator algebra (FockOps), capped at L = 8 where a single
//    operator is a 256 x 256 matrix.
//
// The circuit mirror consumes RNG draws bond-for-bond identically to the
// Gaussian path: one uniform per measured bond, outcome +1 iff u < p(+1).

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "majolyap/circuit.hpp"

namespace majolyap::exact {

// gamma_a e_n = coeff e_m for a single basis vector; a is 0-based in [0, 2L)
struct MajoranaImage {
  std::uint32_t index;
  cxd coeff;
};

inline MajoranaImage majorana_image(int L, int a, std::uint32_t n) {
  const int site = a >> 1;
  if (site < 0 || site >= L) throw std::invalid_argument("majorana_image: index out of range");
  const std::uint32_t bit = 1u << site;
  const bool occupied = (n & bit) != 0;
  const int string = __builtin_popcount(n & (bit - 1));
  const double jw = (string & 1) ? -1.0 : 1.0;
  cxd coeff;
  if ((a & 1) == 0) {
    coeff = cxd(jw, 0.0);  // c + c^dag
  } else {
    coeff = occupied ? cxd(0.0, -jw) : cxd(0.0, jw);  // -i (c - c^dag)
  }
  return {n ^ bit, coeff};
}

inline Eigen::VectorXcd apply_majorana(int L, int a, const Eigen::VectorXcd& psi) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  for (std::uint32_t n = 0; n < static_cast<std::uint32_t>(psi.size()); ++n) {
    const auto im = majorana_image(L, a, n);
    out(im.index) += im.coeff * psi(n);
  }
  return out;
}

inline Eigen::VectorXcd apply_c(int L, int j, const Eigen::VectorXcd& psi) {
  const std::uint32_t bit = 1u << j;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  for (std::uint32_t n = 0; n < static_cast<std::uint32_t>(psi.size()); ++n) {
    if (!(n & bit)) continue;
    const double jw = (__builtin_popcount(n & (bit - 1)) & 1) ? -1.0 : 1.0;
    out(n ^ bit) += jw * psi(n);
  }
  return out;
}

inline Eigen::VectorXcd apply_cdag(int L, int j, const Eigen::VectorXcd& psi) {
  const std::uint32_t bit = 1u << j;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  for (std::uint32_t n = 0; n < static_cast<std::uint32_t>(psi.size()); ++n) {
    if (n & bit) continue;
    const double jw = (__builtin_popcount(n & (bit - 1)) & 1) ? -1.0 : 1.0;
    out(n ^ bit) += jw * psi(n);
  }
  return out;
}

// gamma indices (0-based) measured by a bond, in operator order: the bond's
// Kraus exponent is -i s theta gamma_a gamma_b
inline std::pair<int, int> bond_gammas(int L, Bond bond) {
  if (!bond.even) return {2 * (bond.j - 1), 2 * bond.j - 1};
  return {2 * bond.j - 1, (2 * bond.j) % (2 * L)};
}

// --- dense operator algebra ---------------------------------------------------

class FockOps {
 public:
  explicit FockOps(int L) : L_(L), dim_(1 << L) {
    if (L < 1 || L > 8) throw std::invalid_argument("FockOps: L must be in [1, 8]");
    c_.reserve(L);
    for (int j = 0; j < L; ++j) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
      const std::uint32_t bit = 1u << j;
      for (std::uint32_t n = 0; n < static_cast<std::uint32_t>(dim_); ++n) {
        if (!(n & bit)) continue;
        const double jw = (__builtin_popcount(n & (bit - 1)) & 1) ? -1.0 : 1.0;
        m(n ^ bit, n) = jw;
      }
      c_.push_back(std::move(m));
    }
  }

  int sites() const { return L_; }
  int dim() const { return dim_; }

  const Eigen::MatrixXcd& c(int j) const { return c_.at(j); }
  Eigen::MatrixXcd cdag(int j) const { return c_.at(j).adjoint(); }

  Eigen::MatrixXcd majorana(int a) const {
    const int j = a >> 1;
    if ((a & 1) == 0) return c(j) + cdag(j);
    return cxd(0.0, -1.0) * (c(j) - cdag(j));
  }

  // phi^dag m phi with phi = (c_1..c_L, c_1^dag..c_L^dag)
  Eigen::MatrixXcd quadratic(const Eigen::MatrixXcd& m) const {
    if (m.rows() != 2 * L_ || m.cols() != 2 * L_)
      throw std::invalid_argument("FockOps::quadratic: matrix must be 2L x 2L");
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (int a = 0; a < 2 * L_; ++a) {
      const Eigen::MatrixXcd left = (a < L_) ? cdag(a) : c(a - L_);
      for (int b = 0; b < 2 * L_; ++b) {
        if (m(a, b) == cxd(0.0, 0.0)) continue;
        const Eigen::MatrixXcd right = (b < L_) ? c(b) : cdag(b - L_);
        out += m(a, b) * (left * right);
      }
    }
    return out;
  }

  // product of the on-site parities i gamma_{2j-1} gamma_{2j}; diagonal with
  // entries (-1)^{L - popcount(n)}
  Eigen::VectorXd parity_diagonal() const {
    Eigen::VectorXd d(dim_);
    for (std::uint32_t n = 0; n < static_cast<std::uint32_t>(dim_); ++n)
      d(n) = ((L_ - __builtin_popcount(n)) & 1) ? -1.0 : 1.0;
    return d;
  }

 private:
  int L_;
  int dim_;
  std::vector<Eigen::MatrixXcd> c_;
};

// H = iJ sum_{a<2L-1} gamma_a gamma_{a+1} + i J' gamma_{2L-1} gamma_0
// (0-based gamma labels; J' from the boundary sector)
inline Eigen::MatrixXcd many_body_hamiltonian(const FockOps& ops,
                                              const CircuitParams& p) {
  if (ops.sites() != p.L) throw std::invalid_argument("many_body_hamiltonian: size mismatch");
  const int n2 = 2 * p.L;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(ops.dim(), ops.dim());
  const cxd i1(0.0, 1.0);
  for (int a = 0; a + 1 < n2; ++a)
    h += i1 * p.J * (ops.majorana(a) * ops.majorana(a + 1));
  if (p.bc != Boundary::open)
    h += i1 * p.boundary_J() * (ops.majorana(n2 - 1) * ops.majorana(0));
  return h;
}

inline Eigen::MatrixXcd many_body_unitary(const FockOps& ops,
                                          const CircuitParams& p) {
  const Eigen::MatrixXcd h = many_body_hamiltonian(ops, p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("many_body_unitary: eigensolver failed");
  const Eigen::VectorXcd phases =
      (cxd(0.0, -1.0) * es.eigenvalues().cast<cxd>().array()).exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// K(s) = (cosh(theta) - i s sinh(theta) gamma_a gamma_b) / sqrt(2 cosh 2theta):
// the closed form of exp(-i s theta gamma_a gamma_b) / sqrt(2 cosh 2theta),
// using (gamma_a gamma_b)^2 = -1 for a != b
inline Eigen::MatrixXcd kraus(const FockOps& ops, const CircuitParams& p,
                              Bond bond, int s) {
  if (s != 1 && s != -1) throw std::invalid_argument("kraus: s must be +-1");
  const double theta = bond.even ? p.theta_even() : p.theta_odd();
  const auto [a, b] = bond_gammas(p.L, bond);
  const double norm = std::sqrt(2.0 * std::cosh(2.0 * theta));
  Eigen::MatrixXcd k =
      std::cosh(theta) * Eigen::MatrixXcd::Identity(ops.dim(), ops.dim()) -
      cxd(0.0, s * std::sinh(theta)) * (ops.majorana(a) * ops.majorana(b));
  return k / norm;
}

// --- statevector ----------------------------------------------------------------

class ExactState {
 public:
  static ExactState vacuum(int L) {
    if (L < 1 || L > 10) throw std::invalid_argument("ExactState: L must be in [1, 10]");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(1 << L);
    psi(0) = 1.0;
    return ExactState(L, std::move(psi));
  }

  static ExactState from_vector(int L, Eigen::VectorXcd psi) {
    if (L < 1 || L > 10) throw std::invalid_argument("ExactState: L must be in [1, 10]");
    if (psi.size() != (1 << L)) throw std::invalid_argument("ExactState: dimension mismatch");
    const double n = psi.norm();
    if (n < 1e-12) throw std::invalid_argument("ExactState: zero vector");
    psi /= n;
    return ExactState(L, std::move(psi));
  }

  int sites() const { return L_; }
  const Eigen::VectorXcd& vector() const { return psi_; }
  Eigen::VectorXcd& vector() { return psi_; }
  void normalize() { psi_ /= psi_.norm(); }

  cxd two_point_g(int i, int j) const {  // <c_i c_j^dag>
    return apply_cdag(L_, i, psi_).dot(apply_cdag(L_, j, psi_));
  }
  cxd two_point_f(int i, int j) const {  // <c_i c_j>
    return apply_cdag(L_, i, psi_).dot(apply_c(L_, j, psi_));
  }

  // <phi phi^dag> as the Gram matrix of the vectors phi_a^dag |psi>
  Eigen::MatrixXcd correlation() const {
    Eigen::MatrixXcd w(psi_.size(), 2 * L_);
    for (int a = 0; a < 2 * L_; ++a)
      w.col(a) = (a < L_) ? apply_cdag(L_, a, psi_) : apply_c(L_, a - L_, psi_);
    return w.adjoint() * w;
  }

  // i (<gamma gamma> - 1): real antisymmetric for a normalized state
  Eigen::MatrixXd covariance(double imag_tol = 1e-8) const {
    Eigen::MatrixXcd g(psi_.size(), 2 * L_);
    for (int a = 0; a < 2 * L_; ++a) g.col(a) = apply_majorana(L_, a, psi_);
    Eigen::MatrixXcd gram = g.adjoint() * g;
    gram -= Eigen::MatrixXcd::Identity(2 * L_, 2 * L_);
    gram *= cxd(0.0, 1.0);
    if (gram.imag().cwiseAbs().maxCoeff() > imag_tol)
      throw std::runtime_error("ExactState::covariance: non-real result");
    return gram.real();
  }

  double parity_expectation() const {
    double p = 0.0;
    for (std::uint32_t n = 0; n < static_cast<std::uint32_t>(psi_.size()); ++n) {
      const double sign = ((L_ - __builtin_popcount(n)) & 1) ? -1.0 : 1.0;
      p += sign * std::norm(psi_(n));
    }
    return p;
  }

  // von Neumann entropy (bits) of the fermionic reduced state on the given
  // 0-based sites. Modes are first brought to the front with fermionic swaps
  // (|11> picks up a sign), after which an ordinary left-block partial trace
  // is exact for any subset, contiguous or not.
  double entropy_bits(std::vector<int> sites) const {
    std::sort(sites.begin(), sites.end());
    const int k = static_cast<int>(sites.size());
    if (k == 0) return 0.0;
    for (int i = 0; i < k; ++i) {
      if (sites[i] < 0 || sites[i] >= L_)
        throw std::invalid_argument("entropy_bits: site out of range");
      if (i > 0 && sites[i] == sites[i - 1])
        throw std::invalid_argument("entropy_bits: repeated site");
    }
    Eigen::VectorXcd psi = psi_;
    // moving the i-th smallest member leaves the later ones at their
    // original positions, so each bubble starts at sites[i]
    for (int i = 0; i < k; ++i)
      for (int pos = sites[i]; pos > i; --pos) fswap_adjacent(psi, pos - 1);
    const int dim_a = 1 << k;
    const int dim_b = 1 << (L_ - k);
    Eigen::MatrixXcd m(dim_a, dim_b);
    for (std::uint32_t n = 0; n < static_cast<std::uint32_t>(psi.size()); ++n)
      m(n & (dim_a - 1), n >> k) = psi(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m * m.adjoint());
    double s = 0.0;
    for (int i = 0; i < dim_a; ++i) {
      const double lam = es.eigenvalues()(i);
      if (lam > 1e-14) s -= lam * std::log2(lam);
    }
    return s;
  }

 private:
  ExactState(int L, Eigen::VectorXcd psi) : L_(L), psi_(std::move(psi)) {}

  // fermionic swap of modes (p, p+1): exchange occupations, sign on |11>
  void fswap_adjacent(Eigen::VectorXcd& psi, int p) const {
    const std::uint32_t lo = 1u << p, hi = 1u << (p + 1);
    for (std::uint32_t n = 0; n < static_cast<std::uint32_t>(psi.size()); ++n) {
      const bool a = n & lo, b = n & hi;
      if (a && b) {
        psi(n) = -psi(n);
      } else if (a != b) {
        const std::uint32_t m = n ^ lo ^ hi;
        if (m > n) std::swap(psi(n), psi(m));
      }
    }
  }

  int L_;
  Eigen::VectorXcd psi_;
};

// --- circuit mirror -----------------------------------------------------------------

// Same step contract as the Gaussian path: unitary (skipped exactly at
// J = 0), then each measured bond in sweep order with one uniform draw,
// outcome +1 iff u < p(+1).
class ExactCircuit {
 public:
  explicit ExactCircuit(const CircuitParams& p) : p_(p) {
    p.validate();
    if (p.L > 10) throw std::invalid_argument("ExactCircuit: L must be <= 10");
    if (p.J != 0.0) {
      Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(1 << p.L, 1 << p.L);
      build_hamiltonian(h);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
      if (es.info() != Eigen::Success)
        throw std::runtime_error("ExactCircuit: eigensolver failed");
      const Eigen::VectorXcd phases =
          (cxd(0.0, -1.0) * es.eigenvalues().cast<cxd>().array()).exp();
      unitary_ = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }
  }

  const CircuitParams& params() const { return p_; }

  double born_probability(const ExactState& state, Bond bond, int s) const {
    const auto [psi_plus, p_plus] = kraus_branch(state, bond, +1);
    (void)psi_plus;
    return s == 1 ? p_plus : 1.0 - p_plus;
  }

  std::vector<std::int8_t> step(ExactState& state, Rng& rng,
                                OutcomeRecord* record = nullptr) const {
    apply_unitary(state);
    std::vector<std::int8_t> outcomes;
    for (const Bond& bond : measured_bonds(p_)) {
      auto [psi_plus, p_plus] = kraus_branch(state, bond, +1);
      const int s = (rng.uniform() < p_plus) ? +1 : -1;
      if (s == 1) {
        state.vector() = std::move(psi_plus);
      } else {
        state.vector() = kraus_branch(state, bond, -1).first;
      }
      state.normalize();
      outcomes.push_back(static_cast<std::int8_t>(s));
    }
    if (record) {
      record->L = p_.L;
      record->bc = p_.bc;
      record->steps.push_back(outcomes);
    }
    return outcomes;
  }

  void replay_step(ExactState& state, const std::vector<std::int8_t>& outcomes) const {
    const auto bonds = measured_bonds(p_);
    if (outcomes.size() != bonds.size())
      throw std::invalid_argument("ExactCircuit::replay_step: outcome count mismatch");
    apply_unitary(state);
    for (std::size_t i = 0; i < bonds.size(); ++i)
      apply_outcome(state, bonds[i], outcomes[i]);
  }

  void apply_unitary(ExactState& state) const {
    if (p_.J != 0.0) state.vector() = unitary_ * state.vector();
  }

  void apply_outcome(ExactState& state, Bond bond, int s) const {
    state.vector() = kraus_branch(state, bond, s).first;
    state.normalize();
  }

 private:

  // un-normalized K(s)|psi> together with its squared norm p(s)
  std::pair<Eigen::VectorXcd, double> kraus_branch(const ExactState& state,
                                                   Bond bond, int s) const {
    const double theta = bond.even ? p_.theta_even() : p_.theta_odd();
    const auto [a, b] = bond_gammas(p_.L, bond);
    const Eigen::VectorXcd gg =
        apply_majorana(p_.L, a, apply_majorana(p_.L, b, state.vector()));
    Eigen::VectorXcd out =
        std::cosh(theta) * state.vector() - cxd(0.0, s * std::sinh(theta)) * gg;
    out /= std::sqrt(2.0 * std::cosh(2.0 * theta));
    const double p = out.squaredNorm();
    return {std::move(out), p};
  }

  void build_hamiltonian(Eigen::MatrixXcd& h) const {
    auto add_term = [&](int a, int b, double coupling) {
      // i * coupling * gamma_a gamma_b, assembled column by column from
      // single basis-vector images
      for (std::uint32_t n = 0; n < static_cast<std::uint32_t>(h.cols()); ++n) {
        const auto ib = majorana_image(p_.L, b, n);
        const auto ia = majorana_image(p_.L, a, ib.index);
        h(ia.index, n) += cxd(0.0, coupling) * ia.coeff * ib.coeff;
      }
    };
    for (int a = 0; a + 1 < 2 * p_.L; ++a) add_term(a, a + 1, p_.J);
    if (p_.bc != Boundary::open) add_term(2 * p_.L - 1, 0, p_.boundary_J());
  }

  CircuitParams p_;
  Eigen::MatrixXcd unitary_;
};

// --- effective dynamics parity --------------------------------------------------------

struct EffectiveParity {
  int sign = 0;           // parity of the leading eigenvector of K K^dag
  double expectation = 0; // <v| P |v>, should be +-1 up to degeneracy
  bool degenerate = false;
};

// Multiply out the full many-body circuit for a recorded trajectory and read
// off the parity of the top eigenvector of K_T K_T^dag. The circuit conserves
// parity, so away from degeneracies the expectation is +-1 exactly.
inline EffectiveParity effective_parity(const CircuitParams& p,
                                        const OutcomeRecord& rec,
                                        double degeneracy_rtol = 1e-10) {
  if (p.L != rec.L) throw std::invalid_argument("effective_parity: size mismatch");
  if (p.bc != rec.bc) throw std::invalid_argument("effective_parity: boundary mismatch");
  if (p.L > 8) throw std::invalid_argument("effective_parity: L must be <= 8");
  rec.validate();
  const FockOps ops(p.L);
  const auto bonds = measured_bonds(p);
  const bool has_unitary = (p.J != 0.0);
  const Eigen::MatrixXcd u =
      has_unitary ? many_body_unitary(ops, p) : Eigen::MatrixXcd();
  // cache the per-bond Kraus matrices
  std::vector<std::array<Eigen::MatrixXcd, 2>> ks(bonds.size());
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    ks[i][0] = kraus(ops, p, bonds[i], -1);
    ks[i][1] = kraus(ops, p, bonds[i], +1);
  }
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Identity(ops.dim(), ops.dim());
  for (const auto& st : rec.steps) {
    if (has_unitary) total = u * total;
    for (std::size_t i = 0; i < bonds.size(); ++i)
      total = ks[i][st[i] == 1 ? 1 : 0] * total;
    total /= total.norm();  // scale only; eigenvectors are unaffected
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(total * total.adjoint());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("effective_parity: eigensolver failed");
  const int top = ops.dim() - 1;
  const Eigen::VectorXcd v = es.eigenvectors().col(top);
  const Eigen::VectorXd pd = ops.parity_diagonal();
  double expectation = 0.0;
  for (int n = 0; n < ops.dim(); ++n) expectation += pd(n) * std::norm(v(n));
  EffectiveParity out;
  out.expectation = expectation;
  out.sign = expectation >= 0.0 ? +1 : -1;
  const double top_val = es.eigenvalues()(top);
  const double next_val = es.eigenvalues()(top - 1);
  out.degenerate = (top_val - next_val) <= degeneracy_rtol * top_val ||
                   std::abs(expectation) < 0.99;
  return out;
}

}  // namespace majolyap::exact
