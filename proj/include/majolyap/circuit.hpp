#pragma once

// Brickwork circuit on a Majorana chain: one time step applies a Kitaev-chain
// unitary exp(-i H), then weakly measures the on-site Majorana pairs
// i gamma_{2j-1} gamma_{2j} ("odd" bonds, strength mu_odd), then the
// inter-site pairs i gamma_{2j} gamma_{2j+1} ("even" bonds, strength mu_even),
// each sweep left to right with Born-sampled outcomes s = +-1.
//
// Everything acts through single-particle matrices on the isometry U of a
// GaussianPureState:
//   unitary:      U <- exp(-2i Ht) U            (Ht = 2L x 2L one-body matrix)
//   measurement:  U <- exp(-2 Tt(s)) U, thin QR (Tt = generator of the Kraus)
// with H = phi^dag Ht phi and the Kraus exponent phi^dag Tt phi in the
// (c_1..c_L, c_1^dag..c_L^dag) ordering. The scalar Kraus normalisations
// (2 cosh 2theta)^{-1/2} cancel from every state update and are omitted here;
// run metadata records the (zero) spectrum shift this convention implies.
//
// Closed-form outcome probabilities, with G = <c c^dag>, F = <c c>:
//   odd bond j:  p(s) = ((s - mu)^2 + 4 s mu G_jj) / (2 (1 + mu^2))
//   even bond (a,b): p(s) = (1 + mu^2 - 4 s mu Re[G_ab + F_ab]) / (2 (1 + mu^2))
// Both follow from <exp(-2 s theta i gamma gamma')> with mu = tanh(theta).

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "majolyap/rng.hpp"
#include "majolyap/state.hpp"

namespace majolyap {

enum class Boundary { open, periodic, antiperiodic };

inline std::string to_string(Boundary bc) {
  switch (bc) {
    case Boundary::open: return "OBC";
    case Boundary::periodic: return "PBC";
    case Boundary::antiperiodic: return "APBC";
  }
  throw std::logic_error("to_string(Boundary): bad value");
}

inline Boundary parse_boundary(const std::string& s) {
  if (s == "OBC") return Boundary::open;
  if (s == "PBC") return Boundary::periodic;
  if (s == "APBC") return Boundary::antiperiodic;
  throw std::invalid_argument("parse_boundary: expected OBC/PBC/APBC, got '" + s + "'");
}

struct CircuitParams {
  int L = 0;
  double J = 0.0;
  double mu_odd = 0.0;
  double mu_even = 0.0;
  Boundary bc = Boundary::open;

  // default coupling mu_even = 1 - mu_odd
  static CircuitParams coupled(int L, double J, double mu_odd, Boundary bc) {
    CircuitParams p{L, J, mu_odd, 1.0 - mu_odd, bc};
    p.validate();
    return p;
  }

  void validate() const {
    if (L < 2) throw std::invalid_argument("CircuitParams: L must be >= 2");
    auto check_mu = [](double mu, const char* name) {
      if (!(mu >= 0.0) || mu >= 1.0)
        throw std::invalid_argument(std::string("CircuitParams: ") + name +
                                    " must lie in [0, 1)");
    };
    check_mu(mu_odd, "mu_odd");
    check_mu(mu_even, "mu_even");
    if (!std::isfinite(J)) throw std::invalid_argument("CircuitParams: J must be finite");
  }

  double theta_odd() const { return std::atanh(mu_odd); }
  double theta_even() const { return std::atanh(mu_even); }

  // coupling of the bond that closes the ring; its sign distinguishes the two
  // ring sectors, open chains have none
  double boundary_J() const {
    switch (bc) {
      case Boundary::open: return 0.0;
      case Boundary::periodic: return J;
      case Boundary::antiperiodic: return -J;
    }
    throw std::logic_error("boundary_J: bad boundary");
  }
};

// A measured bond. Odd bond j pairs (gamma_{2j-1}, gamma_{2j}) on site j;
// even bond j pairs (gamma_{2j}, gamma_{2j+1}) across sites (j, j+1), the
// even bond j = L being the ring-closing pair (gamma_{2L}, gamma_1). All
// 1-based. The flattened label used in records is ell = 2j-1 (odd) / 2j (even).
struct Bond {
  bool even = false;
  int j = 1;

  int label() const { return even ? 2 * j : 2 * j - 1; }
  bool operator==(const Bond&) const = default;
};

// Sweep order shared by the Gaussian evolution, the exact reference
// implementation, and the Lyapunov frame: odd 1..L, then even 1..L-1 and the
// ring bond L when the chain is closed.
inline std::vector<Bond> measured_bonds(const CircuitParams& p) {
  std::vector<Bond> bonds;
  bonds.reserve(2 * p.L);
  for (int j = 1; j <= p.L; ++j) bonds.push_back({false, j});
  const int last_even = (p.bc == Boundary::open) ? p.L - 1 : p.L;
  for (int j = 1; j <= last_even; ++j) bonds.push_back({true, j});
  return bonds;
}

inline int outcomes_per_step(int L, Boundary bc) {
  return bc == Boundary::open ? 2 * L - 1 : 2 * L;
}

// --- single-particle builders ------------------------------------------------

// One-body matrix Ht of the Kitaev chain
//   H = iJ sum_{l<2L} gamma_l gamma_{l+1} + i J' gamma_{2L} gamma_1
//     = J sum_j (2 c_j^dag c_j - 1)
//       - J sum_{j<L} (c_j^dag c_{j+1} + c_j^dag c_{j+1}^dag + h.c.)
//       - J' (c_L^dag c_1 + c_L^dag c_1^dag + h.c.),
// written as phi^dag Ht phi with the hopping/pairing split symmetrically so
// that Ht is real symmetric and particle-hole odd: Sx Ht Sx = -Ht.
inline Eigen::MatrixXd single_particle_hamiltonian(const CircuitParams& p) {
  p.validate();
  const int L = p.L;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * L, 2 * L);
  for (int j = 0; j < L; ++j) {
    h(j, j) += p.J;
    h(L + j, L + j) -= p.J;
  }
  auto add_link = [&](int a, int b, double J) {
    // -J (c_a^dag c_b + c_a^dag c_b^dag + h.c.), 0-based sites a != b
    h(a, b) += -J / 2;  h(b, a) += -J / 2;          // hopping, c^dag c block
    h(L + a, L + b) += J / 2;  h(L + b, L + a) += J / 2;
    h(a, L + b) += -J / 2;  h(L + b, a) += -J / 2;  // pairing, antisymmetric
    h(b, L + a) += J / 2;   h(L + a, b) += J / 2;
  };
  for (int j = 0; j + 1 < L; ++j) add_link(j, j + 1, p.J);
  if (p.bc != Boundary::open) add_link(L - 1, 0, p.boundary_J());
  return h;
}

inline Eigen::MatrixXcd single_particle_unitary(const CircuitParams& p) {
  const Eigen::MatrixXd h = single_particle_hamiltonian(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("single_particle_unitary: eigensolver failed");
  const Eigen::VectorXcd phases =
      (cxd(0.0, -2.0) * es.eigenvalues().cast<cxd>().array()).exp();
  return es.eigenvectors().cast<cxd>() * phases.asDiagonal() *
         es.eigenvectors().transpose().cast<cxd>();
}

// Generator Tt of the outcome-s Kraus operator on one bond, as a real
// symmetric 2L x 2L matrix: the Kraus is exp(phi^dag Tt phi) up to its scalar
// normalisation, and its single-particle action is exp(-2 Tt).
//   odd bond j:  -s theta (2 c^dag c - 1)       -> diag(-s theta | +s theta)
//   even (a,b):  s theta (c_a^dag c_b + c_a^dag c_b^dag + h.c.)
inline Eigen::MatrixXd measurement_generator(const CircuitParams& p, Bond bond,
                                             int s) {
  p.validate();
  if (s != 1 && s != -1) throw std::invalid_argument("measurement_generator: s must be +-1");
  if (bond.j < 1 || bond.j > p.L)
    throw std::invalid_argument("measurement_generator: bond index out of range");
  if (bond.even && bond.j == p.L && p.bc == Boundary::open)
    throw std::invalid_argument(
        "measurement_generator: ring bond is absent on an open chain");
  const int L = p.L;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(2 * L, 2 * L);
  if (!bond.even) {
    const double x = s * p.theta_odd();
    const int j = bond.j - 1;
    t(j, j) = -x;
    t(L + j, L + j) = x;
  } else {
    const double x = s * p.theta_even() / 2;
    const int a = bond.j - 1;
    const int b = bond.j % L;  // site j+1, wrapping only for the ring bond
    t(a, b) = x;         t(b, a) = x;
    t(a, L + b) = x;     t(L + b, a) = x;
    t(b, L + a) = -x;    t(L + a, b) = -x;
    t(L + a, L + b) = -x; t(L + b, L + a) = -x;
  }
  return t;
}

// exp(-2 Tt): real symmetric positive definite
inline Eigen::MatrixXd measurement_matrix(const CircuitParams& p, Bond bond, int s) {
  const Eigen::MatrixXd t = measurement_generator(p, bond, s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("measurement_matrix: eigensolver failed");
  return es.eigenvectors() *
         (-2.0 * es.eigenvalues().array()).exp().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

// --- outcome probabilities ----------------------------------------------------

inline double born_probability(const GaussianPureState& state,
                               const CircuitParams& p, Bond bond, int s) {
  if (s != 1 && s != -1) throw std::invalid_argument("born_probability: s must be +-1");
  const int L = p.L;
  if (!bond.even) {
    const double mu = p.mu_odd;
    const int j = bond.j - 1;
    const double g = state.correlation_entry(j, j).real();
    return ((s - mu) * (s - mu) + 4.0 * s * mu * g) / (2.0 * (1.0 + mu * mu));
  }
  const double mu = p.mu_even;
  const int a = bond.j - 1;
  const int b = bond.j % L;
  const double re = (state.correlation_entry(a, b) +
                     state.correlation_entry(a, L + b)).real();
  return (1.0 + mu * mu - 4.0 * s * mu * re) / (2.0 * (1.0 + mu * mu));
}

// --- compiled fast application --------------------------------------------------

// Precomputed single-particle matrices for one parameter set: the dense
// unitary plus, per bond and outcome, the few rows of exp(-2 Tt) that differ
// from the identity. Odd bonds scale two rows; even bonds mix four rows
// through a 4x4 block.
class CompiledOps {
 public:
  explicit CompiledOps(const CircuitParams& p) : params_(p) {
    p.validate();
    const int L = p.L;
    has_unitary_ = (p.J != 0.0);
    if (has_unitary_) unitary_ = single_particle_unitary(p);
    odd_scale_[0] = std::exp(-2.0 * p.theta_odd());  // s = -1: rows (j | L+j)
    odd_scale_[1] = std::exp(+2.0 * p.theta_odd());  // s = +1
    const int last_even = (p.bc == Boundary::open) ? L - 1 : L;
    even_blocks_.resize(last_even);
    for (int j = 1; j <= last_even; ++j) {
      const Bond bond{true, j};
      for (int si = 0; si < 2; ++si) {
        const int s = si == 0 ? -1 : 1;
        even_blocks_[j - 1][si] = dense_even_block(p, bond, s);
      }
    }
  }

  const CircuitParams& params() const { return params_; }
  bool has_unitary() const { return has_unitary_; }
  const Eigen::MatrixXcd& unitary() const {
    if (!has_unitary_) throw std::logic_error("CompiledOps: J = 0, no unitary stored");
    return unitary_;
  }

  // row scale applied at index j-1 of an odd bond (index L+j-1 gets the inverse)
  double odd_scale(int s) const { return odd_scale_[s == 1 ? 1 : 0]; }
  const Eigen::Matrix4d& even_block(Bond bond, int s) const {
    return even_blocks_.at(bond.j - 1)[s == 1 ? 1 : 0];
  }
  // row/column support of an even bond: (a, b, L+a, L+b)
  static std::array<int, 4> even_support(int L, Bond bond) {
    const int a = bond.j - 1;
    const int b = bond.j % L;
    return {a, b, L + a, L + b};
  }

  // M <- exp(-2i Ht) M (no-op at J = 0, where the unitary is the identity)
  void apply_unitary(Eigen::MatrixXcd& m) const {
    if (has_unitary_) m = unitary_ * m;
  }

  // M <- exp(-2 Tt(bond, s)) M, touching only the affected rows
  void apply_measurement(Eigen::MatrixXcd& m, Bond bond, int s) const {
    const int L = params_.L;
    if (!bond.even) {
      const double up = (s == 1) ? odd_scale_[1] : odd_scale_[0];
      m.row(bond.j - 1) *= up;
      m.row(L + bond.j - 1) *= 1.0 / up;
      return;
    }
    const Eigen::Matrix4d& blk = even_blocks_.at(bond.j - 1)[s == 1 ? 1 : 0];
    const std::array<int, 4> rows = even_support(L, bond);
    Eigen::Matrix<cxd, 4, Eigen::Dynamic> tmp(4, m.cols());
    for (int r = 0; r < 4; ++r) tmp.row(r) = m.row(rows[r]);
    tmp = blk.cast<cxd>() * tmp;
    for (int r = 0; r < 4; ++r) m.row(rows[r]) = tmp.row(r);
  }

 private:
  static Eigen::Matrix4d dense_even_block(const CircuitParams& p, Bond bond, int s) {
    // 4x4 restriction of exp(-2 Tt) to rows/cols (a, b, L+a, L+b)
    const double x = s * p.theta_even() / 2;
    Eigen::Matrix4d t;
    t << 0, x, 0, x,
         x, 0, -x, 0,
         0, -x, 0, -x,
         x, 0, -x, 0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(t);
    return es.eigenvectors() *
           (-2.0 * es.eigenvalues().array()).exp().matrix().asDiagonal() *
           es.eigenvectors().transpose();
  }

  CircuitParams params_;
  bool has_unitary_ = false;
  Eigen::MatrixXcd unitary_;
  std::array<double, 2> odd_scale_{};
  std::vector<std::array<Eigen::Matrix4d, 2>> even_blocks_;
};

// --- state updates ---------------------------------------------------------------

inline void apply_unitary(GaussianPureState& state, const CompiledOps& ops) {
  ops.apply_unitary(state.isometry());
  state.reorthonormalize();
}

inline void apply_kraus(GaussianPureState& state, const CompiledOps& ops,
                        Bond bond, int s) {
  ops.apply_measurement(state.isometry(), bond, s);
  try {
    orthonormalize_columns(state.isometry(), 1e-13);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("apply_kraus: measurement annihilated the state");
  }
}

// --- outcome records ---------------------------------------------------------------

struct OutcomeRecord {
  int L = 0;
  Boundary bc = Boundary::open;
  // steps[t] lists outcomes in sweep order (odd 1..L, then the even bonds)
  std::vector<std::vector<std::int8_t>> steps;

  int T() const { return static_cast<int>(steps.size()); }

  void validate() const {
    const std::size_t n = static_cast<std::size_t>(outcomes_per_step(L, bc));
    for (const auto& st : steps) {
      if (st.size() != n)
        throw std::runtime_error("OutcomeRecord: step with wrong outcome count");
      for (auto v : st)
        if (v != 1 && v != -1)
          throw std::runtime_error("OutcomeRecord: outcome not +-1");
    }
  }
};

// Flip the ring-bond outcome of every step and toggle the ring sector. The
// flipped bond is the last entry of each sweep (even bond L), so this is only
// defined for closed chains. Applying it twice restores the record.
inline OutcomeRecord twist_ring_outcomes(const OutcomeRecord& rec) {
  if (rec.bc == Boundary::open)
    throw std::invalid_argument("twist_ring_outcomes: record has no ring bond");
  OutcomeRecord out = rec;
  out.bc = (rec.bc == Boundary::periodic) ? Boundary::antiperiodic
                                          : Boundary::periodic;
  for (auto& st : out.steps) {
    if (st.empty()) throw std::runtime_error("twist_ring_outcomes: empty step");
    st.back() = static_cast<std::int8_t>(-st.back());
  }
  return out;
}

inline void save_record(const std::string& path, const OutcomeRecord& rec) {
  rec.validate();
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("save_record: cannot open " + path);
  f << "majolyap-rec v1 L=" << rec.L << " bc=" << to_string(rec.bc)
    << " T=" << rec.T() << "\n";
  for (const auto& st : rec.steps) {
    for (std::size_t i = 0; i < st.size(); ++i)
      f << (i ? " " : "") << static_cast<int>(st[i]);
    f << "\n";
  }
  if (!f) throw std::runtime_error("save_record: write failed for " + path);
}

inline OutcomeRecord load_record(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_record: cannot open " + path);
  std::string header;
  if (!std::getline(f, header))
    throw std::runtime_error("load_record: empty file " + path);
  std::istringstream hs(header);
  std::string tag, ver, kv;
  hs >> tag >> ver;
  if (tag != "majolyap-rec" || ver != "v1")
    throw std::runtime_error("load_record: bad header '" + header + "'");
  OutcomeRecord rec;
  int T = -1;
  while (hs >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("load_record: bad header field '" + kv + "'");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "L") rec.L = std::stoi(val);
    else if (key == "bc") rec.bc = parse_boundary(val);
    else if (key == "T") T = std::stoi(val);
    else throw std::runtime_error("load_record: unknown header field '" + key + "'");
  }
  if (rec.L < 2 || T < 0) throw std::runtime_error("load_record: incomplete header");
  const int per_step = outcomes_per_step(rec.L, rec.bc);
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::int8_t> st;
    st.reserve(per_step);
    int v;
    while (ls >> v) {
      if (v != 1 && v != -1)
        throw std::runtime_error("load_record: outcome not +-1");
      st.push_back(static_cast<std::int8_t>(v));
    }
    rec.steps.push_back(std::move(st));
  }
  if (rec.T() != T)
    throw std::runtime_error("load_record: header claims T=" + std::to_string(T) +
                             " but file has " + std::to_string(rec.T()) + " steps");
  rec.validate();
  return rec;
}

// --- one circuit step ----------------------------------------------------------------

// Unitary, then sample-and-apply each bond in sweep order. Outcomes are
// appended to *record when given.
inline std::vector<std::int8_t> step(GaussianPureState& state,
                                     const CompiledOps& ops, Rng& rng,
                                     OutcomeRecord* record = nullptr,
                                     std::vector<double>* born_trace = nullptr) {
  const CircuitParams& p = ops.params();
  if (state.sites() != p.L) throw std::invalid_argument("step: size mismatch");
  apply_unitary(state, ops);
  std::vector<std::int8_t> outcomes;
  outcomes.reserve(outcomes_per_step(p.L, p.bc));
  for (const Bond& bond : measured_bonds(p)) {
    const double p_plus = born_probability(state, p, bond, +1);
    if (born_trace) born_trace->push_back(p_plus);
    const int s = (rng.uniform() < p_plus) ? +1 : -1;
    apply_kraus(state, ops, bond, s);
    outcomes.push_back(static_cast<std::int8_t>(s));
  }
  if (record) {
    record->L = p.L;
    record->bc = p.bc;
    record->steps.push_back(outcomes);
  }
  return outcomes;
}

// Deterministic re-application of recorded outcomes (no sampling).
inline void replay_step(GaussianPureState& state, const CompiledOps& ops,
                        const std::vector<std::int8_t>& outcomes) {
  const CircuitParams& p = ops.params();
  const auto bonds = measured_bonds(p);
  if (outcomes.size() != bonds.size())
    throw std::invalid_argument("replay_step: outcome count mismatch");
  apply_unitary(state, ops);
  for (std::size_t i = 0; i < bonds.size(); ++i)
    apply_kraus(state, ops, bonds[i], outcomes[i]);
}

}  // namespace majolyap
