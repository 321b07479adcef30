// End-to-end acceptance checks for the monitored-chain library. Each
// criterion prints a single PASS/FAIL line with its measured figure of merit
// and the tolerance it is held to; the exit status reflects the conjunction.
// Budgets range from seconds (exact cross-checks at small L) to minutes
// (converged spectra and finite-size crossings at L = 16..32), so the binary
// streams one line per criterion as it completes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "majolyap/circuit.hpp"
#include "majolyap/entanglement.hpp"
#include "majolyap/exact.hpp"
#include "majolyap/lyapunov.hpp"
#include "majolyap/rng.hpp"
#include "majolyap/state.hpp"
#include "majolyap/sweep.hpp"
#include "majolyap/topology.hpp"
#include "majolyap/trajectory.hpp"

using namespace majolyap;

namespace {

std::string g3(double x) {
  char b[40];
  std::snprintf(b, sizeof b, "%.3g", x);
  return b;
}

// 1. Trajectory engine against the statevector oracle: identical outcome
//    sequences, per-step covariance agreement, and per-bond Born
//    probabilities across L in {2,3,4}, J in {0, 0.5}, mu_o in
//    {0.1, 0.5, 0.9}, both boundary conditions, 25 seeds, T = 30.
bool c_engine_vs_oracle(std::string& detail) {
  const double tol_cov = 1e-9, tol_born = 1e-10;
  double worst_cov = 0.0, worst_born = 0.0;
  long runs = 0, outcome_mismatches = 0;
  for (int L : {2, 3, 4})
    for (double J : {0.0, 0.5})
      for (double mu : {0.1, 0.5, 0.9})
        for (Boundary bc : {Boundary::open, Boundary::periodic}) {
          const auto p = CircuitParams::coupled(L, J, mu, bc);
          const CompiledOps ops(p);
          const exact::ExactCircuit ec(p);
          const auto bonds = measured_bonds(p);
          for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            Rng born(derive_seed(seed, kStreamBorn, 0));
            Rng born_ex(derive_seed(seed, kStreamBorn, 0));
            auto st = CorrelationState::vacuum(p.L);
            auto es = exact::ExactState::vacuum(p.L);   // replays the sampled run
            auto es2 = exact::ExactState::vacuum(p.L);  // samples independently
            OutcomeRecord rec, rec_ex;
            for (int t = 0; t < 30; ++t) {
              std::vector<double> trace;
              step(st, ops, born, &rec, &trace);
              ec.apply_unitary(es);
              for (std::size_t i = 0; i < bonds.size(); ++i) {
                worst_born = std::max(
                    worst_born,
                    std::abs(trace[i] - ec.born_probability(es, bonds[i], +1)));
                ec.apply_outcome(es, bonds[i], rec.steps.back()[i]);
              }
              ec.step(es2, born_ex, &rec_ex);
              worst_cov = std::max(
                  worst_cov,
                  (st.covariance() - es.covariance()).cwiseAbs().maxCoeff());
            }
            if (rec.steps != rec_ex.steps) ++outcome_mismatches;
            ++runs;
          }
        }
  detail = "cov " + g3(worst_cov) + " <= " + g3(tol_cov) + ", born " +
           g3(worst_born) + " <= " + g3(tol_born) + ", " +
           std::to_string(outcome_mismatches) + " outcome mismatches over " +
           std::to_string(runs) + " runs";
  return worst_cov <= tol_cov && worst_born <= tol_born &&
         outcome_mismatches == 0 && runs == 900;
}

// 2. Kraus completeness in the many-body representation and unitarity of the
//    single-particle and many-body transfer operators.
bool c_kraus_completeness(std::string& detail) {
  const double tol = 1e-12;
  double worst_k = 0.0, worst_u = 0.0;
  for (int L : {2, 3}) {
    const exact::FockOps ops(L);
    const Eigen::MatrixXcd id =
        Eigen::MatrixXcd::Identity(ops.dim(), ops.dim());
    for (double mu : {0.1, 0.5, 0.9})
      for (Boundary bc : {Boundary::open, Boundary::periodic}) {
        const auto p = CircuitParams::coupled(L, 0.5, mu, bc);
        for (const Bond& b : measured_bonds(p)) {
          const Eigen::MatrixXcd kp = exact::kraus(ops, p, b, +1);
          const Eigen::MatrixXcd km = exact::kraus(ops, p, b, -1);
          worst_k = std::max(worst_k, (kp.adjoint() * kp + km.adjoint() * km - id)
                                          .cwiseAbs()
                                          .maxCoeff());
        }
        const Eigen::MatrixXcd umb = exact::many_body_unitary(ops, p);
        worst_u = std::max(
            worst_u, (umb.adjoint() * umb - id).cwiseAbs().maxCoeff());
      }
  }
  for (Boundary bc :
       {Boundary::open, Boundary::periodic, Boundary::antiperiodic})
    for (double J : {0.5, 1.0}) {
      const auto p = CircuitParams::coupled(4, J, 0.5, bc);
      const Eigen::MatrixXcd u = single_particle_unitary(p);
      worst_u = std::max(
          worst_u,
          (u.adjoint() * u - Eigen::MatrixXcd::Identity(2 * p.L, 2 * p.L))
              .cwiseAbs()
              .maxCoeff());
    }
  detail = "sum K^dag K dev " + g3(worst_k) + ", unitarity dev " + g3(worst_u) +
           " <= " + g3(tol);
  return worst_k <= tol && worst_u <= tol;
}

// 3. Frame-accumulated exponents against the dense one-shot factorization
//    with a matched starting frame, plus particle-hole pairing of the dense
//    spectrum, over 10 parameter cells x 5 seeds.
bool c_spectra_vs_dense(std::string& detail) {
  struct Cell {
    int L;
    double J, mu;
    Boundary bc;
    long T;
  };
  const std::vector<Cell> cells = {
      {2, 0.0, 0.3, Boundary::open, 10},
      {3, 0.5, 0.5, Boundary::periodic, 20},
      {4, 0.0, 0.1, Boundary::periodic, 30},
      {4, 0.5, 0.7, Boundary::open, 40},
      {5, 0.0, 0.5, Boundary::antiperiodic, 30},
      {5, 0.5, 0.2, Boundary::open, 20},
      {6, 0.0, 0.9, Boundary::periodic, 40},
      {6, 0.5, 0.5, Boundary::open, 40},
      {6, 0.25, 0.35, Boundary::periodic, 30},
      {4, 1.0, 0.6, Boundary::antiperiodic, 20},
  };
  const double tol_dz = 1e-6, tol_pair = 1e-9;
  double worst_dz = 0.0, worst_pair = 0.0;
  int runs = 0;
  for (const auto& c : cells) {
    const auto p = CircuitParams::coupled(c.L, c.J, c.mu, c.bc);
    const CompiledOps ops(p);
    const auto bonds = measured_bonds(p);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto rec = sample_outcome_record(p, seed, 0, c.T);
      Rng frng = trajectory_rng(seed, 0, kStreamFrame);
      LyapunovFrame frame(p.L, frng);
      const Eigen::MatrixXcd w0 = frame.frame();
      for (const auto& outs : rec.steps) frame.propagate(ops, bonds, outs);
      const Eigen::VectorXd oneshot = dense_oneshot_logs(p, rec, w0);
      worst_dz = std::max(worst_dz, (frame.acc() - oneshot).cwiseAbs().maxCoeff() /
                                        static_cast<double>(c.T));
      const auto ds = effective_hamiltonian_direct(p, rec);
      worst_pair = std::max(worst_pair, ds.pairing_residual);
      ++runs;
    }
  }
  detail = "one-shot dev " + g3(worst_dz) + " <= " + g3(tol_dz) + ", pairing " +
           g3(worst_pair) + " <= " + g3(tol_pair) + " over " +
           std::to_string(runs) + " runs";
  return worst_dz <= tol_dz && worst_pair <= tol_pair && runs == 50;
}

// 4. Sign of the determinant invariant at a fixed horizon against the exact
//    many-body parity product over 50 random (params, record) draws;
//    near-degenerate evaluations are excluded and counted.
bool c_invariant_vs_parity(std::string& detail) {
  std::mt19937_64 meta(20250815ull);
  std::uniform_real_distribution<double> umu(0.15, 0.85);
  int evaluated = 0, skipped = 0, mismatches = 0;
  for (int k = 0; k < 50; ++k) {
    const int L = 2 + static_cast<int>(meta() % 3);
    const double J = (meta() & 1) ? 0.5 : 0.0;
    const double mu = umu(meta);
    const long T = 4 + static_cast<long>(meta() % 17);
    const auto p = CircuitParams::coupled(L, J, mu, Boundary::periodic);
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(k);
    const auto r = chi(p, seed, ChiMode::fixed_t, T);
    const auto rec = sample_outcome_record(p, seed, 0, T);
    CircuitParams ap = p;
    ap.bc = Boundary::antiperiodic;
    const auto op = exact::effective_parity(p, rec);
    const auto oa = exact::effective_parity(ap, twist_ring_outcomes(rec));
    if (op.degenerate || oa.degenerate || !r.reliable ||
        std::min(std::abs(r.p_pbc), std::abs(r.p_apbc)) <= 0.2) {
      ++skipped;
      continue;
    }
    ++evaluated;
    if (r.sign() != op.sign * oa.sign) ++mismatches;
  }
  detail = std::to_string(mismatches) + " sign mismatches over " +
           std::to_string(evaluated) + " evaluated (" +
           std::to_string(skipped) + " near-degenerate skipped)";
  return mismatches == 0 && evaluated >= 25;
}

// 5. Converged invariant in the measurement-only circuit at L = 16:
//    chi = -1 for mu_o in {0.1, 0.3} and +1 for {0.7, 0.9}, unanimously over
//    10 seeds, with the periodic-sector parity pinned at +1.
bool c_invariant_phases(std::string& detail) {
  ConvergencePolicy pol;
  pol.max_steps = 1000000;
  double worst_chi_dev = 0.0, worst_p_dev = 0.0;
  int failures = 0, runs = 0;
  for (double mu : {0.1, 0.3, 0.7, 0.9}) {
    const double target = mu < 0.5 ? -1.0 : 1.0;
    const auto p = CircuitParams::coupled(16, 0.0, mu, Boundary::periodic);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto r = chi(p, seed, ChiMode::converged, 0, 0, pol);
      worst_chi_dev = std::max(worst_chi_dev, std::abs(r.chi - target));
      worst_p_dev = std::max(worst_p_dev, std::abs(r.p_pbc - 1.0));
      // The twisted partner replays to the periodic run's stopping time, so
      // only the sampled run carries a stopping verdict; the partner's
      // health is screened by the parity-reliability gate.
      const bool ok = r.converged_pbc && r.reliable &&
                      std::abs(r.chi - target) <= 1e-3 &&
                      std::abs(r.p_pbc - 1.0) <= 1e-3;
      if (!ok) ++failures;
      ++runs;
    }
  }
  detail = "chi dev " + g3(worst_chi_dev) + ", p_pbc dev " + g3(worst_p_dev) +
           " <= 0.001, " + std::to_string(failures) + " failures over " +
           std::to_string(runs) + " runs";
  return failures == 0;
}

// 6. Edge-mode localization on the open measurement-only chain: the lowest
//    exponent collapses in the topological phase relative to the trivial one
//    and the lowest mode's weight concentrates on the end sites.
bool c_edge_localization(std::string& detail) {
  ConvergencePolicy pol;
  pol.max_steps = 1000000;
  const int n_seeds = 3;
  bool pass = true, converged = true;
  std::string parts;
  for (int L : {16, 32}) {
    double z_topo = 0.0, z_triv = 0.0, w_topo = 0.0, w_triv = 0.0;
    for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
      const auto a = run_until_converged(
          CircuitParams::coupled(L, 0.0, 0.1, Boundary::open), seed, 0, pol);
      const auto b = run_until_converged(
          CircuitParams::coupled(L, 0.0, 0.9, Boundary::open), seed, 0, pol);
      converged = converged && a.spectrum.converged && b.spectrum.converged;
      z_topo += a.spectrum.z(0);
      z_triv += b.spectrum.z(0);
      w_topo += a.meta.edge_weight;
      w_triv += b.meta.edge_weight;
    }
    z_topo /= n_seeds;
    z_triv /= n_seeds;
    w_topo /= n_seeds;
    w_triv /= n_seeds;
    const double ratio = z_topo / z_triv;
    pass = pass && ratio <= 1e-2 && w_topo > 0.9 && w_triv < 0.3;
    parts += "L" + std::to_string(L) + " z1 ratio " + g3(ratio) + " edge " +
             g3(w_topo) + "/" + g3(w_triv) + "; ";
  }
  detail = parts + (converged ? "all converged" : "UNCONVERGED RUNS");
  return pass && converged;
}

// 7. Finite-size crossing of the four-segment entropy combination: the
//    combination is size-independent exactly at the transition, so the
//    L = 16 and L = 32 curves meet there and separate on both flanks. The
//    meeting point must lie inside [0.45, 0.55]. The curves approach each
//    other tangentially, so the detector accepts either an interpolated
//    sign change of their difference or a statistical collapse: the point
//    where the difference is least significant against its standard error,
//    provided the curves are decisively separated at 0.4 and 0.6.
bool c_entropy_crossing(std::string& detail) {
  const std::vector<double> grid = {0.3, 0.4, 0.45, 0.5, 0.55, 0.6, 0.7};
  const int n_seeds = 50, window = 1000;
  // mean and standard error per size and grid point
  std::vector<std::vector<double>> mean_tee(2), se_tee(2);
  int li = 0;
  for (int L : {16, 32}) {
    const auto q = Partition::equal_quarters(L);
    const long warmup = SweepConfig::entanglement_warmup(L);
    for (double mu : grid) {
      const auto p = CircuitParams::coupled(L, 0.0, mu, Boundary::open);
      const CompiledOps ops(p);
      double sum = 0.0, sumsq = 0.0;
      for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
        Rng born(derive_seed(seed, kStreamBorn, 0));
        auto st = CorrelationState::vacuum(L);
        for (long t = 0; t < warmup; ++t) step(st, ops, born);
        double s = 0.0;
        for (int t = 0; t < window; ++t) {
          step(st, ops, born);
          s += topological_entanglement_entropy(st.correlation(), q);
        }
        const double v = s / window;
        sum += v;
        sumsq += v * v;
      }
      const double m = sum / n_seeds;
      const double var = std::max(0.0, sumsq / n_seeds - m * m);
      mean_tee[li].push_back(m);
      se_tee[li].push_back(std::sqrt(var / (n_seeds - 1)));
    }
    ++li;
  }
  std::vector<double> d(grid.size()), t(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    d[i] = mean_tee[1][i] - mean_tee[0][i];
    const double se = std::hypot(se_tee[0][i], se_tee[1][i]);
    t[i] = std::abs(d[i]) / std::max(se, 1e-12);
  }
  bool crossing = false;
  double mu_star = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size() && !crossing; ++i) {
    double x;
    if (d[i] == 0.0)
      x = grid[i];
    else if (d[i] * d[i + 1] < 0.0)
      x = grid[i] + (grid[i + 1] - grid[i]) * d[i] / (d[i] - d[i + 1]);
    else
      continue;
    if (x >= 0.45 && x <= 0.55) {
      crossing = true;
      mu_star = x;
    }
  }
  if (!crossing) {
    const std::size_t imin =
        std::min_element(t.begin(), t.end()) - t.begin();
    const std::size_t i04 = 1, i06 = 5;  // grid indices of 0.4 and 0.6
    if (grid[imin] >= 0.45 && grid[imin] <= 0.55 && t[imin] <= 3.0 &&
        t[i04] >= 5.0 && t[i06] >= 5.0) {
      crossing = true;
      mu_star = grid[imin];
    }
  }
  std::string c16, c32, ts;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const char* sep = i + 1 < grid.size() ? "," : "";
    c16 += g3(mean_tee[0][i]) + sep;
    c32 += g3(mean_tee[1][i]) + sep;
    ts += g3(t[i]) + sep;
  }
  detail = crossing ? ("curves meet at mu_o = " + g3(mu_star))
                    : "no meeting point inside [0.45, 0.55]";
  detail += "; L16 [" + c16 + "] L32 [" + c32 + "] |d|/se [" + ts + "]";
  return crossing;
}

// 8. Relaxation-rate scaling with the unitary on: at the self-dual point the
//    smallest exponent decreases monotonically with L, while deep in either
//    phase it is system-size independent to within 50%.
bool c_critical_slowing(std::string& detail) {
  ConvergencePolicy pol;
  pol.max_steps = 1000000;
  const int n_seeds = 3;
  bool converged = true;
  std::vector<double> z_crit;
  std::string parts;
  bool spread_ok = true;
  for (double mu : {0.1, 0.5, 0.9}) {
    std::vector<double> z1;
    for (int L : {8, 16, 32}) {
      const auto p = CircuitParams::coupled(L, 0.5, mu, Boundary::periodic);
      double acc = 0.0;
      for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
        const auto run = run_until_converged(p, seed, 0, pol);
        converged = converged && run.spectrum.converged;
        acc += run.spectrum.z(0);
      }
      z1.push_back(acc / n_seeds);
    }
    parts += "mu " + g3(mu) + ": z1 [" + g3(z1[0]) + "," + g3(z1[1]) + "," +
             g3(z1[2]) + "]; ";
    if (mu == 0.5) {
      z_crit = z1;
    } else {
      const double spread =
          *std::max_element(z1.begin(), z1.end()) /
              *std::min_element(z1.begin(), z1.end()) -
          1.0;
      spread_ok = spread_ok && spread < 0.5;
    }
  }
  const bool monotone = z_crit[0] > z_crit[1] && z_crit[1] > z_crit[2];
  detail = parts + (converged ? "all converged" : "UNCONVERGED RUNS");
  return monotone && spread_ok && converged;
}

// 9. Sample-averaged invariant at the dynamical horizon T = L with the
//    unitary on: sharp in both phases, washed out at the self-dual point.
bool c_dynamical_invariant(std::string& detail) {
  std::string parts;
  bool pass = true;
  for (double mu : {0.1, 0.5, 0.9}) {
    const auto p = CircuitParams::coupled(16, 0.5, mu, Boundary::periodic);
    const auto e = chi_ensemble(p, 1, 100, 16);
    const double m = std::abs(e.mean);
    pass = pass && (mu == 0.5 ? m < 0.4 : m > 0.9);
    parts += "|mean|(" + g3(mu) + ") = " + g3(m) + " se " + g3(e.std_error) +
             "; ";
  }
  detail = parts + "thresholds 0.9 / 0.4";
  return pass;
}

// 10. Sweep determinism: the same configuration executed serially and with
//     eight worker threads produces byte-identical per-seed and aggregate
//     CSV files, for both a replica-overlap protocol and the entanglement
//     protocol.
bool c_sweep_determinism(std::string& detail) {
  const auto slurp = [](const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const auto run_with_threads = [&](const SweepConfig& cfg,
                                    const std::string& dir, int threads) {
    setenv("MAJOLYAP_THREADS", std::to_string(threads).c_str(), 1);
    const auto r = run_sweep(cfg, dir);
    unsetenv("MAJOLYAP_THREADS");
    if (r.exit_code != 0)
      throw std::runtime_error("sweep failed in " + dir);
    return std::make_pair(slurp(r.per_seed_csv), slurp(r.aggregate_csv));
  };

  SweepConfig inv;
  inv.protocol = Protocol::chi_at_t;
  inv.sizes = {4, 8};
  inv.mu_o = {0.2, 0.5, 0.8};
  inv.J = 0.5;
  inv.bc = Boundary::periodic;
  inv.seed_base = 21;
  inv.seed_count = 5;

  SweepConfig ent;
  ent.protocol = Protocol::entanglement;
  ent.sizes = {8};
  ent.mu_o = {0.3, 0.7};
  ent.J = 0.0;
  ent.bc = Boundary::open;
  ent.seed_base = 5;
  ent.seed_count = 3;

  int compared = 0;
  bool identical = true;
  for (const auto* cfg : {&inv, &ent}) {
    const std::string base =
        std::string("acceptance_sweep_") + to_string(cfg->protocol);
    const auto serial = run_with_threads(*cfg, base + "_serial", 1);
    const auto serial2 = run_with_threads(*cfg, base + "_serial2", 1);
    const auto par = run_with_threads(*cfg, base + "_par8", 8);
    identical = identical && serial == serial2 && serial == par;
    compared += 2;
  }
  detail = std::to_string(compared) +
           " pairwise file comparisons, all byte-identical";
  if (!identical) detail = "serial and threaded CSV outputs differ";
  return identical;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"trajectory engine vs statevector oracle", c_engine_vs_oracle},
      {"kraus completeness and transfer unitarity", c_kraus_completeness},
      {"frame exponents vs dense one-shot spectra", c_spectra_vs_dense},
      {"fixed-horizon invariant vs many-body parity", c_invariant_vs_parity},
      {"converged invariant, measurement-only phases", c_invariant_phases},
      {"edge-mode localization, open chain", c_edge_localization},
      {"topological entropy finite-size crossing", c_entropy_crossing},
      {"critical slowing of the relaxation rate", c_critical_slowing},
      {"dynamical-horizon invariant ensemble", c_dynamical_invariant},
      {"sweep determinism across thread counts", c_sweep_determinism},
  };
  const auto wall0 = std::chrono::steady_clock::now();
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%2zu] %-45s %s  (%s; %.1f s)\n", i + 1, criteria[i].name,
                ok ? "PASS" : "FAIL", detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failed;
  }
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
          .count();
  std::printf("acceptance: %zu/%zu criteria passed (%.1f min total)\n",
              criteria.size() - failed, criteria.size(), total / 60.0);
  return failed == 0 ? 0 : 1;
}
