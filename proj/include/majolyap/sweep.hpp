#pragma once

// Sweep driver behind the CLI: a JSON-configured grid over (L, mu_o) runs one
// protocol per (cell, seed) task on a small work pool and emits a per-seed CSV
// plus a per-cell aggregate CSV. Rows are computed into preallocated slots and
// written in grid order, so serial and parallel executions produce identical
// bytes. Nothing time- or host-dependent goes into the output files.

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "majolyap/entanglement.hpp"
#include "majolyap/exact.hpp"
#include "majolyap/lyapunov.hpp"
#include "majolyap/topology.hpp"
#include "majolyap/trajectory.hpp"

namespace majolyap {

inline constexpr const char* kCsvHeaderTag = "# majolyap-csv v1";

enum class Protocol { spectrum, chi_converged, chi_at_t, entanglement, oracle_check };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::spectrum: return "spectrum";
    case Protocol::chi_converged: return "chi_converged";
    case Protocol::chi_at_t: return "chi_at_T";
    case Protocol::entanglement: return "entanglement";
    case Protocol::oracle_check: return "oracle_check";
  }
  throw std::logic_error("to_string(Protocol): bad value");
}

// invalid configuration; the CLI maps this to exit code 2
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  return pos == std::string::npos ? 1 : line_of_offset(text, pos);
}

[[noreturn]] inline void config_fail(const std::string& text,
                                     const std::string& key,
                                     const std::string& what) {
  throw ConfigError("config line " + std::to_string(line_of_key(text, key)) +
                    ": " + what);
}

// deterministic shortest-ish float formatting for CSV cells
inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace detail

struct SweepConfig {
  std::vector<double> mu_o;
  std::vector<int> sizes;  // the "L" list
  double J = 0.0;
  Boundary bc = Boundary::open;
  std::uint64_t seed_base = 1;
  int seed_count = 1;
  Protocol protocol = Protocol::spectrum;
  long max_steps = 60000;
  int T_fixed = 0;  // chi_at_T horizon; 0 means T = L
  bool write_records = false;
  std::string output_dir;  // overridden by the CLI -o flag when given

  static SweepConfig from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config line " +
                        std::to_string(detail::line_of_offset(text, e.byte)) +
                        ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config line 1: expected a JSON object");

    static const char* known[] = {"mu_o",      "L",       "J",
                                  "bc",        "seeds",   "protocol",
                                  "max_steps", "T_fixed", "write_records",
                                  "output_dir"};
    for (const auto& item : j.items()) {
      bool ok = false;
      for (const char* k : known) ok = ok || item.key() == k;
      if (!ok) detail::config_fail(text, item.key(), "unknown key '" + item.key() + "'");
    }

    SweepConfig cfg;
    auto get = [&](const char* key, auto& dst) {
      if (!j.contains(key)) return;
      try {
        dst = j.at(key).get<std::decay_t<decltype(dst)>>();
      } catch (const nlohmann::json::exception& e) {
        detail::config_fail(text, key, std::string("bad value: ") + e.what());
      }
    };

    if (!j.contains("mu_o")) detail::config_fail(text, "mu_o", "missing required key 'mu_o'");
    if (!j.contains("L")) detail::config_fail(text, "L", "missing required key 'L'");
    if (!j.contains("protocol"))
      detail::config_fail(text, "protocol", "missing required key 'protocol'");

    get("mu_o", cfg.mu_o);
    get("L", cfg.sizes);
    get("J", cfg.J);
    get("max_steps", cfg.max_steps);
    get("T_fixed", cfg.T_fixed);
    get("write_records", cfg.write_records);
    get("output_dir", cfg.output_dir);

    if (j.contains("bc")) {
      std::string s;
      get("bc", s);
      try {
        cfg.bc = parse_boundary(s);
      } catch (const std::invalid_argument& e) {
        detail::config_fail(text, "bc", e.what());
      }
    }

    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      if (!s.is_object()) detail::config_fail(text, "seeds", "'seeds' must be an object");
      for (const auto& item : s.items())
        if (item.key() != "base" && item.key() != "count")
          detail::config_fail(text, item.key(),
                              "unknown key '" + item.key() + "' in 'seeds'");
      try {
        if (s.contains("base")) cfg.seed_base = s.at("base").get<std::uint64_t>();
        if (s.contains("count")) cfg.seed_count = s.at("count").get<int>();
      } catch (const nlohmann::json::exception& e) {
        detail::config_fail(text, "seeds", std::string("bad value: ") + e.what());
      }
    }

    {
      std::string s;
      get("protocol", s);
      if (s == "spectrum") cfg.protocol = Protocol::spectrum;
      else if (s == "chi_converged") cfg.protocol = Protocol::chi_converged;
      else if (s == "chi_at_T") cfg.protocol = Protocol::chi_at_t;
      else if (s == "entanglement") cfg.protocol = Protocol::entanglement;
      else if (s == "oracle_check") cfg.protocol = Protocol::oracle_check;
      else
        detail::config_fail(text, "protocol",
                            "unknown protocol '" + s +
                                "' (expected spectrum, chi_converged, chi_at_T, "
                                "entanglement, or oracle_check)");
    }

    try {
      cfg.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config line 1: ") + e.what());
    }
    return cfg;
  }

  // full validation before any computation starts
  void validate() const {
    if (mu_o.empty()) throw std::invalid_argument("empty mu_o grid");
    if (sizes.empty()) throw std::invalid_argument("empty L grid");
    if (seed_count < 1) throw std::invalid_argument("seeds.count must be >= 1");
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    if (T_fixed < 0) throw std::invalid_argument("T_fixed must be >= 0");
    for (int L : sizes)
      for (double mu : mu_o) CircuitParams::coupled(L, J, mu, bc).validate();
    switch (protocol) {
      case Protocol::spectrum:
      case Protocol::chi_converged: {
        const ConvergencePolicy pol;
        if (max_steps < pol.warmup + pol.window)
          throw std::invalid_argument(
              "max_steps below the convergence warmup plus window");
        break;
      }
      case Protocol::entanglement: {
        for (int L : sizes) {
          if (L % 4 != 0)
            throw std::invalid_argument(
                "entanglement protocol needs L divisible by 4");
          if (max_steps < entanglement_warmup(L) + kEntanglementWindow)
            throw std::invalid_argument(
                "max_steps below the entanglement warmup plus window");
        }
        break;
      }
      case Protocol::oracle_check:
        for (int L : sizes)
          if (L > 4)
            throw std::invalid_argument(
                "oracle_check supports only L <= 4 (exact reference)");
        break;
      case Protocol::chi_at_t:
        break;
    }
    if ((protocol == Protocol::chi_converged || protocol == Protocol::chi_at_t) &&
        bc != Boundary::periodic)
      throw std::invalid_argument("chi protocols require bc = PBC");
  }

  static int entanglement_warmup(int L) { return std::max(2000, 50 * L); }
  static constexpr int kEntanglementWindow = 1000;
};

// residual ceilings for the cross-module equivalence suite
struct OracleTolerances {
  double covariance = 1e-9;
  double born = 1e-10;
  double entropy = 1e-8;
};

namespace detail {

inline int thread_cap() {
  if (const char* env = std::getenv("MAJOLYAP_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return std::min(n, 256);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// index-stealing pool: task order never affects where results land
template <typename F>
void pool_run(int n_tasks, F&& body) {
  const int n_threads = std::min(thread_cap(), n_tasks);
  if (n_threads <= 1) {
    for (int i = 0; i < n_tasks; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t)
    workers.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) body(i);
    });
  for (auto& w : workers) w.join();
}

struct TaskResult {
  std::string row;             // one per-seed CSV line, no trailing newline
  std::vector<double> values;  // aggregate inputs, in column order
  bool ok = false;
  std::string error;
};

struct OracleResiduals {
  double covariance = 0.0;
  double born = 0.0;
  double parity_mismatch = 0.0;
  double entropy = 0.0;
  int covariance_step = -1;
  int born_step = -1;
};

// Gaussian trajectory vs the dense reference along the identical outcome
// stream: per-step covariance and Born-probability residuals, final-state
// entropy residual, and (PBC only) agreement of the det-based invariant sign
// with the many-body parity product.
inline OracleResiduals oracle_residuals(const CircuitParams& p,
                                        std::uint64_t seed) {
  OracleResiduals res;
  const int T = 30;
  const CompiledOps ops(p);
  const exact::ExactCircuit ec(p);
  Rng born(derive_seed(seed, kStreamBorn, 0));
  auto st = CorrelationState::vacuum(p.L);
  auto es = exact::ExactState::vacuum(p.L);
  OutcomeRecord rec;
  const auto bonds = measured_bonds(p);
  for (int t = 0; t < T; ++t) {
    std::vector<double> trace;
    step(st, ops, born, &rec, &trace);
    ec.apply_unitary(es);
    for (std::size_t i = 0; i < bonds.size(); ++i) {
      const double d =
          std::abs(trace[i] - ec.born_probability(es, bonds[i], +1));
      if (d > res.born) {
        res.born = d;
        res.born_step = t;
      }
      ec.apply_outcome(es, bonds[i], rec.steps.back()[i]);
    }
    const double dc =
        (st.covariance() - es.covariance()).cwiseAbs().maxCoeff();
    if (dc > res.covariance) {
      res.covariance = dc;
      res.covariance_step = t;
    }
  }
  std::vector<int> half(static_cast<std::size_t>(p.L / 2));
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = static_cast<int>(i);
  res.entropy = std::abs(subsystem_entropy(st.correlation(), half) -
                         es.entropy_bits(half));

  if (p.bc == Boundary::periodic) {
    const int Tp = 10;
    const auto r = chi(p, seed, ChiMode::fixed_t, Tp);
    const auto rec_p = sample_outcome_record(p, seed, 0, Tp);
    CircuitParams ap = p;
    ap.bc = Boundary::antiperiodic;
    const auto op = exact::effective_parity(p, rec_p);
    const auto oa = exact::effective_parity(ap, twist_ring_outcomes(rec_p));
    if (!op.degenerate && !oa.degenerate)
      res.parity_mismatch = (r.sign() == op.sign * oa.sign) ? 0.0 : 1.0;
  }
  return res;
}

}  // namespace detail

struct SweepResult {
  int exit_code = 0;  // 0 all cells complete, 1 task failures, 3 I/O failure
  std::vector<std::string> errors;
  std::filesystem::path per_seed_csv;
  std::filesystem::path aggregate_csv;
};

inline SweepResult run_sweep(const SweepConfig& cfg,
                             const std::string& outdir_flag = "") {
  cfg.validate();
  SweepResult out;

  std::string outdir = !outdir_flag.empty() ? outdir_flag
                       : !cfg.output_dir.empty() ? cfg.output_dir
                                                 : ".";
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) {
    out.exit_code = 3;
    out.errors.push_back("cannot create output directory " + outdir + ": " +
                         ec.message());
    return out;
  }

  struct Cell {
    int L;
    double mu;
  };
  std::vector<Cell> cells;
  for (int L : cfg.sizes)
    for (double mu : cfg.mu_o) cells.push_back({L, mu});
  const int n_tasks = static_cast<int>(cells.size()) * cfg.seed_count;
  std::vector<detail::TaskResult> results(static_cast<std::size_t>(n_tasks));

  std::string columns;
  std::vector<std::string> value_names;
  switch (cfg.protocol) {
    case Protocol::spectrum:
      columns = "L,J,mu_o,bc,seed,T,converged,z1,z2,z_max,edge_weight,tau_relax";
      value_names = {"z1", "z2", "z_max", "edge_weight", "tau_relax"};
      break;
    case Protocol::chi_converged:
    case Protocol::chi_at_t:
      columns = "L,J,mu_o,seed,T,P_pbc,P_apbc,chi,converged_pbc,converged_apbc,"
                "det_residual";
      value_names = {"chi"};
      break;
    case Protocol::entanglement:
      columns = "L,J,mu_o,bc,seed,T,S_half,I2_quarters,S_topo";
      value_names = {"S_half", "I2_quarters", "S_topo"};
      break;
    case Protocol::oracle_check:
      columns = "L,J,mu_o,bc,seed,cov_residual,born_residual,parity_mismatch,"
                "entropy_residual";
      value_names = {"cov_residual", "born_residual", "parity_mismatch",
                     "entropy_residual"};
      break;
  }

  using detail::fmt_g;
  auto record_path = [&](const Cell& c, std::uint64_t seed) {
    return std::filesystem::path(outdir) /
           ("rec_L" + std::to_string(c.L) + "_mu" + fmt_g(c.mu) + "_seed" +
            std::to_string(seed) + ".rec");
  };

  detail::pool_run(n_tasks, [&](int i) {
    const Cell& c = cells[static_cast<std::size_t>(i) /
                          static_cast<std::size_t>(cfg.seed_count)];
    const std::uint64_t seed =
        cfg.seed_base + static_cast<std::uint64_t>(i % cfg.seed_count);
    detail::TaskResult& slot = results[static_cast<std::size_t>(i)];
    try {
      const auto p = CircuitParams::coupled(c.L, cfg.J, c.mu, cfg.bc);
      std::ostringstream row;
      switch (cfg.protocol) {
        case Protocol::spectrum: {
          ConvergencePolicy pol;
          pol.max_steps = cfg.max_steps;
          const auto run = run_until_converged(p, seed, 0, pol);
          const auto& z = run.spectrum.z;
          row << c.L << ',' << fmt_g(cfg.J) << ',' << fmt_g(c.mu) << ','
              << to_string(cfg.bc) << ',' << seed << ',' << run.spectrum.T
              << ',' << (run.spectrum.converged ? 1 : 0) << ',' << fmt_g(z(0))
              << ',' << fmt_g(z(1)) << ',' << fmt_g(z(z.size() - 1)) << ','
              << fmt_g(run.meta.edge_weight) << ','
              << fmt_g(run.meta.tau_relax);
          slot.values = {z(0), z(1), z(z.size() - 1), run.meta.edge_weight,
                         run.meta.tau_relax};
          if (cfg.write_records)
            save_record(record_path(c, seed).string(), run.record);
          break;
        }
        case Protocol::chi_converged:
        case Protocol::chi_at_t: {
          ConvergencePolicy pol;
          pol.max_steps = cfg.max_steps;
          const bool fixed = cfg.protocol == Protocol::chi_at_t;
          const auto r =
              chi(p, seed, fixed ? ChiMode::fixed_t : ChiMode::converged,
                  cfg.T_fixed, 0, pol);
          row << c.L << ',' << fmt_g(cfg.J) << ',' << fmt_g(c.mu) << ','
              << seed << ',' << r.T << ',' << fmt_g(r.p_pbc) << ','
              << fmt_g(r.p_apbc) << ',' << fmt_g(r.chi) << ','
              << (r.converged_pbc ? 1 : 0) << ',' << (r.converged_apbc ? 1 : 0)
              << ',' << fmt_g(r.det_residual);
          slot.values = {r.chi};
          if (cfg.write_records && fixed)
            save_record(record_path(c, seed).string(),
                        sample_outcome_record(p, seed, 0, r.T));
          break;
        }
        case Protocol::entanglement: {
          const CompiledOps ops(p);
          Rng born(derive_seed(seed, kStreamBorn, 0));
          auto st = CorrelationState::vacuum(c.L);
          OutcomeRecord rec;
          const int warmup = SweepConfig::entanglement_warmup(c.L);
          const int window = SweepConfig::kEntanglementWindow;
          for (int t = 0; t < warmup; ++t)
            step(st, ops, born, cfg.write_records ? &rec : nullptr);
          const auto quarters = Partition::equal_quarters(c.L);
          std::vector<int> half(static_cast<std::size_t>(c.L / 2));
          for (std::size_t k = 0; k < half.size(); ++k)
            half[k] = static_cast<int>(k);
          double s_half = 0.0, i2 = 0.0, s_topo = 0.0;
          for (int t = 0; t < window; ++t) {
            step(st, ops, born, cfg.write_records ? &rec : nullptr);
            const auto& cm = st.correlation();
            s_half += subsystem_entropy(cm, half);
            i2 += mutual_information(cm, quarters.a, quarters.c);
            if (p.bc == Boundary::open)
              s_topo += topological_entanglement_entropy(cm, quarters);
          }
          s_half /= window;
          i2 /= window;
          s_topo = (p.bc == Boundary::open)
                       ? s_topo / window
                       : std::numeric_limits<double>::quiet_NaN();
          row << c.L << ',' << fmt_g(cfg.J) << ',' << fmt_g(c.mu) << ','
              << to_string(cfg.bc) << ',' << seed << ',' << (warmup + window)
              << ',' << fmt_g(s_half) << ',' << fmt_g(i2) << ','
              << fmt_g(s_topo);
          slot.values = {s_half, i2, s_topo};
          if (cfg.write_records)
            save_record(record_path(c, seed).string(), rec);
          break;
        }
        case Protocol::oracle_check: {
          const auto res = detail::oracle_residuals(p, seed);
          row << c.L << ',' << fmt_g(cfg.J) << ',' << fmt_g(c.mu) << ','
              << to_string(cfg.bc) << ',' << seed << ','
              << fmt_g(res.covariance) << ',' << fmt_g(res.born) << ','
              << fmt_g(res.parity_mismatch) << ',' << fmt_g(res.entropy);
          slot.values = {res.covariance, res.born, res.parity_mismatch,
                         res.entropy};
          break;
        }
      }
      slot.row = row.str();
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.ok = false;
      slot.error = "cell L=" + std::to_string(c.L) + " mu_o=" + fmt_g(c.mu) +
                   " seed=" + std::to_string(seed) + ": " + e.what();
    }
  });

  out.per_seed_csv = std::filesystem::path(outdir) /
                     (std::string(to_string(cfg.protocol)) + "_per_seed.csv");
  out.aggregate_csv = std::filesystem::path(outdir) /
                      (std::string(to_string(cfg.protocol)) + "_aggregate.csv");

  std::ofstream ps(out.per_seed_csv);
  ps << kCsvHeaderTag << " protocol=" << to_string(cfg.protocol) << '\n'
     << columns << '\n';
  for (const auto& r : results)
    if (r.ok) ps << r.row << '\n';
  ps.close();
  if (!ps) {
    out.exit_code = 3;
    out.errors.push_back("write failed: " + out.per_seed_csv.string());
    return out;
  }

  std::ofstream agg(out.aggregate_csv);
  agg << kCsvHeaderTag << " protocol=" << to_string(cfg.protocol)
      << " aggregate\nL,J,mu_o,bc,n";
  for (const auto& name : value_names) agg << ',' << name << "_mean," << name << "_se";
  agg << '\n';
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    int n = 0;
    std::vector<double> sum(value_names.size(), 0.0);
    std::vector<double> sumsq(value_names.size(), 0.0);
    for (int k = 0; k < cfg.seed_count; ++k) {
      const auto& r = results[ci * static_cast<std::size_t>(cfg.seed_count) +
                              static_cast<std::size_t>(k)];
      if (!r.ok) continue;
      ++n;
      for (std::size_t v = 0; v < sum.size(); ++v) {
        sum[v] += r.values[v];
        sumsq[v] += r.values[v] * r.values[v];
      }
    }
    agg << cells[ci].L << ',' << fmt_g(cfg.J) << ',' << fmt_g(cells[ci].mu)
        << ',' << to_string(cfg.bc) << ',' << n;
    for (std::size_t v = 0; v < sum.size(); ++v) {
      const double mean = n ? sum[v] / n : std::numeric_limits<double>::quiet_NaN();
      double se = std::numeric_limits<double>::quiet_NaN();
      if (n >= 2) {
        const double ss = std::max(0.0, sumsq[v] - n * mean * mean);
        se = std::sqrt(ss / (n - 1) / n);
      }
      agg << ',' << fmt_g(mean) << ',' << fmt_g(se);
    }
    agg << '\n';
  }
  agg.close();
  if (!agg) {
    out.exit_code = 3;
    out.errors.push_back("write failed: " + out.aggregate_csv.string());
    return out;
  }

  for (const auto& r : results)
    if (!r.ok) out.errors.push_back(r.error);
  out.exit_code = out.errors.empty() ? 0 : 1;
  return out;
}

// built-in grid for `majolyap oracle-check` without a config file
inline SweepConfig oracle_default_config() {
  SweepConfig cfg;
  cfg.mu_o = {0.1, 0.5, 0.9};
  cfg.sizes = {2, 3, 4};
  cfg.J = 0.5;
  cfg.bc = Boundary::periodic;
  cfg.seed_base = 1;
  cfg.seed_count = 2;
  cfg.protocol = Protocol::oracle_check;
  return cfg;
}

// cross-module equivalence report; returns the process exit code (0 pass,
// 1 any residual above its ceiling)
inline int run_oracle_check(const SweepConfig& cfg, std::ostream& out,
                            const OracleTolerances& tol = {}) {
  SweepConfig c = cfg;
  c.protocol = Protocol::oracle_check;
  c.validate();

  struct Worst {
    double value = 0.0;
    int L = 0;
    double mu = 0.0;
    std::uint64_t seed = 0;
    int step = -1;
  };
  Worst cov, born, parity, entropy;
  auto bump = [](Worst& w, double v, int L, double mu, std::uint64_t seed,
                 int step) {
    if (v > w.value) w = {v, L, mu, seed, step};
  };

  struct Cell {
    int L;
    double mu;
  };
  std::vector<Cell> cells;
  for (int L : c.sizes)
    for (double mu : c.mu_o) cells.push_back({L, mu});
  const int n_tasks = static_cast<int>(cells.size()) * c.seed_count;
  std::vector<detail::OracleResiduals> all(static_cast<std::size_t>(n_tasks));
  std::vector<std::string> failures(static_cast<std::size_t>(n_tasks));

  detail::pool_run(n_tasks, [&](int i) {
    const Cell& cell = cells[static_cast<std::size_t>(i) /
                             static_cast<std::size_t>(c.seed_count)];
    const std::uint64_t seed =
        c.seed_base + static_cast<std::uint64_t>(i % c.seed_count);
    try {
      all[static_cast<std::size_t>(i)] = detail::oracle_residuals(
          CircuitParams::coupled(cell.L, c.J, cell.mu, c.bc), seed);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(i)] =
          "cell L=" + std::to_string(cell.L) + " mu_o=" + detail::fmt_g(cell.mu) +
          " seed=" + std::to_string(seed) + ": " + e.what();
    }
  });

  bool task_failed = false;
  for (int i = 0; i < n_tasks; ++i) {
    if (!failures[static_cast<std::size_t>(i)].empty()) {
      out << "ERROR " << failures[static_cast<std::size_t>(i)] << '\n';
      task_failed = true;
      continue;
    }
    const Cell& cell = cells[static_cast<std::size_t>(i) /
                             static_cast<std::size_t>(c.seed_count)];
    const std::uint64_t seed =
        c.seed_base + static_cast<std::uint64_t>(i % c.seed_count);
    const auto& r = all[static_cast<std::size_t>(i)];
    bump(cov, r.covariance, cell.L, cell.mu, seed, r.covariance_step);
    bump(born, r.born, cell.L, cell.mu, seed, r.born_step);
    bump(parity, r.parity_mismatch, cell.L, cell.mu, seed, -1);
    bump(entropy, r.entropy, cell.L, cell.mu, seed, -1);
  }

  auto report = [&](const char* name, const Worst& w, double ceiling) {
    const bool pass = w.value <= ceiling;
    out << name << " max residual = " << detail::fmt_g(w.value) << " (L=" << w.L
        << ", mu_o=" << detail::fmt_g(w.mu) << ", seed=" << w.seed;
    if (w.step >= 0) out << ", step=" << w.step;
    out << ") tolerance " << detail::fmt_g(ceiling) << " : "
        << (pass ? "PASS" : "FAIL") << '\n';
    return pass;
  };
  bool ok = !task_failed;
  ok &= report("covariance", cov, tol.covariance);
  ok &= report("born", born, tol.born);
  ok &= report("parity", parity, 0.5);
  ok &= report("entropy", entropy, tol.entropy);
  out << (ok ? "oracle check PASS" : "oracle check FAIL") << '\n';
  return ok ? 0 : 1;
}

}  // namespace majolyap
