#pragma once

// Entanglement diagnostics of a Gaussian trajectory state, computed from the
// correlation matrix C = <phi phi^dag>. Restricting C to the doubled index
// set [x, L+x] of a site subset keeps the particle-hole structure, so the
// restricted spectrum pairs as {lambda, 1-lambda} and the von Neumann entropy
// of the reduced state is the binary entropy summed over pairs. Entropies
// are in bits throughout.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace majolyap {

// Site blocks labeled a..d. Entropy calls accept arbitrary site sets; the
// equal-quarter helper builds the default grid used by the sweep protocols.
struct Partition {
  std::vector<int> a, b, c, d;

  static Partition equal_quarters(int L) {
    if (L < 4 || L % 4 != 0)
      throw std::invalid_argument(
          "equal_quarters: L must be a positive multiple of 4");
    Partition p;
    const int q = L / 4;
    for (int j = 0; j < q; ++j) {
      p.a.push_back(j);
      p.b.push_back(q + j);
      p.c.push_back(2 * q + j);
      p.d.push_back(3 * q + j);
    }
    return p;
  }
};

namespace detail {

inline std::vector<int> checked_sites(const Eigen::MatrixXcd& c,
                                      const std::vector<int>& sites,
                                      const char* who) {
  if (c.rows() != c.cols() || c.rows() < 2 || c.rows() % 2 != 0)
    throw std::invalid_argument(std::string(who) +
                                ": correlation matrix must be 2L x 2L");
  const int L = static_cast<int>(c.rows()) / 2;
  if (sites.empty())
    throw std::invalid_argument(std::string(who) + ": empty site set");
  std::vector<int> x = sites;
  std::sort(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= L)
      throw std::invalid_argument(std::string(who) + ": site out of range");
    if (i > 0 && x[i] == x[i - 1])
      throw std::invalid_argument(std::string(who) + ": repeated site");
  }
  return x;
}

inline std::vector<int> merged_disjoint(const std::vector<int>& a,
                                        const std::vector<int>& b,
                                        const char* who) {
  std::vector<int> u;
  u.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  for (std::size_t i = 1; i < u.size(); ++i)
    if (u[i] == u[i - 1])
      throw std::invalid_argument(std::string(who) +
                                  ": subsystems must be disjoint");
  return u;
}

}  // namespace detail

// ascending spectrum of the restricted correlation matrix on [x, L+x]
inline Eigen::VectorXd subsystem_spectrum(const Eigen::MatrixXcd& c,
                                          const std::vector<int>& sites) {
  const std::vector<int> x =
      detail::checked_sites(c, sites, "subsystem_spectrum");
  const int L = static_cast<int>(c.rows()) / 2;
  const int k = static_cast<int>(x.size());
  Eigen::MatrixXcd sub(2 * k, 2 * k);
  for (int i = 0; i < 2 * k; ++i) {
    const int ri = (i < k) ? x[i] : L + x[i - k];
    for (int j = 0; j < 2 * k; ++j)
      sub(i, j) = c(ri, (j < k) ? x[j] : L + x[j - k]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("subsystem_spectrum: eigensolver failed");
  return es.eigenvalues();
}

// von Neumann entropy (bits) of the reduced state on the given sites. The
// particle-hole pairing makes the full-spectrum binary-entropy sum count
// every pair exactly twice, so halving it tolerates the numerical splitting
// of a pair without any explicit matching.
inline double subsystem_entropy(const Eigen::MatrixXcd& c,
                                const std::vector<int>& sites) {
  const Eigen::VectorXd lam = subsystem_spectrum(c, sites);
  constexpr double eps = 1e-12;
  double s = 0.0;
  for (int i = 0; i < lam.size(); ++i) {
    const double l = std::clamp(lam(i), eps, 1.0 - eps);
    s -= l * std::log2(l) + (1.0 - l) * std::log2(1.0 - l);
  }
  return 0.5 * s;
}

inline double mutual_information(const Eigen::MatrixXcd& c,
                                 const std::vector<int>& a,
                                 const std::vector<int>& b) {
  const std::vector<int> sa = detail::checked_sites(c, a, "mutual_information");
  const std::vector<int> sb = detail::checked_sites(c, b, "mutual_information");
  const std::vector<int> u =
      detail::merged_disjoint(sa, sb, "mutual_information");
  return subsystem_entropy(c, sa) + subsystem_entropy(c, sb) -
         subsystem_entropy(c, u);
}

// S_AB + S_BC - S_B - S_ABC on three adjacent contiguous segments. Strong
// subadditivity makes this non-negative up to roundoff.
inline double topological_entanglement_entropy(const Eigen::MatrixXcd& c,
                                               const Partition& part) {
  const char* who = "topological_entanglement_entropy";
  const std::vector<int> sa = detail::checked_sites(c, part.a, who);
  const std::vector<int> sb = detail::checked_sites(c, part.b, who);
  const std::vector<int> sc = detail::checked_sites(c, part.c, who);
  for (const auto* seg : {&sa, &sb, &sc})
    for (std::size_t i = 1; i < seg->size(); ++i)
      if ((*seg)[i] != (*seg)[i - 1] + 1)
        throw std::invalid_argument(std::string(who) +
                                    ": segments must be contiguous");
  if (sb.front() != sa.back() + 1 || sc.front() != sb.back() + 1)
    throw std::invalid_argument(std::string(who) +
                                ": segments must be adjacent in order A,B,C");
  const std::vector<int> ab = detail::merged_disjoint(sa, sb, who);
  const std::vector<int> bc = detail::merged_disjoint(sb, sc, who);
  const std::vector<int> abc = detail::merged_disjoint(ab, sc, who);
  return subsystem_entropy(c, ab) + subsystem_entropy(c, bc) -
         subsystem_entropy(c, sb) - subsystem_entropy(c, abc);
}

}  // namespace majolyap
