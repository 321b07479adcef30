#pragma once

// Pure fermionic Gaussian states, stored as the 2L x L isometry U whose
// columns span the annihilator space (d = U^dag phi kill the state). All
// circuit operations act on U from the left followed by a thin QR, so the
// columns stay orthonormal and the induced correlation matrix C = U U^dag is
// always an exact projector up to roundoff.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "majolyap/basis.hpp"

namespace majolyap {

class GaussianPureState {
 public:
  static GaussianPureState vacuum(int L) {
    if (L < 1) throw std::invalid_argument("vacuum: L must be >= 1");
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * L, L);
    u.topRows(L) = Eigen::MatrixXcd::Identity(L, L);
    return GaussianPureState(L, std::move(u));
  }

  static GaussianPureState from_isometry(Eigen::MatrixXcd u, double tol = 1e-10) {
    if (u.rows() != 2 * u.cols() || u.cols() < 1)
      throw std::invalid_argument("from_isometry: expected a 2L x L matrix");
    const int L = static_cast<int>(u.cols());
    GaussianPureState s(L, std::move(u));
    if (s.orthonormality_residual() > tol)
      throw std::invalid_argument("from_isometry: columns are not orthonormal");
    return s;
  }

  int sites() const { return L_; }
  const Eigen::MatrixXcd& isometry() const { return U_; }
  Eigen::MatrixXcd& isometry() { return U_; }

  // C = <phi phi^dag>; blocks [[G, F], [-F*, 1 - G^T]] with G_ij = <c_i c_j^dag>,
  // F_ij = <c_i c_j>.
  Eigen::MatrixXcd correlation() const { return U_ * U_.adjoint(); }

  Eigen::MatrixXd covariance() const {
    return correlation_to_covariance(correlation());
  }

  // single correlation entry C_ab = row_a(U) . conj(row_b(U)); O(L) and avoids
  // building the full matrix in sampling loops
  cxd correlation_entry(int a, int b) const {
    // Eigen's dot conjugates the calling vector, so C_ab = row_b.dot(row_a)
    return U_.row(b).dot(U_.row(a));
  }

  double orthonormality_residual() const {
    return (U_.adjoint() * U_ -
            Eigen::MatrixXcd::Identity(L_, L_)).cwiseAbs().maxCoeff();
  }

  void reorthonormalize() { orthonormalize_columns(U_); }

 private:
  GaussianPureState(int L, Eigen::MatrixXcd u) : L_(L), U_(std::move(u)) {}

  int L_;
  Eigen::MatrixXcd U_;
};

// --- binary snapshot format -------------------------------------------------
// 8-byte magic "MAJOLYAP", u32 version (=1), u32 L, then the isometry row by
// row as (re, im) pairs of IEEE doubles. All integers and doubles little-endian.

namespace detail {

inline constexpr char kStateMagic[8] = {'M', 'A', 'J', 'O', 'L', 'Y', 'A', 'P'};
inline constexpr std::uint32_t kStateVersion = 1;

inline void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void put_f64_le(std::string& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

inline double get_f64_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

}  // namespace detail

inline std::string serialize_state(const GaussianPureState& state) {
  std::string out;
  const int L = state.sites();
  out.reserve(16 + static_cast<std::size_t>(2 * L) * L * 16);
  out.append(detail::kStateMagic, 8);
  detail::put_u32_le(out, detail::kStateVersion);
  detail::put_u32_le(out, static_cast<std::uint32_t>(L));
  const Eigen::MatrixXcd& u = state.isometry();
  for (int r = 0; r < 2 * L; ++r)
    for (int c = 0; c < L; ++c) {
      detail::put_f64_le(out, u(r, c).real());
      detail::put_f64_le(out, u(r, c).imag());
    }
  return out;
}

inline GaussianPureState deserialize_state(const std::string& buf) {
  if (buf.size() < 16 || std::memcmp(buf.data(), detail::kStateMagic, 8) != 0)
    throw std::runtime_error("deserialize_state: bad magic");
  const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
  const std::uint32_t version = detail::get_u32_le(p + 8);
  if (version != detail::kStateVersion)
    throw std::runtime_error("deserialize_state: unsupported version " +
                             std::to_string(version));
  const std::uint32_t L = detail::get_u32_le(p + 12);
  const std::size_t need = 16 + static_cast<std::size_t>(2 * L) * L * 16;
  if (L < 1 || buf.size() != need)
    throw std::runtime_error("deserialize_state: truncated or oversized payload");
  Eigen::MatrixXcd u(2 * L, L);
  std::size_t off = 16;
  for (std::uint32_t r = 0; r < 2 * L; ++r)
    for (std::uint32_t c = 0; c < L; ++c) {
      const double re = detail::get_f64_le(p + off);
      const double im = detail::get_f64_le(p + off + 8);
      u(r, c) = cxd(re, im);
      off += 16;
    }
  return GaussianPureState::from_isometry(std::move(u), 1e-8);
}

inline void save_state(const std::string& path, const GaussianPureState& state) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("save_state: cannot open " + path);
  const std::string buf = serialize_state(state);
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw std::runtime_error("save_state: write failed for " + path);
}

inline GaussianPureState load_state(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_state: cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());
  return deserialize_state(buf);
}

}  // namespace majolyap
