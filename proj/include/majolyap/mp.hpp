#pragma once

// Minimal multiprecision layer over MPFR: a RAII real type with thread-local
// default precision, a complex pair, small dense matrices, and a cyclic
// Jacobi eigensolver for real symmetric matrices.
//
// This exists because the transfer-matrix product K_T of a monitored circuit
// has singular values spanning exp(+-2 T z_max); at T = 20 and typical
// measurement strengths that is far beyond the 2^53 range where double
// eigensolvers can resolve anything below the top of the spectrum. Complex
// matrices are handled through the real embedding
//   R(M) = [[Re M, -Im M], [Im M, Re M]],
// a ring homomorphism with R(M^dag) = R(M)^T, which doubles every eigenvalue
// and keeps the whole eigenproblem real.

#include <mpfr.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace majolyap::mp {

class MpReal {
 public:
  static mpfr_prec_t& default_precision() {
    static thread_local mpfr_prec_t prec = 256;
    return prec;
  }

  MpReal() {
    mpfr_init2(v_, default_precision());
    mpfr_set_zero(v_, 1);
  }
  explicit MpReal(double d) {
    mpfr_init2(v_, default_precision());
    mpfr_set_d(v_, d, MPFR_RNDN);
  }
  MpReal(const MpReal& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  MpReal(MpReal&& o) noexcept {
    mpfr_init2(v_, 2);  // cheap shell, immediately swapped away
    mpfr_swap(v_, o.v_);
  }
  MpReal& operator=(const MpReal& o) {
    if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
  }
  MpReal& operator=(MpReal&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  MpReal& operator=(double d) {
    mpfr_set_d(v_, d, MPFR_RNDN);
    return *this;
  }
  ~MpReal() { mpfr_clear(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  int sign() const { return mpfr_sgn(v_); }

  MpReal& operator+=(const MpReal& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  MpReal& operator-=(const MpReal& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  MpReal& operator*=(const MpReal& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  MpReal& operator/=(const MpReal& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

  friend MpReal operator+(MpReal a, const MpReal& b) { a += b; return a; }
  friend MpReal operator-(MpReal a, const MpReal& b) { a -= b; return a; }
  friend MpReal operator*(MpReal a, const MpReal& b) { a *= b; return a; }
  friend MpReal operator/(MpReal a, const MpReal& b) { a /= b; return a; }
  friend MpReal operator-(MpReal a) {
    mpfr_neg(a.v_, a.v_, MPFR_RNDN);
    return a;
  }

  friend bool operator<(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator>(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator<=(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator==(const MpReal& a, const MpReal& b) { return mpfr_cmp(a.v_, b.v_) == 0; }

  friend MpReal sqrt(const MpReal& a) {
    MpReal r;
    mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend MpReal log(const MpReal& a) {
    MpReal r;
    mpfr_log(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend MpReal exp(const MpReal& a) {
    MpReal r;
    mpfr_exp(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend MpReal abs(const MpReal& a) {
    MpReal r;
    mpfr_abs(r.v_, a.v_, MPFR_RNDN);
    return r;
  }

  // acc += a * b without temporaries (the hot path of every matrix product)
  friend void fma_acc(MpReal& acc, const MpReal& a, const MpReal& b) {
    mpfr_fma(acc.v_, a.v_, b.v_, acc.v_, MPFR_RNDN);
  }
 private:
  mpfr_t v_;
};

struct PrecisionGuard {
  explicit PrecisionGuard(mpfr_prec_t bits) : old_(MpReal::default_precision()) {
    if (bits < 64 || bits > (1 << 22))
      throw std::invalid_argument("PrecisionGuard: unreasonable precision");
    MpReal::default_precision() = bits;
  }
  ~PrecisionGuard() { MpReal::default_precision() = old_; }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  mpfr_prec_t old_;
};

struct MpComplex {
  MpReal re, im;

  MpComplex() = default;
  explicit MpComplex(std::complex<double> z) : re(z.real()), im(z.imag()) {}

  std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }

  friend MpComplex operator+(const MpComplex& a, const MpComplex& b) {
    MpComplex r;
    r.re = a.re + b.re;
    r.im = a.im + b.im;
    return r;
  }
  friend MpComplex operator-(const MpComplex& a, const MpComplex& b) {
    MpComplex r;
    r.re = a.re - b.re;
    r.im = a.im - b.im;
    return r;
  }
  friend MpComplex operator*(const MpComplex& a, const MpComplex& b) {
    MpComplex r;
    r.re = a.re * b.re - a.im * b.im;
    r.im = a.re * b.im + a.im * b.re;
    return r;
  }
  MpComplex conj() const {
    MpComplex r;
    r.re = re;
    r.im = -im;
    return r;
  }
  MpReal norm2() const { return re * re + im * im; }
};

// --- dense real matrices -------------------------------------------------------

class MpMatrix {
 public:
  MpMatrix() = default;
  MpMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static MpMatrix identity(int n) {
    MpMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static MpMatrix from_double(const Eigen::MatrixXd& d) {
    MpMatrix m(static_cast<int>(d.rows()), static_cast<int>(d.cols()));
    for (int i = 0; i < m.rows_; ++i)
      for (int j = 0; j < m.cols_; ++j) m(i, j) = d(i, j);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  MpReal& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const MpReal& operator()(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * cols_ + j];
  }

  Eigen::MatrixXd to_double() const {
    Eigen::MatrixXd d(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) d(i, j) = (*this)(i, j).to_double();
    return d;
  }

  friend MpMatrix operator*(const MpMatrix& a, const MpMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("MpMatrix: shape mismatch");
    MpMatrix r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const MpReal& aik = a(i, k);
        for (int j = 0; j < b.cols_; ++j) fma_acc(r(i, j), aik, b(k, j));
      }
    return r;
  }

  MpMatrix transpose() const {
    MpMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<MpReal> a_;
};

// real embedding of a complex matrix; R(A B) = R(A) R(B), R(A^dag) = R(A)^T
inline Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& m) {
  const Eigen::Index r = m.rows(), c = m.cols();
  Eigen::MatrixXd e(2 * r, 2 * c);
  e.topLeftCorner(r, c) = m.real();
  e.topRightCorner(r, c) = -m.imag();
  e.bottomLeftCorner(r, c) = m.imag();
  e.bottomRightCorner(r, c) = m.real();
  return e;
}

inline Eigen::MatrixXcd from_real_embedding(const Eigen::MatrixXd& e) {
  const Eigen::Index r = e.rows() / 2, c = e.cols() / 2;
  Eigen::MatrixXcd m(r, c);
  m.real() = e.topLeftCorner(r, c);
  m.imag() = e.bottomLeftCorner(r, c);
  return m;
}

// --- Jacobi eigensolver -----------------------------------------------------------

// Cyclic Jacobi on a real symmetric matrix held in MPFR. A is destroyed; on
// return eigenvalues holds the (unsorted) diagonal and V the orthonormal
// eigenvectors as columns. Quadratic convergence makes ~15 sweeps plenty even
// at thousands of bits.
inline void jacobi_eigh(MpMatrix& a, std::vector<MpReal>& eigenvalues, MpMatrix& v,
                        int max_sweeps = 60) {
  const int n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi_eigh: matrix not square");
  v = MpMatrix::identity(n);
  MpReal frob;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) fma_acc(frob, a(i, j), a(i, j));
  frob = sqrt(frob);
  // stop once the off-diagonal mass is negligible at working precision
  MpReal stop = frob;
  {
    MpReal scale(std::pow(2.0, -32));
    for (mpfr_prec_t left = MpReal::default_precision(); left > 32; left -= 32)
      stop *= scale;
  }
  const MpReal one(1.0), two(2.0);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    MpReal off;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) fma_acc(off, a(p, q), a(p, q));
    off = sqrt(off);
    if (off <= stop) {
      eigenvalues.assign(n, MpReal());
      for (int i = 0; i < n; ++i) eigenvalues[i] = a(i, i);
      return;
    }
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q).sign() == 0) continue;
        // rotation angle from tau = (a_qq - a_pp) / (2 a_pq)
        const MpReal tau = (a(q, q) - a(p, p)) / (two * a(p, q));
        MpReal t = one / (abs(tau) + sqrt(one + tau * tau));
        if (tau.sign() < 0) t = -t;
        const MpReal c = one / sqrt(one + t * t);
        const MpReal s = t * c;
        // A <- J^T A J, touching rows/cols p and q
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const MpReal akp = a(k, p);
          const MpReal akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
          a(p, k) = a(k, p);
          a(q, k) = a(k, q);
        }
        const MpReal app = a(p, p), aqq = a(q, q), apq = a(p, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = MpReal();
        a(q, p) = MpReal();
        for (int k = 0; k < n; ++k) {
          const MpReal vkp = v(k, p);
          const MpReal vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  throw std::runtime_error("jacobi_eigh: no convergence; raise the precision");
}

// --- complex modified Gram-Schmidt ---------------------------------------------

// Orthonormalizes the columns of a (rows x cols) complex matrix stored as
// MpComplex, with one reorthogonalization pass, and returns log R_jj under
// the positive-diagonal convention. Only the logs are needed by callers.
inline std::vector<MpReal> gram_schmidt_log_diag(std::vector<std::vector<MpComplex>>& cols) {
  const std::size_t k = cols.size();
  std::vector<MpReal> logs(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto& col = cols[j];
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        // proj = <q_i, col>
        MpComplex proj;
        for (std::size_t r = 0; r < col.size(); ++r) {
          const MpComplex term = cols[i][r].conj() * col[r];
          proj.re += term.re;
          proj.im += term.im;
        }
        for (std::size_t r = 0; r < col.size(); ++r) {
          const MpComplex sub = proj * cols[i][r];
          col[r].re -= sub.re;
          col[r].im -= sub.im;
        }
      }
    }
    MpReal nrm2;
    for (std::size_t r = 0; r < col.size(); ++r) {
      fma_acc(nrm2, col[r].re, col[r].re);
      fma_acc(nrm2, col[r].im, col[r].im);
    }
    if (nrm2.sign() <= 0)
      throw std::runtime_error("gram_schmidt_log_diag: rank-deficient input");
    const MpReal nrm = sqrt(nrm2);
    logs[j] = log(nrm);
    const MpReal inv = MpReal(1.0) / nrm;
    for (std::size_t r = 0; r < col.size(); ++r) {
      col[r].re *= inv;
      col[r].im *= inv;
    }
  }
  return logs;
}

}  // namespace majolyap::mp
