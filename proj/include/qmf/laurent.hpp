#ifndef QMF_LAURENT_HPP_
#define QMF_LAURENT_HPP_

// Scalar and matrix Laurent polynomials on the unit circle.
//
// A LaurentPoly stores m(z) = sum_k c[k] z^(min_deg + k). Values are kept in
// canonical form: end coefficients with modulus below kCoeffEpsilon are
// stripped, and the zero polynomial has no coefficients at all. Matrix
// polynomials share one exponent range across all entries.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmf/errors.hpp"

namespace qmf {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kCoeffEpsilon = 1e-14;
inline constexpr int kDefaultGrid = 1024;
inline constexpr double kDefaultTol = 1e-9;

/// Point k of an equispaced grid of size n on the torus, z = exp(2 pi i k/n).
inline cplx torus_point(int k, int n) {
  return std::polar(1.0, 2.0 * std::numbers::pi * k / n);
}

/// z = exp(-i t), the angle convention used for filters as functions of t.
inline cplx at_angle(double t) { return std::polar(1.0, -t); }

class LaurentPoly {
 public:
  LaurentPoly() = default;

  LaurentPoly(int min_deg, std::vector<cplx> coeffs)
      : min_deg_(min_deg), coeffs_(std::move(coeffs)) {
    canonicalize(kCoeffEpsilon);
  }

  static LaurentPoly constant(cplx c) { return LaurentPoly(0, {c}); }
  static LaurentPoly monomial(cplx c, int degree) { return LaurentPoly(degree, {c}); }

  /// Real coefficients starting at exponent min_deg.
  static LaurentPoly from_real(int min_deg, std::span<const double> coeffs) {
    return LaurentPoly(min_deg, std::vector<cplx>(coeffs.begin(), coeffs.end()));
  }

  bool is_zero() const { return coeffs_.empty(); }
  int min_deg() const { return min_deg_; }
  int max_deg() const { return min_deg_ + static_cast<int>(coeffs_.size()) - 1; }
  /// max_deg - min_deg; -1 for the zero polynomial.
  int span_width() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<const cplx> coeffs() const { return coeffs_; }

  /// Coefficient of z^exponent (zero outside the stored range).
  cplx operator[](int exponent) const {
    const int k = exponent - min_deg_;
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return {};
    return coeffs_[static_cast<std::size_t>(k)];
  }

  bool is_monomial() const { return coeffs_.size() == 1; }

  cplx operator()(cplx z) const {
    if (coeffs_.empty()) return {};
    cplx acc{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return min_deg_ == 0 ? acc : acc * std::pow(z, min_deg_);
  }

  /// p*(z) = sum conj(c_k) z^-k; equals conj(p(z)) on the torus.
  LaurentPoly adjoint() const {
    std::vector<cplx> out(coeffs_.rbegin(), coeffs_.rend());
    for (auto& c : out) c = std::conj(c);
    return LaurentPoly(-max_deg(), std::move(out));
  }

  /// p(z^n).
  LaurentPoly dilate(int n) const {
    if (is_zero()) return {};
    std::vector<cplx> out((coeffs_.size() - 1) * static_cast<std::size_t>(n) + 1);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) out[k * static_cast<std::size_t>(n)] = coeffs_[k];
    return LaurentPoly(min_deg_ * n, std::move(out));
  }

  /// z^k p(z).
  LaurentPoly shifted(int k) const {
    LaurentPoly out = *this;
    if (!out.is_zero()) out.min_deg_ += k;
    return out;
  }

  /// Copy with end coefficients below tol stripped.
  LaurentPoly trimmed(double tol) const {
    LaurentPoly out = *this;
    out.canonicalize(tol);
    return out;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  LaurentPoly& operator+=(const LaurentPoly& q) { return *this = *this + q; }
  LaurentPoly& operator-=(const LaurentPoly& q) { return *this = *this - q; }
  LaurentPoly& operator*=(const LaurentPoly& q) { return *this = *this * q; }

  friend LaurentPoly operator+(const LaurentPoly& p, const LaurentPoly& q) {
    if (p.is_zero()) return q;
    if (q.is_zero()) return p;
    const int lo = std::min(p.min_deg(), q.min_deg());
    const int hi = std::max(p.max_deg(), q.max_deg());
    std::vector<cplx> out(static_cast<std::size_t>(hi - lo + 1));
    for (int e = lo; e <= hi; ++e) out[static_cast<std::size_t>(e - lo)] = p[e] + q[e];
    return LaurentPoly(lo, std::move(out));
  }

  friend LaurentPoly operator-(const LaurentPoly& p) { return p * cplx(-1.0); }
  friend LaurentPoly operator-(const LaurentPoly& p, const LaurentPoly& q) { return p + (-q); }

  friend LaurentPoly operator*(const LaurentPoly& p, const LaurentPoly& q) {
    if (p.is_zero() || q.is_zero()) return {};
    std::vector<cplx> out(p.size() + q.size() - 1);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p.coeffs_[i] * q.coeffs_[j];
    return LaurentPoly(p.min_deg() + q.min_deg(), std::move(out));
  }

  friend LaurentPoly operator*(const LaurentPoly& p, cplx s) {
    std::vector<cplx> out = p.coeffs_;
    for (auto& c : out) c *= s;
    return LaurentPoly(p.min_deg_, std::move(out));
  }
  friend LaurentPoly operator*(cplx s, const LaurentPoly& p) { return p * s; }

  /// Coefficient-exact comparison.
  friend bool operator==(const LaurentPoly& p, const LaurentPoly& q) {
    if (p.is_zero() || q.is_zero()) return p.is_zero() && q.is_zero();
    return p.min_deg_ == q.min_deg_ && p.coeffs_ == q.coeffs_;
  }

 private:
  void canonicalize(double tol) {
    auto first = std::find_if(coeffs_.begin(), coeffs_.end(),
                              [tol](cplx c) { return std::abs(c) >= tol; });
    if (first == coeffs_.end()) {
      coeffs_.clear();
      min_deg_ = 0;
      return;
    }
    auto last = std::find_if(coeffs_.rbegin(), coeffs_.rend(),
                             [tol](cplx c) { return std::abs(c) >= tol; });
    coeffs_.erase(last.base(), coeffs_.end());
    min_deg_ += static_cast<int>(first - coeffs_.begin());
    coeffs_.erase(coeffs_.begin(), first);
  }

  int min_deg_ = 0;
  std::vector<cplx> coeffs_;
};

/// max_k |p_k - q_k| over all exponents.
inline double max_coeff_diff(const LaurentPoly& p, const LaurentPoly& q) {
  return (p - q).trimmed(0.0).max_abs_coeff();
}

/// n x n matrix of Laurent polynomials, stored as A(z) = sum_k A_k z^(min_deg+k).
class MatLaurentPoly {
 public:
  MatLaurentPoly() = default;

  MatLaurentPoly(int n, int min_deg, std::vector<CMatrix> coeffs)
      : n_(n), min_deg_(min_deg), coeffs_(std::move(coeffs)) {
    for (const auto& c : coeffs_)
      if (c.rows() != n_ || c.cols() != n_)
        throw InvalidOperand("coefficient matrix is " + std::to_string(c.rows()) + "x" +
                             std::to_string(c.cols()) + ", expected " + std::to_string(n_) +
                             "x" + std::to_string(n_));
    canonicalize();
  }

  static MatLaurentPoly constant(const CMatrix& m) {
    if (m.rows() != m.cols()) throw InvalidOperand("constant matrix must be square");
    return MatLaurentPoly(static_cast<int>(m.rows()), 0, {m});
  }

  static MatLaurentPoly identity(int n) { return constant(CMatrix::Identity(n, n)); }

  /// Assemble from an n x n grid of scalar entries (row-major).
  static MatLaurentPoly from_entries(int n, const std::vector<LaurentPoly>& entries) {
    if (entries.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
      throw InvalidOperand("expected " + std::to_string(n * n) + " entries");
    int lo = 0, hi = -1;
    bool any = false;
    for (const auto& e : entries) {
      if (e.is_zero()) continue;
      lo = any ? std::min(lo, e.min_deg()) : e.min_deg();
      hi = any ? std::max(hi, e.max_deg()) : e.max_deg();
      any = true;
    }
    if (!any) return MatLaurentPoly(n, 0, {});
    std::vector<CMatrix> coeffs(static_cast<std::size_t>(hi - lo + 1), CMatrix::Zero(n, n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const auto& e = entries[static_cast<std::size_t>(i * n + j)];
        for (int d = lo; d <= hi; ++d) coeffs[static_cast<std::size_t>(d - lo)](i, j) = e[d];
      }
    return MatLaurentPoly(n, lo, std::move(coeffs));
  }

  int dim() const { return n_; }
  bool is_zero() const { return coeffs_.empty(); }
  int min_deg() const { return min_deg_; }
  int max_deg() const { return min_deg_ + static_cast<int>(coeffs_.size()) - 1; }
  std::span<const CMatrix> coeffs() const { return coeffs_; }

  /// Coefficient matrix of z^exponent.
  CMatrix coeff(int exponent) const {
    const int k = exponent - min_deg_;
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return CMatrix::Zero(n_, n_);
    return coeffs_[static_cast<std::size_t>(k)];
  }

  LaurentPoly entry(int i, int j) const {
    std::vector<cplx> c(coeffs_.size());
    for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k] = coeffs_[k](i, j);
    return LaurentPoly(min_deg_, std::move(c));
  }

  std::vector<LaurentPoly> entries() const {
    std::vector<LaurentPoly> out;
    out.reserve(static_cast<std::size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out.push_back(entry(i, j));
    return out;
  }

  CMatrix operator()(cplx z) const {
    CMatrix acc = CMatrix::Zero(n_, n_);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return min_deg_ == 0 ? acc : CMatrix(acc * std::pow(z, min_deg_));
  }

  /// A*(z) = sum A_k^H z^-k; equals A(z)^H on the torus.
  MatLaurentPoly adjoint() const {
    std::vector<CMatrix> out;
    out.reserve(coeffs_.size());
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) out.push_back(it->adjoint());
    return MatLaurentPoly(n_, -max_deg(), std::move(out));
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
  }

  friend MatLaurentPoly operator+(const MatLaurentPoly& a, const MatLaurentPoly& b) {
    check_dims(a, b);
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const int lo = std::min(a.min_deg(), b.min_deg());
    const int hi = std::max(a.max_deg(), b.max_deg());
    std::vector<CMatrix> out;
    for (int d = lo; d <= hi; ++d) out.push_back(a.coeff(d) + b.coeff(d));
    return MatLaurentPoly(a.n_, lo, std::move(out));
  }

  friend MatLaurentPoly operator-(const MatLaurentPoly& a, const MatLaurentPoly& b) {
    return a + b * cplx(-1.0);
  }

  friend MatLaurentPoly operator*(const MatLaurentPoly& a, const MatLaurentPoly& b) {
    check_dims(a, b);
    if (a.is_zero() || b.is_zero()) return MatLaurentPoly(a.n_, 0, {});
    std::vector<CMatrix> out(a.coeffs_.size() + b.coeffs_.size() - 1, CMatrix::Zero(a.n_, a.n_));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return MatLaurentPoly(a.n_, a.min_deg_ + b.min_deg_, std::move(out));
  }

  friend MatLaurentPoly operator*(const MatLaurentPoly& a, cplx s) {
    std::vector<CMatrix> out = a.coeffs_;
    for (auto& c : out) c *= s;
    return MatLaurentPoly(a.n_, a.min_deg_, std::move(out));
  }

  friend MatLaurentPoly operator*(const MatLaurentPoly& a, const LaurentPoly& p) {
    std::vector<LaurentPoly> e = a.entries();
    for (auto& x : e) x = x * p;
    return from_entries(a.n_, e);
  }

  friend bool operator==(const MatLaurentPoly& a, const MatLaurentPoly& b) {
    if (a.n_ != b.n_) return false;
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    if (a.min_deg_ != b.min_deg_ || a.coeffs_.size() != b.coeffs_.size()) return false;
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k)
      if (a.coeffs_[k] != b.coeffs_[k]) return false;
    return true;
  }

 private:
  static void check_dims(const MatLaurentPoly& a, const MatLaurentPoly& b) {
    if (a.n_ != b.n_)
      throw InvalidOperand("matrix dimension mismatch: " + std::to_string(a.n_) + " vs " +
                           std::to_string(b.n_));
  }

  void canonicalize() {
    auto significant = [](const CMatrix& m) {
      return m.size() > 0 && m.cwiseAbs().maxCoeff() >= kCoeffEpsilon;
    };
    auto first = std::find_if(coeffs_.begin(), coeffs_.end(), significant);
    if (first == coeffs_.end()) {
      coeffs_.clear();
      min_deg_ = 0;
      return;
    }
    auto last = std::find_if(coeffs_.rbegin(), coeffs_.rend(), significant);
    coeffs_.erase(last.base(), coeffs_.end());
    min_deg_ += static_cast<int>(first - coeffs_.begin());
    coeffs_.erase(coeffs_.begin(), first);
  }

  int n_ = 0;
  int min_deg_ = 0;
  std::vector<CMatrix> coeffs_;
};

/// max over exponents of the largest entry-wise coefficient difference.
inline double max_coeff_diff(const MatLaurentPoly& a, const MatLaurentPoly& b) {
  if (a.dim() != b.dim()) throw InvalidOperand("matrix dimension mismatch");
  if (a.is_zero() && b.is_zero()) return 0.0;
  const int lo = std::min(a.is_zero() ? b.min_deg() : a.min_deg(), b.is_zero() ? a.min_deg() : b.min_deg());
  const int hi = std::max(a.is_zero() ? b.max_deg() : a.max_deg(), b.is_zero() ? a.max_deg() : b.max_deg());
  double m = 0.0;
  for (int d = lo; d <= hi; ++d) m = std::max(m, (a.coeff(d) - b.coeff(d)).cwiseAbs().maxCoeff());
  return m;
}

// Determinant and adjugate by cofactor expansion over the polynomial ring.
// Exact up to floating rounding; intended for the small N of filter banks.
namespace detail {

inline LaurentPoly det_of(const std::vector<LaurentPoly>& m, int n) {
  if (n == 1) return m[0];
  if (n == 2) return m[0] * m[3] - m[1] * m[2];
  LaurentPoly acc;
  std::vector<LaurentPoly> minor(static_cast<std::size_t>((n - 1) * (n - 1)));
  for (int col = 0; col < n; ++col) {
    if (m[static_cast<std::size_t>(col)].is_zero()) continue;
    for (int i = 1; i < n; ++i)
      for (int j = 0, jj = 0; j < n; ++j) {
        if (j == col) continue;
        minor[static_cast<std::size_t>((i - 1) * (n - 1) + jj++)] = m[static_cast<std::size_t>(i * n + j)];
      }
    LaurentPoly term = m[static_cast<std::size_t>(col)] * det_of(minor, n - 1);
    acc = (col % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace detail

inline LaurentPoly determinant(const MatLaurentPoly& a) {
  if (a.dim() == 0) return LaurentPoly::constant(1.0);
  return detail::det_of(a.entries(), a.dim());
}

/// adj(A) with A * adj(A) = det(A) I.
inline MatLaurentPoly adjugate(const MatLaurentPoly& a) {
  const int n = a.dim();
  if (n == 1) return MatLaurentPoly::identity(1);
  const auto e = a.entries();
  std::vector<LaurentPoly> out(static_cast<std::size_t>(n * n));
  std::vector<LaurentPoly> minor(static_cast<std::size_t>((n - 1) * (n - 1)));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      for (int i = 0, ii = 0; i < n; ++i) {
        if (i == r) continue;
        for (int j = 0, jj = 0; j < n; ++j) {
          if (j == c) continue;
          minor[static_cast<std::size_t>(ii * (n - 1) + jj++)] = e[static_cast<std::size_t>(i * n + j)];
        }
        ++ii;
      }
      LaurentPoly cof = detail::det_of(minor, n - 1);
      // adj is the transposed cofactor matrix
      out[static_cast<std::size_t>(c * n + r)] = ((r + c) % 2 == 0) ? cof : -cof;
    }
  return MatLaurentPoly::from_entries(n, out);
}

struct UnitarityReport {
  bool unitary = false;
  double residual = 0.0;  // max over the grid of max_ij |(A*A - I)_ij|
};

/// Samples A*(z)A(z) - I on an equispaced torus grid.
inline UnitarityReport is_unitary_on_torus(const MatLaurentPoly& a, int grid_size = kDefaultGrid,
                                           double tol = kDefaultTol) {
  if (!a.is_zero() && grid_size < 2 * (a.max_deg() - a.min_deg()) + 1)
    throw ValidationError("grid_size " + std::to_string(grid_size) +
                          " too small for degree span " + std::to_string(a.max_deg() - a.min_deg()));
  if (grid_size < 1) throw ValidationError("grid_size must be positive");
  const CMatrix id = CMatrix::Identity(a.dim(), a.dim());
  double residual = 0.0;
  for (int k = 0; k < grid_size; ++k) {
    const CMatrix v = a(torus_point(k, grid_size));
    residual = std::max(residual, (v.adjoint() * v - id).cwiseAbs().maxCoeff());
  }
  return {residual <= tol, residual};
}

inline constexpr double kSingularThreshold = 1e-9;

/// Winding number of p around 0 as z traverses the torus counter-clockwise.
/// Sums principal-branch phase increments; the grid is refined x4 whenever an
/// increment exceeds pi/2.
inline int winding_number(const LaurentPoly& p, int grid_size = kDefaultGrid) {
  if (grid_size < 2) throw ValidationError("grid_size must be at least 2");
  constexpr int kMaxGrid = 1 << 22;
  for (int n = grid_size;; n *= 4) {
    double total = 0.0, min_mod = INFINITY;
    bool coarse = false;
    cplx prev = p(torus_point(0, n));
    const cplx first = prev;
    for (int k = 1; k <= n; ++k) {
      const cplx cur = (k == n) ? first : p(torus_point(k, n));
      min_mod = std::min(min_mod, std::abs(cur));
      const double step = std::arg(cur / prev);
      if (std::abs(step) > std::numbers::pi / 2) coarse = true;
      total += step;
      prev = cur;
    }
    if (min_mod <= kSingularThreshold)
      throw SingularOnTorus("polynomial vanishes on the torus; winding number undefined", min_mod);
    if (!coarse || n > kMaxGrid / 4)
      return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
  }
}

/// K1 class of a nonsingular matrix function: the winding number of det A.
inline int k1_class(const MatLaurentPoly& a, int grid_size = kDefaultGrid) {
  return winding_number(determinant(a), grid_size);
}

}  // namespace qmf

#endif  // QMF_LAURENT_HPP_
