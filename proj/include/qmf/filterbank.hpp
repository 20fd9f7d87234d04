#ifndef QMF_FILTERBANK_HPP_
#define QMF_FILTERBANK_HPP_

// Subband filter systems and their polyphase matrices.
//
// Coefficients follow the unitary "sqrt(N)" convention: the low-pass filter
// satisfies m0(1) = sum_n a_n = sqrt(N). Filters m_i and the polyphase matrix
// A are related by
//
//   m_i(z) = sum_j z^j A_ij(z^N),    A_ij(z) = (1/N) sum_{w^N = z} m_i(w) w^-j,
//
// i.e. coefficient N k + j of m_i is coefficient k of entry (i, j).

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qmf/errors.hpp"
#include "qmf/laurent.hpp"

namespace qmf {

class FilterBank {
 public:
  FilterBank() = default;

  FilterBank(int scale_n, std::vector<LaurentPoly> filters)
      : scale_n_(scale_n), filters_(std::move(filters)) {
    if (scale_n_ < 2) throw ValidationError("scale number must be at least 2");
    if (filters_.size() != static_cast<std::size_t>(scale_n_))
      throw ValidationError("filter bank with N=" + std::to_string(scale_n_) + " needs " +
                            std::to_string(scale_n_) + " filters, got " +
                            std::to_string(filters_.size()));
  }

  int scale() const { return scale_n_; }
  const std::vector<LaurentPoly>& filters() const { return filters_; }
  const LaurentPoly& filter(int i) const { return filters_.at(static_cast<std::size_t>(i)); }
  const LaurentPoly& lowpass() const { return filters_.front(); }

  friend bool operator==(const FilterBank&, const FilterBank&) = default;

 private:
  int scale_n_ = 2;
  std::vector<LaurentPoly> filters_;
};

struct BiorthPair {
  FilterBank primal;
  FilterBank dual;
};

inline int floor_div(int a, int b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }
inline int floor_mod(int a, int b) { return a - b * floor_div(a, b); }

inline MatLaurentPoly polyphase_from_filters(const FilterBank& bank) {
  const int n = bank.scale();
  int lo = 0, hi = -1;
  bool any = false;
  for (const auto& m : bank.filters()) {
    if (m.is_zero()) continue;
    const int l = floor_div(m.min_deg(), n), h = floor_div(m.max_deg(), n);
    lo = any ? std::min(lo, l) : l;
    hi = any ? std::max(hi, h) : h;
    any = true;
  }
  if (!any) return MatLaurentPoly(n, 0, {});
  std::vector<CMatrix> coeffs(static_cast<std::size_t>(hi - lo + 1), CMatrix::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    const auto& m = bank.filter(i);
    for (int e = m.min_deg(); !m.is_zero() && e <= m.max_deg(); ++e) {
      const int k = floor_div(e, n), j = floor_mod(e, n);
      coeffs[static_cast<std::size_t>(k - lo)](i, j) = m[e];
    }
  }
  return MatLaurentPoly(n, lo, std::move(coeffs));
}

inline FilterBank filters_from_polyphase(const MatLaurentPoly& a) {
  const int n = a.dim();
  std::vector<LaurentPoly> filters;
  filters.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (a.is_zero()) {
      filters.emplace_back();
      continue;
    }
    const int lo = a.min_deg() * n;
    std::vector<cplx> c(static_cast<std::size_t>((a.max_deg() - a.min_deg() + 1) * n));
    for (int k = a.min_deg(); k <= a.max_deg(); ++k) {
      const CMatrix& m = a.coeffs()[static_cast<std::size_t>(k - a.min_deg())];
      for (int j = 0; j < n; ++j) c[static_cast<std::size_t>(k * n + j - lo)] = m(i, j);
    }
    filters.emplace_back(lo, std::move(c));
  }
  return FilterBank(n, std::move(filters));
}

/// Default N=2 high-pass completion b_k = (-1)^k conj(a_{M-k}), M the smallest
/// odd integer >= deg m0 (M = 2n+1 for a filter a_0..a_{2n+1}).
inline LaurentPoly complete_highpass(const LaurentPoly& m0) {
  if (m0.is_zero()) return {};
  const int top = m0.max_deg() % 2 != 0 ? m0.max_deg() : m0.max_deg() + 1;
  const int lo = top - m0.max_deg(), hi = top - m0.min_deg();
  std::vector<cplx> b(static_cast<std::size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) {
    const double sign = (floor_mod(k, 2) == 0) ? 1.0 : -1.0;
    b[static_cast<std::size_t>(k - lo)] = sign * std::conj(m0[top - k]);
  }
  return LaurentPoly(lo, std::move(b));
}

/// Two-band bank {m0, complete_highpass(m0)}.
inline FilterBank bank_from_lowpass(const LaurentPoly& m0) {
  return FilterBank(2, {m0, complete_highpass(m0)});
}

struct QmfReport {
  bool pass = false;
  double max_residual = 0.0;  // max |sum_w conj(m_j(w)) m_k(w) - N delta_jk|
  bool lowpass_ok = false;    // |m0(1) - sqrt(N)| <= tol
};

/// Quadrature-mirror conditions sampled at grid_size points z; for each z the
/// N roots w^N = z are visited.
inline QmfReport check_qmf(const FilterBank& bank, int grid_size = kDefaultGrid,
                           double tol = kDefaultTol) {
  const int n = bank.scale();
  std::vector<cplx> vals(static_cast<std::size_t>(n * n));
  double residual = 0.0;
  for (int g = 0; g < grid_size; ++g) {
    // roots of w^N = z for z = exp(2 pi i g / grid): w = exp(2 pi i (g + grid r)/(N grid))
    for (int r = 0; r < n; ++r) {
      const cplx w = torus_point(g + grid_size * r, n * grid_size);
      for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(r * n + i)] = bank.filter(i)(w);
    }
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        cplx s{};
        for (int r = 0; r < n; ++r)
          s += std::conj(vals[static_cast<std::size_t>(r * n + j)]) * vals[static_cast<std::size_t>(r * n + k)];
        if (j == k) s -= static_cast<double>(n);
        residual = std::max(residual, std::abs(s));
      }
  }
  const double lowpass_err = std::abs(bank.lowpass()(1.0) - std::sqrt(static_cast<double>(n)));
  return {residual <= tol, residual, lowpass_err <= tol};
}

/// max over grid and i, j of |(1/N) sum_{w^N=z} conj(m_i(w)) mdual_j(w) - delta_ij|.
inline double duality_residual(const BiorthPair& pair, int grid_size = kDefaultGrid) {
  const int n = pair.primal.scale();
  if (pair.dual.scale() != n) throw InvalidOperand("primal and dual banks differ in scale");
  double residual = 0.0;
  std::vector<cplx> p(static_cast<std::size_t>(n * n)), d(static_cast<std::size_t>(n * n));
  for (int g = 0; g < grid_size; ++g) {
    for (int r = 0; r < n; ++r) {
      const cplx w = torus_point(g + grid_size * r, n * grid_size);
      for (int i = 0; i < n; ++i) {
        p[static_cast<std::size_t>(r * n + i)] = pair.primal.filter(i)(w);
        d[static_cast<std::size_t>(r * n + i)] = pair.dual.filter(i)(w);
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx s{};
        for (int r = 0; r < n; ++r)
          s += std::conj(p[static_cast<std::size_t>(r * n + i)]) * d[static_cast<std::size_t>(r * n + j)];
        s /= static_cast<double>(n);
        if (i == j) s -= 1.0;
        residual = std::max(residual, std::abs(s));
      }
  }
  return residual;
}

/// Raised when det A is not a monomial, so (A*)^-1 is not a Laurent polynomial.
class NonPolynomialInverse : public Error {
 public:
  NonPolynomialInverse(const std::string& what, LaurentPoly det)
      : Error(what), det_(std::move(det)) {}
  const LaurentPoly& determinant() const noexcept { return det_; }

 private:
  LaurentPoly det_;
};

/// Relative size below which determinant coefficients are treated as zero
/// when deciding whether det A is a monomial.
inline constexpr double kMonomialTol = 1e-12;

/// Biorthogonal dual of a polyphase matrix: Adual = (A*)^-1, computed as
/// adj(A)* / conj-reflected det when det A = c z^d.
inline BiorthPair dual_filters(const MatLaurentPoly& a, int grid_size = kDefaultGrid) {
  LaurentPoly det = determinant(a);
  double min_mod = INFINITY;
  for (int k = 0; k < grid_size; ++k) min_mod = std::min(min_mod, std::abs(det(torus_point(k, grid_size))));
  if (min_mod <= kSingularThreshold)
    throw SingularOnTorus("polyphase determinant vanishes on the torus", min_mod);
  const LaurentPoly trimmed = det.trimmed(kMonomialTol * std::max(1.0, det.max_abs_coeff()));
  if (!trimmed.is_monomial())
    throw NonPolynomialInverse("polyphase determinant is not a monomial; dual filters are not FIR",
                               det);
  // A^-1 = adj(A) / (c z^d);  Adual = (A^-1)* = adj(A)* * (conj(c)^-1 z^d)
  const cplx c = trimmed.coeffs()[0];
  const int d = trimmed.min_deg();
  const MatLaurentPoly dual = adjugate(a).adjoint() * LaurentPoly::monomial(1.0 / std::conj(c), d);
  return {filters_from_polyphase(a), filters_from_polyphase(dual)};
}

}  // namespace qmf

#endif  // QMF_FILTERBANK_HPP_
