#ifndef QMF_TRANSFER_HPP_
#define QMF_TRANSFER_HPP_

// Ruelle transfer operator R_W and its adjoint, the subdivision operator.
//
// On Fourier coefficients (W = sum c_k z^k):
//
//   (R_W f)_n  = sum_k c_{Nn-k} f_k          (R_W f)(z) = (1/N) sum_{w^N=z} W(w) f(w)
//   (R_W* f)_n = sum_k conj(c_{Nk-n}) f_k    (R_W* f)(z) = conj(W)(z) f(z^N)
//
// If W has coefficient support [-D, D], the modes |n| <= ceil(D/(N-1)) form an
// invariant window for R_W: |Nn - k| <= D and |k| <= M force |n| <= M. The
// truncated matrix is therefore exact on trigonometric polynomials of that
// degree, and its spectrum decides the Perron-Frobenius condition.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qmf/cascade.hpp"
#include "qmf/errors.hpp"
#include "qmf/filterbank.hpp"
#include "qmf/laurent.hpp"

namespace qmf {

/// Smallest invariant mode window for W: max(ceil(D/(N-1)), 1).
inline int min_band(const LaurentPoly& w, int scale_n) {
  if (w.is_zero()) return 1;
  const int d = std::max(std::abs(w.min_deg()), std::abs(w.max_deg()));
  return std::max((d + scale_n - 2) / (scale_n - 1), 1);
}

struct TransferSpec {
  LaurentPoly w;
  int scale_n = 2;
  int band_m = 1;

  /// W = |m0|^2 = m0 m0* with the minimal window.
  static TransferSpec for_lowpass(const LaurentPoly& m0, int scale_n) {
    LaurentPoly w = m0 * m0.adjoint();
    const int band = min_band(w, scale_n);
    return {std::move(w), scale_n, band};
  }

  static TransferSpec for_bank(const FilterBank& bank) { return for_lowpass(bank.lowpass(), bank.scale()); }

  void validate() const {
    if (scale_n < 2) throw ValidationError("scale number must be at least 2");
    const int need = min_band(w, scale_n);
    if (band_m < need)
      throw ValidationError("mode window " + std::to_string(band_m) + " is not invariant; need at least " +
                            std::to_string(need));
  }
};

/// min over the grid of Re W(z) >= -1e-9 (and |Im W| small): W is a nonnegative weight.
inline bool is_nonnegative_on_torus(const LaurentPoly& w, int grid_size = kDefaultGrid) {
  for (int k = 0; k < grid_size; ++k) {
    const cplx v = w(torus_point(k, grid_size));
    if (v.real() < -1e-9 || std::abs(v.imag()) > 1e-9) return false;
  }
  return true;
}

inline LaurentPoly transfer_apply(const TransferSpec& spec, const LaurentPoly& f) {
  if (spec.w.is_zero() || f.is_zero()) return {};
  const int n = spec.scale_n;
  // (Rf)_m = sum_k c_{Nm-k} f_k is the coefficient of z^{Nm} in W f
  const LaurentPoly prod = spec.w * f;
  const int lo = floor_div(prod.min_deg() + n - 1, n), hi = floor_div(prod.max_deg(), n);
  std::vector<cplx> out(static_cast<std::size_t>(std::max(hi - lo + 1, 0)));
  for (int m = lo; m <= hi; ++m) out[static_cast<std::size_t>(m - lo)] = prod[n * m];
  return LaurentPoly(lo, std::move(out));
}

inline LaurentPoly subdivision_apply(const TransferSpec& spec, const LaurentPoly& f) {
  return spec.w.adjoint() * f.dilate(spec.scale_n);
}

/// Entry (n, k) = c_{Nn-k} for modes n, k in [-band_m, band_m]; row/column i
/// corresponds to mode i - band_m.
inline CMatrix transfer_matrix(const TransferSpec& spec) {
  spec.validate();
  const int m = spec.band_m, size = 2 * m + 1;
  CMatrix t(size, size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) t(r, c) = spec.w[spec.scale_n * (r - m) - (c - m)];
  return t;
}

inline constexpr double kPeripheralTol = 1e-7;

struct SpectrumReport {
  std::vector<cplx> eigenvalues;  // descending modulus
  std::vector<cplx> peripheral;   // |lambda| >= 1 - tol
  bool pf_holds = false;          // peripheral == {1}, simple
  LaurentPoly fixed_vector;       // eigenvector for lambda = 1, f(1) = 1 when possible
};

inline SpectrumReport spectrum(const TransferSpec& spec, double tol = kPeripheralTol) {
  const CMatrix t = transfer_matrix(spec);
  Eigen::ComplexEigenSolver<CMatrix> solver(t, true);
  if (solver.info() != Eigen::Success) throw NumericalError("eigen-solve of the transfer matrix failed");
  const auto& vals = solver.eigenvalues();
  std::vector<int> order(static_cast<std::size_t>(vals.size()));
  for (int i = 0; i < vals.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(vals(a)), mb = std::abs(vals(b));
    if (std::abs(ma - mb) > 1e-12) return ma > mb;
    return std::arg(vals(a)) < std::arg(vals(b));
  });

  SpectrumReport rep;
  int near_one = 0, best = -1;
  for (int i : order) {
    const cplx l = vals(i);
    rep.eigenvalues.push_back(l);
    if (std::abs(l) >= 1.0 - tol) rep.peripheral.push_back(l);
    if (std::abs(l - 1.0) <= tol) ++near_one;
    if (best < 0 || std::abs(l - 1.0) < std::abs(vals(best) - 1.0)) best = i;
  }
  const bool only_one = std::all_of(rep.peripheral.begin(), rep.peripheral.end(),
                                    [tol](cplx l) { return std::abs(l - 1.0) <= tol; });
  rep.pf_holds = only_one && near_one == 1 && rep.peripheral.size() == 1;
  if (best >= 0 && std::abs(vals(best) - 1.0) <= tol) {
    Eigen::VectorXcd v = solver.eigenvectors().col(best);
    const cplx at_one = v.sum();
    if (std::abs(at_one) > 1e-12) v /= at_one;
    rep.fixed_vector = LaurentPoly(-spec.band_m, std::vector<cplx>(v.data(), v.data() + v.size()));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Periodization diagnostics

inline constexpr int kDefaultNmax = 10000;

struct PerReport {
  std::vector<double> t_grid;
  std::vector<double> values;  // PER(|phi^|^2)(t) truncated at |n| <= n_max
  double max_dev_from_1 = 0.0;
  bool is_constant_1 = false;
  double tail_estimate = 0.0;  // ~ n_max * (|phi^(t + 2 pi n_max)|^2 + |phi^(t - 2 pi n_max)|^2), maximized over t
};

/// PER(|phi^|^2)(t) = sum_{|n| <= n_max} |phi^(t + 2 pi n)|^2 on the given t-grid.
inline PerReport per_check(const std::function<cplx(double)>& phi_hat, std::vector<double> t_grid,
                           int n_max = kDefaultNmax, double tol = 1e-3) {
  if (n_max < 100) throw ValidationError("PER truncation needs n_max >= 100");
  PerReport rep;
  rep.t_grid = std::move(t_grid);
  for (double t : rep.t_grid) {
    double sum = 0.0;
    for (int n = -n_max; n <= n_max; ++n) sum += std::norm(phi_hat(t + 2.0 * std::numbers::pi * n));
    rep.values.push_back(sum);
    rep.max_dev_from_1 = std::max(rep.max_dev_from_1, std::abs(sum - 1.0));
    const double edge = std::norm(phi_hat(t + 2.0 * std::numbers::pi * n_max)) +
                        std::norm(phi_hat(t - 2.0 * std::numbers::pi * n_max));
    rep.tail_estimate = std::max(rep.tail_estimate, n_max * edge);
  }
  rep.is_constant_1 = rep.max_dev_from_1 <= tol;
  return rep;
}

/// Uniform grid t_j = 2 pi j / points on [0, 2 pi).
inline std::vector<double> uniform_t_grid(int points) {
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) t[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / points;
  return t;
}

inline PerReport per_check(const FilterBank& bank, int grid_points = 64, int n_max = kDefaultNmax,
                           double tol = 1e-3) {
  return per_check([&bank](double t) { return fourier_infinite_product(bank, t); }, uniform_t_grid(grid_points),
                   n_max, tol);
}

/// max_t |R_W f(t) - f(t)| for W = |m0|^2 and f sampled on the uniform grid
/// t_j = 2 pi j / M. (R f)(t) = (1/N) sum_r W(w_r) f(w_r) with w_r at angle
/// (t + 2 pi r)/N, which lands on the grid when N divides both j and M; the
/// residual is evaluated at those t_j.
inline double fixed_point_check(const FilterBank& bank, const std::vector<double>& f_samples) {
  const int n = bank.scale();
  const int m = static_cast<int>(f_samples.size());
  if (m == 0 || m % n != 0)
    throw ValidationError("fixed-point check needs a uniform grid whose size is a multiple of N");
  double residual = 0.0;
  for (int j = 0; j < m; j += n) {
    double rf = 0.0;
    for (int r = 0; r < n; ++r) {
      const int idx = j / n + r * (m / n);
      const double angle = 2.0 * std::numbers::pi * idx / m;
      rf += std::norm(bank.lowpass()(at_angle(angle))) * f_samples[static_cast<std::size_t>(idx)];
    }
    rf /= n;
    residual = std::max(residual, std::abs(rf - f_samples[static_cast<std::size_t>(j)]));
  }
  return residual;
}

}  // namespace qmf

#endif  // QMF_TRANSFER_HPP_
