#ifndef QMF_CASCADE_HPP_
#define QMF_CASCADE_HPP_

// Scaling and wavelet functions from a filter bank.
//
// Functions live on the fixed grid h Z with h = 2^-J. Value k of a
// GridFunction is the sample at x = k h; the refinement operator
//
//   (M_a g)(x) = sqrt(N) sum_n a_n g(N x - n)
//
// maps samples to samples by index arithmetic, since N k h - n = (N k - n 2^J) h.
// Starting from the box, iterate k is a step function on 2^-k cells, so for
// k <= J each sample is also the value on its cell [k h, (k + 1) h).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qmf/errors.hpp"
#include "qmf/filterbank.hpp"
#include "qmf/laurent.hpp"

namespace qmf {

inline constexpr int kDefaultJ = 10;
inline constexpr int kDefaultIters = 12;
inline constexpr double kCascadeConvergenceTol = 1e-6;
inline constexpr int kDivergenceRun = 3;

struct GridFunction {
  int j_level = 0;
  int support_lo = 0;  // grid index of values[0]
  int support_hi = -1;
  std::vector<cplx> values;

  double step() const { return std::ldexp(1.0, -j_level); }
  int size() const { return support_hi - support_lo + 1; }
  bool empty() const { return values.empty(); }
  double x(int k) const { return k * step(); }

  /// Sample at absolute grid index k, zero off the support.
  cplx at(int k) const {
    if (k < support_lo || k > support_hi) return {};
    return values[static_cast<std::size_t>(k - support_lo)];
  }

  static GridFunction box(int j_level) {
    const int n = 1 << j_level;
    return {j_level, 0, n - 1, std::vector<cplx>(static_cast<std::size_t>(n), 1.0)};
  }
};

/// sum_k g_k h.
inline cplx grid_integral(const GridFunction& g) {
  cplx s{};
  for (const cplx& v : g.values) s += v;
  return s * g.step();
}

/// Grid L2 inner product sum_k conj(f_k) g_k h.
inline cplx grid_inner(const GridFunction& f, const GridFunction& g) {
  if (f.j_level != g.j_level) throw InvalidOperand("grid functions live on different grids");
  const int lo = std::max(f.support_lo, g.support_lo), hi = std::min(f.support_hi, g.support_hi);
  cplx s{};
  for (int k = lo; k <= hi; ++k) s += std::conj(f.at(k)) * g.at(k);
  return s * f.step();
}

/// sqrt(sum_k |f_k - g_k|^2 h) over the union of supports.
inline double grid_l2_diff(const GridFunction& f, const GridFunction& g) {
  if (f.j_level != g.j_level) throw InvalidOperand("grid functions live on different grids");
  const int lo = std::min(f.support_lo, g.support_lo), hi = std::max(f.support_hi, g.support_hi);
  double s = 0.0;
  for (int k = lo; k <= hi; ++k) s += std::norm(f.at(k) - g.at(k));
  return std::sqrt(s * f.step());
}

/// Trims exact zeros from both ends.
inline GridFunction trimmed(GridFunction g) {
  std::size_t a = 0, b = g.values.size();
  while (a < b && g.values[a] == cplx{}) ++a;
  while (b > a && g.values[b - 1] == cplx{}) --b;
  if (a == b) return {g.j_level, 0, -1, {}};
  g.values = std::vector<cplx>(g.values.begin() + static_cast<std::ptrdiff_t>(a),
                               g.values.begin() + static_cast<std::ptrdiff_t>(b));
  g.support_hi = g.support_lo + static_cast<int>(b) - 1;
  g.support_lo += static_cast<int>(a);
  return g;
}

/// sqrt(N) sum_n c_n g(N x - n) on g's grid.
inline GridFunction refine(const LaurentPoly& c, int scale_n, const GridFunction& g) {
  if (c.is_zero() || g.empty()) return {g.j_level, 0, -1, {}};
  const int shift = 1 << g.j_level;
  // N i - n 2^J in [lo, hi]  <=>  i in [ceil((lo + n 2^J)/N), floor((hi + n 2^J)/N)]
  const int out_lo = floor_div(g.support_lo + c.min_deg() * shift + scale_n - 1, scale_n);
  const int out_hi = floor_div(g.support_hi + c.max_deg() * shift, scale_n);
  const double root = std::sqrt(static_cast<double>(scale_n));
  std::vector<cplx> out(static_cast<std::size_t>(out_hi - out_lo + 1));
  for (int i = out_lo; i <= out_hi; ++i) {
    cplx s{};
    for (int n = c.min_deg(); n <= c.max_deg(); ++n) s += c[n] * g.at(scale_n * i - n * shift);
    out[static_cast<std::size_t>(i - out_lo)] = root * s;
  }
  return trimmed({g.j_level, out_lo, out_hi, std::move(out)});
}

/// One application of M_a with the bank's low-pass filter. No renormalization.
inline GridFunction cascade_step(const FilterBank& bank, const GridFunction& g) {
  return refine(bank.lowpass(), bank.scale(), g);
}

struct CascadeResult {
  GridFunction phi;
  std::vector<double> log;  // grid L2 difference between successive iterates
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
};

/// Cascade from the unit box. Each iterate is rescaled to unit grid integral.
/// Stops early once the difference drops below the convergence threshold or
/// after kDivergenceRun consecutive increases.
inline CascadeResult scaling_function(const FilterBank& bank, int j_level = kDefaultJ, int iters = kDefaultIters) {
  if (iters < 1) throw ValidationError("cascade needs at least one iteration");
  if (j_level < 0 || j_level > 24) throw ValidationError("grid level must lie in [0, 24]");
  CascadeResult res;
  GridFunction g = GridFunction::box(j_level);
  int increases = 0;
  for (int it = 1; it <= iters; ++it) {
    GridFunction next = cascade_step(bank, g);
    const cplx mass = grid_integral(next);
    if (std::abs(mass) < 1e-300) throw NumericalError("cascade iterate has zero integral; cannot normalize");
    for (cplx& v : next.values) v /= mass;
    const double diff = grid_l2_diff(next, g);
    if (!res.log.empty() && diff > res.log.back())
      ++increases;
    else
      increases = 0;
    res.log.push_back(diff);
    res.iterations = it;
    g = std::move(next);
    if (diff < kCascadeConvergenceTol) break;
    if (increases >= kDivergenceRun) {
      res.diverged = true;
      break;
    }
  }
  res.converged = !res.diverged && res.log.back() < kCascadeConvergenceTol;
  res.phi = std::move(g);
  return res;
}

/// psi_i = sqrt(N) sum_n a^(i)_n phi(N x - n) for i = 1..N-1.
inline std::vector<GridFunction> wavelet_from_scaling(const FilterBank& bank, const GridFunction& phi) {
  std::vector<GridFunction> out;
  for (int i = 1; i < bank.scale(); ++i) out.push_back(refine(bank.filter(i), bank.scale(), phi));
  return out;
}

inline constexpr int kDefaultProductTerms = 60;

/// phi^(t) = int phi(x) e^{-i t x} dx approximated by prod_{k=1..K} m0(t N^-k)/sqrt(N),
/// m0 evaluated at z = exp(-i t N^-k). Factors with |t| N^-k below 1e-13 equal 1
/// to double precision and are skipped.
inline cplx fourier_infinite_product(const FilterBank& bank, double t, int k_terms = kDefaultProductTerms) {
  if (k_terms < 1) throw ValidationError("infinite product needs at least one term");
  const double n = bank.scale(), norm = std::sqrt(n);
  cplx prod = 1.0;
  double s = t;
  for (int k = 1; k <= k_terms; ++k) {
    s /= n;
    if (std::abs(s) < 1e-13) break;
    prod *= bank.lowpass()(at_angle(s)) / norm;
  }
  return prod;
}

/// sum_k g_k e^{-i t k h} h: the trapezoid rule for a continuous g vanishing at
/// the ends of its support.
inline cplx grid_fourier(const GridFunction& g, double t) {
  const double h = g.step();
  cplx s{};
  const cplx rot = std::polar(1.0, -t * h);
  cplx e = std::polar(1.0, -t * h * g.support_lo);
  for (const cplx& v : g.values) {
    s += v * e;
    e *= rot;
  }
  return s * h;
}

/// Moments use cell midpoints (k + 1/2) h, exact for step functions on the grid.
inline cplx grid_moment(const GridFunction& g, int order) {
  const double h = g.step();
  cplx s{};
  for (int k = g.support_lo; k <= g.support_hi; ++k) s += std::pow((k + 0.5) * h, order) * g.at(k);
  return s * h;
}

struct ExpectedPosition {
  double position = 0.0;      // int x |g|^2 / int |g|^2
  double nearest_half = 0.0;  // nearest element of 1/2 + Z
  double gap = 0.0;
};

inline ExpectedPosition expected_position(const GridFunction& g) {
  const double h = g.step();
  double mass = 0.0, first = 0.0;
  for (int k = g.support_lo; k <= g.support_hi; ++k) {
    const double w = std::norm(g.at(k));
    mass += w;
    first += (k + 0.5) * h * w;
  }
  if (mass == 0.0) throw ValidationError("expected position of the zero function is undefined");
  ExpectedPosition e;
  e.position = first / mass;
  e.nearest_half = std::floor(e.position) + 0.5;
  e.gap = std::abs(e.position - e.nearest_half);
  return e;
}

/// Translate by k units: samples shift by k 2^J grid steps.
inline GridFunction translated(GridFunction g, int k) {
  g.support_lo += k << g.j_level;
  g.support_hi += k << g.j_level;
  return g;
}

inline double haar_phi(double x) { return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0; }
inline double haar_psi(double x) { return x >= 0.0 && x < 0.5 ? 1.0 : (x >= 0.5 && x < 1.0 ? -1.0 : 0.0); }

/// Partial sums S_n = sum_{k=1..n} 2^-k psi(2^-k x), n = 1..n_terms, Haar psi.
/// S_n = phi(x) - 2^-n phi(2^-n x), so the tail past n is 2^-n phi(2^-n x).
inline std::vector<double> haar_telescoping(double x, int n_terms) {
  if (n_terms < 1) throw ValidationError("telescoping series needs at least one term");
  std::vector<double> sums;
  double s = 0.0;
  for (int k = 1; k <= n_terms; ++k) {
    const double scale = std::ldexp(1.0, -k);
    s += scale * haar_psi(scale * x);
    sums.push_back(s);
  }
  return sums;
}

inline double haar_tail(double x, int n) {
  const double scale = std::ldexp(1.0, -n);
  return scale * haar_phi(scale * x);
}

}  // namespace qmf

#endif  // QMF_CASCADE_HPP_
