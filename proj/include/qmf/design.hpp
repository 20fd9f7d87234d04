#ifndef QMF_DESIGN_HPP_
#define QMF_DESIGN_HPP_

// Constructive filter design.
//
// Unitary polyphase matrices are synthesized as a constant normalizing matrix
// times a product of first-order factors zP + (1 - P) with P a rank-one
// orthogonal projection. Every such factor has determinant z, so a product of
// k factors has K1 class k. Two-band matrices with det = 1 are split into
// Daubechies-Sweldens lifting steps by Euclidean reduction.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qmf/errors.hpp"
#include "qmf/filterbank.hpp"
#include "qmf/laurent.hpp"

namespace qmf {

/// One-dimensional projection in C^2, parametrized by lambda in [0, 1] and
/// theta in [0, 2 pi).
struct ProjectionParam {
  double lambda = 0.0;
  double theta = 0.0;

  void validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0))
      throw ValidationError("projection lambda must lie in [0, 1], got " + detail::sci(lambda));
    if (!(theta >= 0.0 && theta < 2.0 * std::numbers::pi))
      throw ValidationError("projection theta must lie in [0, 2pi), got " + detail::sci(theta));
  }
};

/// Q = [[l, sqrt(l(1-l)) e^{i theta}], [sqrt(l(1-l)) e^{-i theta}, 1-l]].
inline CMatrix projection(const ProjectionParam& p) {
  p.validate();
  const double off = std::sqrt(p.lambda * (1.0 - p.lambda));
  CMatrix q(2, 2);
  q << p.lambda, off * std::polar(1.0, p.theta), off * std::polar(1.0, -p.theta), 1.0 - p.lambda;
  return q;
}

/// H_kl = exp(2 pi i k l / N) / sqrt(N); for N = 2 this is (1/sqrt2)[[1,1],[1,-1]].
inline CMatrix dft_matrix(int n) {
  CMatrix h(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) h(k, l) = torus_point(k * l, n) / std::sqrt(static_cast<double>(n));
  return h;
}

inline CMatrix haar_matrix() { return dft_matrix(2); }

/// Residuals of a candidate projection: ||P^2 - P||, ||P - P*||, |tr P - 1|.
struct ProjectionResiduals {
  double idempotent = 0.0;
  double selfadjoint = 0.0;
  double trace = 0.0;
};

inline ProjectionResiduals projection_residuals(const CMatrix& p) {
  return {(p * p - p).cwiseAbs().maxCoeff(), (p - p.adjoint()).cwiseAbs().maxCoeff(),
          std::abs(p.trace() - 1.0)};
}

/// U_P(z) = zP + (1 - P) for a rank-one orthogonal projection P.
inline MatLaurentPoly general_factor(const CMatrix& p) {
  if (p.rows() != p.cols() || p.rows() == 0) throw ValidationError("projection must be square");
  const auto r = projection_residuals(p);
  constexpr double tol = 1e-12;
  if (r.idempotent > tol || r.selfadjoint > tol || r.trace > tol)
    throw ValidationError("not a rank-one orthogonal projection: ||P^2-P|| = " +
                          detail::sci(r.idempotent) + ", ||P-P*|| = " + detail::sci(r.selfadjoint) +
                          ", |tr P - 1| = " + detail::sci(r.trace));
  const auto n = p.rows();
  return MatLaurentPoly(static_cast<int>(n), 0, {CMatrix::Identity(n, n) - p, p});
}

/// A(z) = H * prod_j (zP_j + 1 - P_j) with H the normalized DFT matrix.
inline MatLaurentPoly unitary_from_factors(int n, std::span<const CMatrix> projections) {
  MatLaurentPoly a = MatLaurentPoly::constant(dft_matrix(n));
  for (const auto& p : projections) a = a * general_factor(p);
  return a;
}

/// A(z) = V (1 - Q_1 + z Q_1) ... (1 - Q_k + z Q_k), V the 2x2 Haar matrix.
inline MatLaurentPoly unitary_from_projections(std::span<const ProjectionParam> params) {
  std::vector<CMatrix> qs;
  qs.reserve(params.size());
  for (const auto& p : params) qs.push_back(projection(p));
  return unitary_from_factors(2, qs);
}

/// Daubechies four-tap coefficients in the h-convention (sum h_n = 2).
inline std::array<double, 4> daubechies4_h() {
  const double s3 = std::sqrt(3.0);
  return {(1.0 + s3) / 4.0, (3.0 + s3) / 4.0, (3.0 - s3) / 4.0, (1.0 - s3) / 4.0};
}

/// D4 bank in the sqrt(N) convention: a_n = h_n / sqrt(2) on exponents 0..3,
/// with the default high-pass completion b_k = (-1)^k a_{3-k}.
inline FilterBank daubechies4() {
  const auto h = daubechies4_h();
  std::array<double, 4> a{};
  for (std::size_t i = 0; i < 4; ++i) a[i] = h[i] / std::numbers::sqrt2;
  return bank_from_lowpass(LaurentPoly::from_real(0, a));
}

/// Haar bank m0 = (1 + z)/sqrt2, m1 = (1 - z)/sqrt2.
inline FilterBank haar_bank() {
  const double r = 1.0 / std::numbers::sqrt2;
  return bank_from_lowpass(LaurentPoly(0, {r, r}));
}

/// k independent projections with lambda ~ U[0, 1], theta ~ U[0, 2 pi).
inline std::vector<ProjectionParam> random_projection_params(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0), angle(0.0, 2.0 * std::numbers::pi);
  std::vector<ProjectionParam> out(static_cast<std::size_t>(k));
  for (auto& p : out) {
    p.lambda = unit(rng);
    p.theta = angle(rng);
  }
  return out;
}

/// Low-pass coefficients a_0..a_5 of the two-angle family in closed form.
inline std::array<double, 6> six_tap_coefficients(double theta, double rho) {
  const double r2 = std::numbers::sqrt2;
  const double e0 = 1.0 / r2;
  const double e1 = (std::cos(2 * theta) + std::cos(2 * rho)) / r2;
  const double e2 = (std::sin(2 * theta) + std::sin(2 * rho)) / r2;
  const double e3 = std::cos(2 * theta - 2 * rho) / r2;
  const double e4 = std::sin(2 * theta - 2 * rho) / r2;
  return {(e0 - e1 - e2 + e3 + e4) / 4, (e0 + e1 - e2 + e3 - e4) / 4, (e0 - e3 - e4) / 2,
          (e0 - e3 + e4) / 2,           (e0 + e1 + e2 + e3 + e4) / 4, (e0 - e1 + e2 + e3 - e4) / 4};
}

/// Real rotation projection Q_t = [[cos^2 t, cos t sin t], [cos t sin t, sin^2 t]].
inline CMatrix rotation_projection(double t) {
  const double c = std::cos(t), s = std::sin(t);
  CMatrix q(2, 2);
  q << c * c, c * s, c * s, s * s;
  return q;
}

/// A(z) = V U_theta(z) U_rho(z) with U_t(z) = (1 - Q_t) + z Q_t.
inline MatLaurentPoly six_tap_polyphase(double theta, double rho) {
  const std::array<CMatrix, 2> qs{rotation_projection(theta), rotation_projection(rho)};
  return unitary_from_factors(2, qs);
}

/// Six-tap orthogonal bank for angles (theta, rho). The low-pass filter is the
/// closed form; the high-pass filter comes from the polyphase product.
inline FilterBank six_tap_from_angles(double theta, double rho) {
  const FilterBank product = filters_from_polyphase(six_tap_polyphase(theta, rho));
  const auto a = six_tap_coefficients(theta, rho);
  return FilterBank(2, {LaurentPoly::from_real(0, a), product.filter(1)});
}

// ---------------------------------------------------------------------------
// Lifting

class LiftingStep {
 public:
  enum class Kind { lower, upper, diag };

  static LiftingStep lower(LaurentPoly l) { return LiftingStep(Kind::lower, std::move(l), 1.0); }
  static LiftingStep upper(LaurentPoly u) { return LiftingStep(Kind::upper, std::move(u), 1.0); }
  static LiftingStep diag(cplx k) {
    if (k == cplx{}) throw ValidationError("diagonal lifting constant must be nonzero");
    return LiftingStep(Kind::diag, {}, k);
  }

  Kind kind() const { return kind_; }
  const LaurentPoly& poly() const { return poly_; }
  cplx k() const { return k_; }

  /// [[1,0],[l,1]], [[1,u],[0,1]] or diag(K, 1/K).
  MatLaurentPoly matrix() const {
    const auto one = LaurentPoly::constant(1.0);
    switch (kind_) {
      case Kind::lower: return MatLaurentPoly::from_entries(2, {one, {}, poly_, one});
      case Kind::upper: return MatLaurentPoly::from_entries(2, {one, poly_, {}, one});
      case Kind::diag: break;
    }
    return MatLaurentPoly::from_entries(2, {LaurentPoly::constant(k_), {}, {}, LaurentPoly::constant(1.0 / k_)});
  }

  LiftingStep inverse() const {
    return kind_ == Kind::diag ? diag(1.0 / k_) : LiftingStep(kind_, -poly_, 1.0);
  }

  friend bool operator==(const LiftingStep&, const LiftingStep&) = default;

 private:
  LiftingStep(Kind kind, LaurentPoly poly, cplx k) : kind_(kind), poly_(std::move(poly)), k_(k) {}

  Kind kind_;
  LaurentPoly poly_;
  cplx k_;
};

inline const char* to_string(LiftingStep::Kind k) {
  switch (k) {
    case LiftingStep::Kind::lower: return "lower";
    case LiftingStep::Kind::upper: return "upper";
    case LiftingStep::Kind::diag: return "diag";
  }
  return "?";
}

/// Ordered product of the step matrices.
inline MatLaurentPoly lifting_recompose(std::span<const LiftingStep> steps) {
  MatLaurentPoly a = MatLaurentPoly::identity(2);
  for (const auto& s : steps) a = a * s.matrix();
  return a;
}

/// Raised when the Euclidean reduction stalls or does not reproduce its input.
class FactorizationFailure : public Error {
 public:
  FactorizationFailure(const std::string& what, MatLaurentPoly residual)
      : Error(what), residual_(std::move(residual)) {}
  const MatLaurentPoly& residual() const noexcept { return residual_; }

 private:
  MatLaurentPoly residual_;
};

inline constexpr double kUnimodularTol = 1e-10;
inline constexpr double kRecomposeTol = 1e-9;

namespace detail {

inline LaurentPoly trim_rel(const LaurentPoly& p, double scale) {
  return p.trimmed(1e-11 * std::max(1.0, scale));
}

// Quotient q and remainder r = a - q b with span(r) < span(b) (or r = 0).
// The first `top` cancellations remove leading terms, the rest remove trailing
// terms; every split yields a valid division and they differ in conditioning.
inline std::pair<LaurentPoly, LaurentPoly> euclid_divide(LaurentPoly a, const LaurentPoly& b, int top, double scale) {
  LaurentPoly q;
  const cplx lead_b = b[b.max_deg()], tail_b = b[b.min_deg()];
  for (int done = 0; !a.is_zero() && a.span_width() >= b.span_width(); ++done) {
    const bool from_top = done < top;
    const auto term = from_top ? LaurentPoly::monomial(a[a.max_deg()] / lead_b, a.max_deg() - b.max_deg())
                               : LaurentPoly::monomial(a[a.min_deg()] / tail_b, a.min_deg() - b.min_deg());
    q += term;
    const int old_max = a.max_deg(), old_min = a.min_deg();
    a = a - term * b;
    // the cancelled end coefficient is zero by construction
    if (from_top && !a.is_zero() && a.max_deg() == old_max)
      a = LaurentPoly(a.min_deg(), std::vector<cplx>(a.coeffs().begin(), a.coeffs().end() - 1));
    if (!from_top && !a.is_zero() && a.min_deg() == old_min)
      a = LaurentPoly(a.min_deg() + 1, std::vector<cplx>(a.coeffs().begin() + 1, a.coeffs().end()));
    a = trim_rel(a, scale);
  }
  return {q, a};
}

// Moves every diagonal step to the front (X D = D (D^-1 X D)), merges adjacent
// steps of the same kind and drops zero steps.
inline std::vector<LiftingStep> normalize_steps(const std::vector<LiftingStep>& in) {
  std::vector<LiftingStep> out;
  cplx k_total = 1.0;
  for (const auto& s : in) {
    if (s.kind() != LiftingStep::Kind::diag) {
      out.push_back(s);
      continue;
    }
    const cplx k2 = s.k() * s.k();
    for (auto& o : out)
      o = o.kind() == LiftingStep::Kind::lower ? LiftingStep::lower(o.poly() * k2)
                                               : LiftingStep::upper(o.poly() * (1.0 / k2));
    k_total *= s.k();
  }
  std::vector<LiftingStep> merged;
  for (const auto& s : out) {
    if (s.poly().is_zero()) continue;
    if (!merged.empty() && merged.back().kind() == s.kind()) {
      LaurentPoly sum = merged.back().poly() + s.poly();
      merged.pop_back();
      if (!sum.is_zero())
        merged.push_back(s.kind() == LiftingStep::Kind::lower ? LiftingStep::lower(sum) : LiftingStep::upper(sum));
      continue;
    }
    merged.push_back(s);
  }
  if (k_total != cplx(1.0)) merged.insert(merged.begin(), LiftingStep::diag(k_total));
  return merged;
}

// diag(u, 1/u) for a monomial u = alpha z^d as lifting steps.
inline std::vector<LiftingStep> monomial_diag_steps(const LaurentPoly& u) {
  const cplx alpha = u.coeffs()[0];
  const int d = u.min_deg();
  std::vector<LiftingStep> steps{LiftingStep::diag(alpha)};
  if (d != 0) {
    // diag(v, 1/v) = U(v) L(-1/v) U(v) . U(-1) L(1) U(-1)
    const auto v = LaurentPoly::monomial(1.0, d), vinv = LaurentPoly::monomial(1.0, -d);
    const auto one = LaurentPoly::constant(1.0);
    steps.push_back(LiftingStep::upper(v));
    steps.push_back(LiftingStep::lower(-vinv));
    steps.push_back(LiftingStep::upper(v));
    steps.push_back(LiftingStep::upper(-one));
    steps.push_back(LiftingStep::lower(one));
    steps.push_back(LiftingStep::upper(-one));
  }
  return steps;
}

}  // namespace detail

namespace detail {

inline constexpr int kLiftSearchNodes = 4096;

struct LiftSearch {
  double scale = 1.0;
  int nodes = kLiftSearchNodes;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<LiftingStep> best;
  MatLaurentPoly last_reduced;  // for the failure report
};

// m = a * applied[0] * applied[1] * ... has a zero in its first row. Returns the
// unnormalized steps of a, or nothing if the leftover diagonal is not a monomial.
inline std::optional<std::vector<LiftingStep>> finish_reduction(MatLaurentPoly m, std::vector<LiftingStep> applied,
                                                                double scale, double& cost) {
  auto trim_all = [scale](const MatLaurentPoly& x) {
    auto e = x.entries();
    for (auto& v : e) v = trim_rel(v, scale);
    return MatLaurentPoly::from_entries(2, e);
  };
  if (!m.entry(0, 1).is_zero()) {
    // m = [[0, v], [c, d]]: m J = [[v, 0], [d, 1/v]] with J = U(-1) L(1) U(-1)
    const auto one = LaurentPoly::constant(1.0);
    for (const auto& s : {LiftingStep::upper(-one), LiftingStep::lower(one), LiftingStep::upper(-one)}) {
      m = trim_all(m * s.matrix());
      applied.push_back(s);
    }
  }
  const LaurentPoly u = m.entry(0, 0);
  if (!u.is_monomial()) return std::nullopt;
  // m = [[u, 0], [c, 1/u]] = L(c/u) diag(u, 1/u)
  const cplx alpha = u.coeffs()[0];
  const LaurentPoly lower = trim_rel(m.entry(1, 0) * LaurentPoly::monomial(1.0 / alpha, -u.min_deg()), scale);
  cost = std::max({cost, lower.max_abs_coeff(), std::abs(alpha), 1.0 / std::abs(alpha)});
  std::vector<LiftingStep> steps{LiftingStep::lower(lower)};
  for (auto& s : monomial_diag_steps(u)) steps.push_back(s);
  for (auto it = applied.rbegin(); it != applied.rend(); ++it) steps.push_back(it->inverse());
  return steps;
}

// Depth-first search over the division choices (which entry, top/bottom split),
// minimizing the largest coefficient among the produced steps. The first path
// visited is plain top-first division.
inline void lift_search(const MatLaurentPoly& m, std::vector<LiftingStep>& applied, double cost, LiftSearch& st) {
  if (cost >= st.best_cost || (st.nodes <= 0 && !st.best.empty())) return;
  --st.nodes;
  const LaurentPoly p = m.entry(0, 0), q = m.entry(0, 1);
  if (p.is_zero() || q.is_zero()) {
    double leaf = cost;
    if (auto steps = finish_reduction(m, applied, st.scale, leaf); steps && leaf < st.best_cost) {
      st.best_cost = leaf;
      st.best = std::move(*steps);
    } else if (!steps) {
      st.last_reduced = m;
    }
    return;
  }
  std::vector<bool> sides;
  if (p.span_width() >= q.span_width()) sides.push_back(true);
  if (q.span_width() >= p.span_width()) sides.push_back(false);
  for (const bool reduce_left : sides) {
    const LaurentPoly& num = reduce_left ? p : q;
    const LaurentPoly& den = reduce_left ? q : p;
    for (int top = num.span_width() - den.span_width() + 1; top >= 0; --top) {
      auto [quot, rem] = euclid_divide(num, den, top, st.scale);
      if (!rem.is_zero() && rem.span_width() >= den.span_width()) {
        st.last_reduced = m;
        continue;
      }
      const LiftingStep op = reduce_left ? LiftingStep::lower(-quot) : LiftingStep::upper(-quot);
      auto e = (m * op.matrix()).entries();
      for (auto& x : e) x = trim_rel(x, st.scale);
      e[reduce_left ? 0 : 1] = rem;
      applied.push_back(op);
      lift_search(MatLaurentPoly::from_entries(2, e), applied, std::max(cost, quot.max_abs_coeff()), st);
      applied.pop_back();
    }
  }
}

}  // namespace detail

namespace detail {

// Search plus normalization, without the determinant precondition.
inline std::vector<LiftingStep> factor_by_search(const MatLaurentPoly& a, double scale) {
  LiftSearch st;
  st.scale = scale;
  st.last_reduced = a;
  std::vector<LiftingStep> applied;
  lift_search(a, applied, 0.0, st);
  if (st.best.empty())
    throw FactorizationFailure("Euclidean reduction did not reach a monomial diagonal", st.last_reduced);
  return normalize_steps(st.best);
}

inline MatLaurentPoly recompose_inverse(const std::vector<LiftingStep>& steps) {
  auto m = MatLaurentPoly::identity(2);
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) m = m * it->inverse().matrix();
  return m;
}

inline constexpr int kRefinePasses = 2;

}  // namespace detail

/// Factor a 2x2 matrix with det A = 1 into diag(K, 1/K) followed by alternating
/// lower/upper steps. The first row (a, b) is reduced by Euclidean division via
/// right multiplication by elementary steps; the leftover triangular factor and
/// the inverted reduction steps form the factorization. Laurent division is not
/// unique (terms may be cancelled from either end), so a bounded search picks
/// the division sequence with the smallest step coefficients, starting from
/// top-first division. Rounding in the divisions is then removed by factoring
/// the near-identity correction S^-1 A and appending its steps.
inline std::vector<LiftingStep> lifting_factorize(const MatLaurentPoly& a) {
  if (a.dim() != 2) throw ValidationError("lifting factorization needs a 2x2 matrix");
  const LaurentPoly det_err = determinant(a) - LaurentPoly::constant(1.0);
  if (det_err.max_abs_coeff() > kUnimodularTol)
    throw ValidationError("determinant is not identically 1 (max coefficient error " +
                          detail::sci(det_err.max_abs_coeff()) + ")");
  const double scale = a.max_abs_coeff();
  auto steps = detail::factor_by_search(a, scale);
  double err = max_coeff_diff(lifting_recompose(steps), a);
  for (int pass = 0; pass < detail::kRefinePasses && err > 0.0; ++pass) {
    auto r = detail::recompose_inverse(steps) * a;
    auto e = r.entries();
    for (auto& x : e) x = detail::trim_rel(x, 1e-5);  // drops only rounding-level terms
    r = MatLaurentPoly::from_entries(2, e);
    if (max_coeff_diff(r, MatLaurentPoly::identity(2)) == 0.0) break;
    std::vector<LiftingStep> refined = steps;
    try {
      for (auto& s : detail::factor_by_search(r, 1.0)) refined.push_back(s);
    } catch (const FactorizationFailure&) {
      break;
    }
    refined = detail::normalize_steps(refined);
    const double refined_err = max_coeff_diff(lifting_recompose(refined), a);
    if (refined_err >= err) break;
    steps = std::move(refined);
    err = refined_err;
  }
  if (err > kRecomposeTol)
    throw FactorizationFailure("lifting steps do not reproduce the input (residual " + detail::sci(err) + ")",
                               lifting_recompose(steps) - a);
  return steps;
}

/// Zig-zag update of a two-band bank: lower l: m1 += l(z^2) m0; upper u:
/// m0 += u(z^2) m1; diag K: m0 *= K, m1 /= K. Equivalent to left-multiplying the
/// polyphase matrix by the step.
inline FilterBank lifting_step_on_filters(const FilterBank& bank, const LiftingStep& step) {
  if (bank.scale() != 2) throw ValidationError("lifting steps act on two-band banks only");
  LaurentPoly m0 = bank.filter(0), m1 = bank.filter(1);
  switch (step.kind()) {
    case LiftingStep::Kind::lower: m1 = m1 + step.poly().dilate(2) * m0; break;
    case LiftingStep::Kind::upper: m0 = m0 + step.poly().dilate(2) * m1; break;
    case LiftingStep::Kind::diag:
      m0 = m0 * step.k();
      m1 = m1 * (1.0 / step.k());
      break;
  }
  return FilterBank(2, {std::move(m0), std::move(m1)});
}

}  // namespace qmf

#endif  // QMF_DESIGN_HPP_
