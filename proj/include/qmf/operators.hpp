#ifndef QMF_OPERATORS_HPP_
#define QMF_OPERATORS_HPP_

// Sequence-domain filter bank algorithms on finitely supported signals.
//
// A Signal c is identified with f(z) = sum_n c_n z^n. For a bank {m_j}:
//
//   analysis   (S_j* c)(z) = (1/N) sum_{w^N=z} conj(m_j(w)) f(w)
//                          = downsample(m_j* conv c, N)
//   synthesis  (S_j d)(z)  = m_j(z) d(z^N) = m_j conv upsample(d, N)
//
// Everything lives on Z; there is no periodization, so supports grow.
//
// Normalization: the operators are unitary (S_j* S_j = 1 for a QMF bank), so
// the Haar split of (a, b) is ((a+b)/sqrt2, (a-b)/sqrt2). Expansions of the
// scaling function that skip the 2^{-1/2} factor show (a+-b)/2 instead.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qmf/errors.hpp"
#include "qmf/filterbank.hpp"
#include "qmf/laurent.hpp"

namespace qmf {

class Signal {
 public:
  Signal() = default;
  Signal(int offset, std::vector<cplx> samples) : offset_(offset), samples_(std::move(samples)) { trim(); }

  static Signal impulse(int at) { return Signal(at, {1.0}); }

  int offset() const { return offset_; }
  int last() const { return offset_ + static_cast<int>(samples_.size()) - 1; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  std::span<const cplx> samples() const { return samples_; }

  cplx operator[](int index) const {
    const int k = index - offset_;
    if (k < 0 || k >= static_cast<int>(samples_.size())) return {};
    return samples_[static_cast<std::size_t>(k)];
  }

  double energy() const {
    double e = 0.0;
    for (const auto& s : samples_) e += std::norm(s);
    return e;
  }

  friend Signal operator+(const Signal& a, const Signal& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    const int lo = std::min(a.offset_, b.offset_), hi = std::max(a.last(), b.last());
    std::vector<cplx> out(static_cast<std::size_t>(hi - lo + 1));
    for (int i = lo; i <= hi; ++i) out[static_cast<std::size_t>(i - lo)] = a[i] + b[i];
    return Signal(lo, std::move(out));
  }

  friend Signal operator-(const Signal& a, const Signal& b) {
    std::vector<cplx> neg(b.samples_);
    for (auto& s : neg) s = -s;
    return a + Signal(b.offset_, std::move(neg));
  }

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  void trim() {
    auto nz = [](cplx c) { return c != cplx{}; };
    auto first = std::find_if(samples_.begin(), samples_.end(), nz);
    if (first == samples_.end()) {
      samples_.clear();
      offset_ = 0;
      return;
    }
    auto last = std::find_if(samples_.rbegin(), samples_.rend(), nz);
    samples_.erase(last.base(), samples_.end());
    offset_ += static_cast<int>(first - samples_.begin());
    samples_.erase(samples_.begin(), first);
  }

  int offset_ = 0;
  std::vector<cplx> samples_;
};

/// sum_n conj(a_n) b_n
inline cplx inner(const Signal& a, const Signal& b) {
  cplx s{};
  if (a.empty() || b.empty()) return s;
  for (int i = std::max(a.offset(), b.offset()); i <= std::min(a.last(), b.last()); ++i)
    s += std::conj(a[i]) * b[i];
  return s;
}

inline double max_abs_diff(const Signal& a, const Signal& b) {
  const Signal d = a - b;
  double m = 0.0;
  for (const auto& s : d.samples()) m = std::max(m, std::abs(s));
  return m;
}

inline double l2_diff(const Signal& a, const Signal& b) { return std::sqrt((a - b).energy()); }

/// Keeps samples at multiples of n, re-indexed by /n.
inline Signal downsample(const Signal& c, int n) {
  if (n < 2) throw ValidationError("sampling factor must be at least 2");
  if (c.empty()) return {};
  const int lo = floor_div(c.offset() + n - 1, n), hi = floor_div(c.last(), n);
  if (hi < lo) return {};
  std::vector<cplx> out(static_cast<std::size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) out[static_cast<std::size_t>(k - lo)] = c[k * n];
  return Signal(lo, std::move(out));
}

/// Inserts n-1 zeros between samples: (up c)_{nk} = c_k.
inline Signal upsample(const Signal& c, int n) {
  if (n < 2) throw ValidationError("sampling factor must be at least 2");
  if (c.empty()) return {};
  std::vector<cplx> out((c.size() - 1) * static_cast<std::size_t>(n) + 1);
  for (std::size_t k = 0; k < c.size(); ++k) out[k * static_cast<std::size_t>(n)] = c.samples()[k];
  return Signal(c.offset() * n, std::move(out));
}

/// Convolution with the coefficient sequence of a Laurent polynomial.
inline Signal convolve(const LaurentPoly& filter, const Signal& c) {
  if (filter.is_zero() || c.empty()) return {};
  std::vector<cplx> out(filter.size() + c.size() - 1);
  const auto f = filter.coeffs();
  const auto s = c.samples();
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) out[i + j] += f[i] * s[j];
  return Signal(filter.min_deg() + c.offset(), std::move(out));
}

/// Band j = S_j* c.
inline Signal analyze_band(const Signal& c, const FilterBank& bank, int j) {
  return downsample(convolve(bank.filter(j).adjoint(), c), bank.scale());
}

/// S_j d.
inline Signal synthesize_band(const Signal& d, const FilterBank& bank, int j) {
  return convolve(bank.filter(j), upsample(d, bank.scale()));
}

inline std::vector<Signal> analyze(const Signal& c, const FilterBank& bank) {
  std::vector<Signal> bands;
  bands.reserve(static_cast<std::size_t>(bank.scale()));
  for (int j = 0; j < bank.scale(); ++j) bands.push_back(analyze_band(c, bank, j));
  return bands;
}

/// sum_j S_j band_j.
inline Signal synthesize(std::span<const Signal> bands, const FilterBank& bank) {
  if (bands.size() != static_cast<std::size_t>(bank.scale()))
    throw ValidationError("synthesis needs " + std::to_string(bank.scale()) + " bands, got " +
                          std::to_string(bands.size()));
  Signal out;
  for (int j = 0; j < bank.scale(); ++j) out = out + synthesize_band(bands[static_cast<std::size_t>(j)], bank, j);
  return out;
}

struct Pyramid {
  Signal coarse;
  /// details[l] holds the N-1 high-pass bands produced at level l+1.
  std::vector<std::vector<Signal>> details;
};

inline Pyramid pyramid_decompose(const Signal& c, const FilterBank& bank, int levels) {
  if (levels < 1) throw ValidationError("pyramid needs at least one level");
  Pyramid p;
  p.coarse = c;
  for (int l = 0; l < levels; ++l) {
    auto bands = analyze(p.coarse, bank);
    p.coarse = std::move(bands.front());
    bands.erase(bands.begin());
    p.details.push_back(std::move(bands));
  }
  return p;
}

inline Signal pyramid_reconstruct(const Pyramid& p, const FilterBank& bank) {
  Signal c = p.coarse;
  for (auto it = p.details.rbegin(); it != p.details.rend(); ++it) {
    if (it->size() != static_cast<std::size_t>(bank.scale() - 1))
      throw ValidationError("pyramid level has the wrong number of detail bands");
    std::vector<Signal> bands{c};
    bands.insert(bands.end(), it->begin(), it->end());
    c = synthesize(bands, bank);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Wavelet packets
//
// Node (k, n) is reached by k analysis steps; its children are (k+1, N n + i),
// i = 0..N-1, obtained by applying S_i*. Equivalently, with n written in base N
// as i_1 i_2 ... i_k (most significant first), the node holds
// S_{i_k}* ... S_{i_1}* c. Within a tree of depth d the node covers the index
// interval {n N^(d-k), ..., (n+1) N^(d-k) - 1} of {0, ..., N^d - 1}.
//
// With the Haar bank the full-depth leaves in increasing n are the Walsh
// functions in Paley (bit-reversed sequency) order.

struct PacketNode {
  int k = 0;
  int n = 0;
  friend auto operator<=>(const PacketNode&, const PacketNode&) = default;
};

class PacketPartition {
 public:
  PacketPartition(std::set<PacketNode> leaves, int scale_n = 2) : leaves_(std::move(leaves)), scale_n_(scale_n) {
    validate();
  }

  const std::set<PacketNode>& leaves() const { return leaves_; }
  int scale() const { return scale_n_; }
  int depth() const { return depth_; }

  /// First and one-past-last covered index at full depth.
  std::pair<long, long> interval(const PacketNode& node) const {
    const long width = ipow(scale_n_, depth_ - node.k);
    return {node.n * width, (node.n + 1) * width};
  }

  /// All leaves at depth d.
  static PacketPartition full(int depth, int scale_n = 2) {
    std::set<PacketNode> leaves;
    for (int n = 0; n < ipow(scale_n, depth); ++n) leaves.insert({depth, n});
    return PacketPartition(std::move(leaves), scale_n);
  }

 private:
  static long ipow(int b, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
  }

  void validate() {
    if (scale_n_ < 2) throw ValidationError("packet scale must be at least 2");
    if (leaves_.empty()) throw ValidationError("packet partition has no leaves");
    depth_ = 0;
    for (const auto& l : leaves_) {
      if (l.k < 0 || l.n < 0) throw ValidationError("packet node indices must be nonnegative");
      if (l.k > 20) throw ValidationError("packet depth above 20 is not supported");
      if (l.n >= ipow(scale_n_, l.k))
        throw ValidationError("packet node (" + std::to_string(l.k) + "," + std::to_string(l.n) +
                              ") does not exist at depth " + std::to_string(l.k));
      depth_ = std::max(depth_, l.k);
    }
    const long total = ipow(scale_n_, depth_);
    std::vector<int> hits(static_cast<std::size_t>(total), 0);
    for (const auto& l : leaves_) {
      const auto [a, b] = interval(l);
      for (long i = a; i < b; ++i) ++hits[static_cast<std::size_t>(i)];
    }
    std::ostringstream overlap, missing;
    bool bad = false;
    for (long i = 0; i < total; ++i) {
      if (hits[static_cast<std::size_t>(i)] > 1) overlap << ' ' << i, bad = true;
      if (hits[static_cast<std::size_t>(i)] == 0) missing << ' ' << i, bad = true;
    }
    if (bad)
      throw ValidationError("invalid packet partition at depth " + std::to_string(depth_) +
                            "; overlapping indices:" + (overlap.str().empty() ? " none" : overlap.str()) +
                            "; missing indices:" + (missing.str().empty() ? " none" : missing.str()));
  }

  std::set<PacketNode> leaves_;
  int scale_n_ = 2;
  int depth_ = 0;
};

using PacketBands = std::map<PacketNode, Signal>;

inline PacketBands packet_decompose(const Signal& c, const FilterBank& bank, const PacketPartition& partition) {
  if (partition.scale() != bank.scale()) throw ValidationError("partition and bank scales differ");
  const int n = bank.scale();
  PacketBands out;
  // depth-first descent, visiting only nodes that are ancestors of leaves
  std::vector<std::pair<PacketNode, Signal>> stack{{{0, 0}, c}};
  while (!stack.empty()) {
    auto [node, sig] = std::move(stack.back());
    stack.pop_back();
    if (partition.leaves().contains(node)) {
      out.emplace(node, std::move(sig));
      continue;
    }
    for (int i = 0; i < n; ++i) stack.push_back({{node.k + 1, node.n * n + i}, analyze_band(sig, bank, i)});
  }
  return out;
}

inline Signal packet_reconstruct(const PacketBands& bands, const FilterBank& bank, const PacketPartition& partition) {
  const int n = bank.scale();
  std::map<PacketNode, Signal> level(bands.begin(), bands.end());
  for (const auto& leaf : partition.leaves())
    if (!level.contains(leaf))
      throw ValidationError("missing packet band (" + std::to_string(leaf.k) + "," + std::to_string(leaf.n) + ")");
  for (int k = partition.depth(); k > 0; --k) {
    std::map<PacketNode, std::vector<Signal>> parents;
    for (auto it = level.begin(); it != level.end();) {
      if (it->first.k != k) {
        ++it;
        continue;
      }
      auto& slot = parents[{k - 1, it->first.n / n}];
      slot.resize(static_cast<std::size_t>(n));
      slot[static_cast<std::size_t>(it->first.n % n)] = std::move(it->second);
      it = level.erase(it);
    }
    for (auto& [parent, children] : parents) level[parent] = synthesize(children, bank);
  }
  return level.at({0, 0});
}

// ---------------------------------------------------------------------------

/// The 2^(n+2) square matrix built from the coefficient blocks
/// A_k = [[a_2k, a_2k+1], [b_2k, b_2k+1]] of a 2n+2 tap two-band bank: rows 2r
/// and 2r+1 carry a_k and b_k in column (k - 1 + 2r) mod 2^(n+2). It is
/// unitary exactly when the bank satisfies the QMF conditions.
inline CMatrix build_big_unitary(const FilterBank& bank) {
  if (bank.scale() != 2) throw ValidationError("big wavelet matrix needs a two-band bank");
  const auto& m0 = bank.filter(0);
  const auto& m1 = bank.filter(1);
  if (m0.is_zero() || m0.min_deg() < 0)
    throw ValidationError("low-pass filter must have coefficients a_0..a_{2n+1}");
  const int taps = m0.max_deg() + 1;
  if (taps < 4 || taps % 2 != 0)
    throw ValidationError("big wavelet matrix needs 2n+2 >= 4 low-pass taps, got " + std::to_string(taps));
  if (!m1.is_zero() && (m1.min_deg() < 0 || m1.max_deg() >= taps))
    throw ValidationError("high-pass filter must be supported on 0.." + std::to_string(taps - 1));
  const int half = taps / 2;  // n + 1
  const int size = 1 << (half + 1);
  CMatrix u = CMatrix::Zero(size, size);
  for (int r = 0; r < size / 2; ++r)
    for (int k = 0; k < taps; ++k) {
      const int col = floor_mod(k - 1 + 2 * r, size);
      u(2 * r, col) = m0[k];
      u(2 * r + 1, col) = m1[k];
    }
  return u;
}

}  // namespace qmf

#endif  // QMF_OPERATORS_HPP_
