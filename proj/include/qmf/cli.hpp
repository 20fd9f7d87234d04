#ifndef QMF_CLI_HPP_
#define QMF_CLI_HPP_

// Batch workflows behind the qmftool command line.
//
// Exit status: 0 success, 1 a verification failed (QMF, Perron-Frobenius,
// round trip, factorization), 2 bad usage or malformed input.
//
// Numeric defaults:
//
//   grid_size  1024     torus samples for QMF / unitarity checks
//   tol        1e-9     verification tolerance
//   j_level    10       cascade grid 2^-J
//   iters      12       cascade iterations
//   depth      3        packet tree depth
//   levels     3        pyramid levels
//   n_max      10000    PER truncation

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qmf/cascade.hpp"
#include "qmf/design.hpp"
#include "qmf/errors.hpp"
#include "qmf/filterbank.hpp"
#include "qmf/io.hpp"
#include "qmf/laurent.hpp"
#include "qmf/operators.hpp"
#include "qmf/transfer.hpp"

namespace qmf {

enum class ExitStatus : int { ok = 0, verification_failed = 1, usage = 2 };

enum class Command { design, verify, cascade, packets, transfer, lift, pyramid };

enum class DesignSource { projections, random, daubechies4, haar, six_tap };

struct RunConfig {
  Command command = Command::verify;
  std::string input;      // bank, matrix or parameter file
  std::string output;     // file, or directory for packets/pyramid; empty writes to the stream
  std::string plot;       // cascade SVG
  std::string wavelet;    // cascade wavelet CSV
  std::string signal;     // packets/pyramid input CSV
  std::string partition;  // packets leaf list JSON [[k, n], ...]

  DesignSource source = DesignSource::projections;
  int random_k = 4;
  double theta = 0.0, rho = 0.0;
  std::uint64_t seed = 0;

  int grid_size = kDefaultGrid;
  double tol = kDefaultTol;
  int j_level = kDefaultJ;
  int iters = kDefaultIters;
  int depth = 3;
  int levels = 3;
  int n_max = kDefaultNmax;
  bool per = false;  // transfer: also run the PER and fixed-point checks

  void validate() const {
    if (grid_size < 2) throw ValidationError("--grid must be at least 2");
    if (!(tol > 0.0)) throw ValidationError("--tol must be positive");
    if (j_level < 0 || j_level > 24) throw ValidationError("--j must lie in [0, 24]");
    if (iters < 1) throw ValidationError("--iters must be at least 1");
    if (depth < 0 || depth > 20) throw ValidationError("--depth must lie in [0, 20]");
    if (levels < 1) throw ValidationError("--levels must be at least 1");
    if (n_max < 100) throw ValidationError("--n-max must be at least 100");
    if (random_k < 0) throw ValidationError("--random must be nonnegative");
    const bool needs_input = command != Command::design || source == DesignSource::projections;
    if (needs_input && input.empty()) throw ValidationError("missing input file");
    if ((command == Command::packets || command == Command::pyramid) && signal.empty())
      throw ValidationError("missing --signal");
    if ((command == Command::packets || command == Command::pyramid) && output.empty())
      throw ValidationError("missing output directory -o");
    if (command == Command::cascade && output.empty()) throw ValidationError("missing output CSV -o");
  }
};

namespace detail {

inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    write_text(path, text);
}

inline FilterBank load_bank(const std::string& path) {
  return load_json_file(path, [](const json& j) { return bank_from_json(j); });
}

inline Signal load_signal(const std::string& path) { return signal_from_csv(read_file(path), path); }

inline double relative_scale(const Signal& c) { return 1.0 + std::sqrt(c.energy()); }

inline ExitStatus run_design(const RunConfig& cfg, std::ostream& out) {
  FilterBank bank;
  switch (cfg.source) {
    case DesignSource::daubechies4: bank = daubechies4(); break;
    case DesignSource::haar: bank = haar_bank(); break;
    case DesignSource::six_tap: bank = six_tap_from_angles(cfg.theta, cfg.rho); break;
    case DesignSource::random: {
      std::mt19937_64 rng(cfg.seed);
      const auto params = random_projection_params(cfg.random_k, rng);
      bank = filters_from_polyphase(unitary_from_projections(params));
      break;
    }
    case DesignSource::projections: {
      const auto params = load_json_file(cfg.input, [](const json& j) {
        const json& list = j.is_array() ? j : require(j, "projections", "");
        if (!list.is_array()) throw ParseError("json", 0, "/projections", "expected an array");
        std::vector<ProjectionParam> ps;
        for (std::size_t i = 0; i < list.size(); ++i)
          ps.push_back(projection_param_from_json(list[i], "/projections/" + std::to_string(i)));
        return ps;
      });
      bank = filters_from_polyphase(unitary_from_projections(params));
      break;
    }
  }
  emit(cfg.output, to_json(bank).dump(2) + "\n", out);
  return ExitStatus::ok;
}

inline ExitStatus run_verify(const RunConfig& cfg, std::ostream& out) {
  const FilterBank bank = load_bank(cfg.input);
  const QmfReport q = check_qmf(bank, cfg.grid_size, cfg.tol);
  const MatLaurentPoly a = polyphase_from_filters(bank);
  const UnitarityReport u = is_unitary_on_torus(a, std::max(cfg.grid_size, 2 * std::max(a.max_deg() - a.min_deg(), 0) + 1), cfg.tol);
  json rep = {{"qmf_pass", q.pass},      {"max_residual", q.max_residual}, {"lowpass_ok", q.lowpass_ok},
              {"unitary", u.unitary},    {"unitary_residual", u.residual}};
  try {
    rep["k1_class"] = k1_class(a, cfg.grid_size);
  } catch (const SingularOnTorus& e) {
    rep["k1_class"] = nullptr;
    rep["singular_min_modulus"] = e.min_modulus();
  }
  emit(cfg.output, rep.dump(2) + "\n", out);
  return q.pass && q.lowpass_ok ? ExitStatus::ok : ExitStatus::verification_failed;
}

inline ExitStatus run_cascade(const RunConfig& cfg, std::ostream& out) {
  const FilterBank bank = load_bank(cfg.input);
  const CascadeResult res = scaling_function(bank, cfg.j_level, cfg.iters);
  write_text(cfg.output, grid_to_csv(res.phi));
  if (!cfg.plot.empty()) write_text(cfg.plot, grid_to_svg(res.phi));
  if (!cfg.wavelet.empty()) {
    const auto psi = wavelet_from_scaling(bank, res.phi);
    for (std::size_t i = 0; i < psi.size(); ++i) {
      std::string path = cfg.wavelet;
      if (psi.size() > 1) {
        const auto p = std::filesystem::path(cfg.wavelet);
        path = (p.parent_path() / (p.stem().string() + "_" + std::to_string(i + 1) + p.extension().string())).string();
      }
      write_text(path, grid_to_csv(psi[i]));
    }
  }
  json rep = {{"iterations", res.iterations}, {"converged", res.converged}, {"diverged", res.diverged},
              {"log", res.log}, {"support", {res.phi.x(res.phi.support_lo), res.phi.x(res.phi.support_hi)}}};
  out << rep.dump(2) << "\n";
  return ExitStatus::ok;
}

inline PacketPartition load_partition(const RunConfig& cfg, int scale_n) {
  if (cfg.partition.empty()) return PacketPartition::full(cfg.depth, scale_n);
  return load_json_file(cfg.partition, [scale_n](const json& j) {
    const json& list = j.is_array() ? j : require(j, "leaves", "");
    if (!list.is_array()) throw ParseError("json", 0, "/leaves", "expected an array of [k, n]");
    std::set<PacketNode> leaves;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = "/leaves/" + std::to_string(i);
      if (!list[i].is_array() || list[i].size() != 2) throw ParseError("json", 0, p, "expected [k, n]");
      leaves.insert({int_at(list[i][0], p + "/0"), int_at(list[i][1], p + "/1")});
    }
    try {
      return PacketPartition(std::move(leaves), scale_n);
    } catch (const ValidationError& e) {
      throw ParseError("json", 0, "/leaves", e.what());
    }
  });
}

inline ExitStatus run_packets(const RunConfig& cfg, std::ostream& out) {
  const FilterBank bank = load_bank(cfg.input);
  const Signal c = load_signal(cfg.signal);
  const PacketPartition part = load_partition(cfg, bank.scale());
  const PacketBands bands = packet_decompose(c, bank, part);
  std::filesystem::create_directories(cfg.output);
  double energy = 0.0;
  for (const auto& [node, sig] : bands) {
    energy += sig.energy();
    write_text((std::filesystem::path(cfg.output) / (std::to_string(node.k) + "_" + std::to_string(node.n) + ".csv")).string(),
               signal_to_csv(sig));
  }
  const double err = l2_diff(packet_reconstruct(bands, bank, part), c);
  const json rep = {{"leaves", bands.size()}, {"input_energy", c.energy()}, {"packet_energy", energy},
                    {"reconstruction_error", err}};
  out << rep.dump(2) << "\n";
  return err <= cfg.tol * relative_scale(c) ? ExitStatus::ok : ExitStatus::verification_failed;
}

inline ExitStatus run_transfer(const RunConfig& cfg, std::ostream& out) {
  const FilterBank bank = load_bank(cfg.input);
  const TransferSpec spec = TransferSpec::for_bank(bank);
  const SpectrumReport sr = spectrum(spec);
  json rep = to_json(sr);
  rep["band_m"] = spec.band_m;
  bool ok = sr.pf_holds;
  if (cfg.per) {
    const PerReport pr = per_check(bank, 64, cfg.n_max);
    rep["per_max_dev"] = pr.max_dev_from_1;
    rep["per_tail_estimate"] = pr.tail_estimate;
    rep["per_constant_1"] = pr.is_constant_1;
    std::vector<double> f(pr.values.begin(), pr.values.end());
    rep["fixed_point_residual"] = fixed_point_check(bank, f);
    ok = ok && pr.is_constant_1;
  }
  emit(cfg.output, rep.dump(2) + "\n", out);
  return ok ? ExitStatus::ok : ExitStatus::verification_failed;
}

inline ExitStatus run_lift(const RunConfig& cfg, std::ostream& out) {
  const json j = parse_json(read_file(cfg.input), cfg.input);
  MatLaurentPoly a(2, 0, {});
  json rep = json::object();
  if (j.contains("N")) {
    const FilterBank bank = load_bank(cfg.input);
    if (bank.scale() != 2) throw ValidationError("lifting needs a two-band bank");
    a = polyphase_from_filters(bank);
    // det A = c z^d for a QMF bank; dividing row 1 by c z^d makes it 1
    const LaurentPoly det = determinant(a).trimmed(kMonomialTol * std::max(1.0, determinant(a).max_abs_coeff()));
    if (!det.is_monomial()) throw ValidationError("polyphase determinant is not a monomial");
    const cplx c = det.coeffs()[0];
    const int d = det.min_deg();
    const LaurentPoly inv = LaurentPoly::monomial(1.0 / c, -d);
    a = MatLaurentPoly::from_entries(2, {a.entry(0, 0), a.entry(0, 1), a.entry(1, 0) * inv, a.entry(1, 1) * inv});
    rep["highpass_divided_by"] = {{"c", to_json(c)}, {"d", d}};
  } else {
    a = load_json_file(cfg.input, [](const json& m) { return mat_laurent_from_json(m); });
  }
  std::vector<LiftingStep> steps;
  try {
    steps = lifting_factorize(a);
  } catch (const FactorizationFailure& e) {
    rep["error"] = e.what();
    rep["residual"] = to_json(e.residual());
    emit(cfg.output, rep.dump(2) + "\n", out);
    return ExitStatus::verification_failed;
  }
  json js = json::array();
  for (const auto& s : steps) js.push_back(to_json(s));
  rep["steps"] = js;
  rep["recompose_residual"] = max_coeff_diff(lifting_recompose(steps), a);
  emit(cfg.output, rep.dump(2) + "\n", out);
  return ExitStatus::ok;
}

inline ExitStatus run_pyramid(const RunConfig& cfg, std::ostream& out) {
  const FilterBank bank = load_bank(cfg.input);
  const Signal c = load_signal(cfg.signal);
  const Pyramid p = pyramid_decompose(c, bank, cfg.levels);
  std::filesystem::create_directories(cfg.output);
  const std::filesystem::path dir(cfg.output);
  write_text((dir / "coarse.csv").string(), signal_to_csv(p.coarse));
  for (std::size_t l = 0; l < p.details.size(); ++l)
    for (std::size_t b = 0; b < p.details[l].size(); ++b)
      write_text((dir / ("detail_" + std::to_string(l + 1) + "_" + std::to_string(b + 1) + ".csv")).string(),
                 signal_to_csv(p.details[l][b]));
  const double err = l2_diff(pyramid_reconstruct(p, bank), c);
  const json rep = {{"levels", cfg.levels}, {"reconstruction_error", err}};
  out << rep.dump(2) << "\n";
  return err <= cfg.tol * relative_scale(c) ? ExitStatus::ok : ExitStatus::verification_failed;
}

}  // namespace detail

/// Runs one workflow; diagnostics go to `err`.
inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    ExitStatus s = ExitStatus::ok;
    switch (cfg.command) {
      case Command::design: s = detail::run_design(cfg, out); break;
      case Command::verify: s = detail::run_verify(cfg, out); break;
      case Command::cascade: s = detail::run_cascade(cfg, out); break;
      case Command::packets: s = detail::run_packets(cfg, out); break;
      case Command::transfer: s = detail::run_transfer(cfg, out); break;
      case Command::lift: s = detail::run_lift(cfg, out); break;
      case Command::pyramid: s = detail::run_pyramid(cfg, out); break;
    }
    return static_cast<int>(s);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::usage);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::usage);
  } catch (const InvalidOperand& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::usage);
  } catch (const Error& e) {
    err << "failed: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::verification_failed);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::usage);
  }
}

}  // namespace qmf

#endif  // QMF_CLI_HPP_
