// qmftool: design, verify and run filter banks from the shell.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "qmf/cli.hpp"

namespace {

void add_bank_input(CLI::App* sub, qmf::RunConfig& cfg) {
  sub->add_option("bank", cfg.input, "filter bank JSON")->required();
}

}  // namespace

int main(int argc, char** argv) {
  qmf::RunConfig cfg;
  CLI::App app{"Quadrature mirror filter banks: design, verification and wavelet algorithms"};
  app.require_subcommand(1);
  app.add_option("--grid", cfg.grid_size, "torus samples for QMF and unitarity checks")->capture_default_str();
  app.add_option("--tol", cfg.tol, "verification tolerance")->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed for randomized designs")->capture_default_str();

  auto* design = app.add_subcommand("design", "emit a filter bank JSON");
  std::string projections;
  auto* proj_opt = design->add_option("--projections", projections, "JSON list of {lambda, theta}");
  auto* rand_opt = design->add_option("--random", cfg.random_k, "k random projections (uses --seed)");
  auto* d4_opt = design->add_flag("--daubechies4", "Daubechies four-tap bank");
  auto* haar_opt = design->add_flag("--haar", "Haar bank");
  std::vector<double> angles;
  auto* six_opt = design->add_option("--six-tap", angles, "two-angle six-tap bank: THETA RHO")->expected(2);
  proj_opt->excludes(rand_opt, d4_opt, haar_opt, six_opt);
  rand_opt->excludes(d4_opt, haar_opt, six_opt);
  d4_opt->excludes(haar_opt, six_opt);
  haar_opt->excludes(six_opt);
  design->add_option("-o,--output", cfg.output, "output JSON (default stdout)");

  auto* verify = app.add_subcommand("verify", "check the QMF conditions; exit 1 on failure");
  add_bank_input(verify, cfg);
  verify->add_option("-o,--output", cfg.output, "report JSON (default stdout)");

  auto* cascade = app.add_subcommand("cascade", "scaling function by the cascade algorithm");
  add_bank_input(cascade, cfg);
  cascade->add_option("--j", cfg.j_level, "grid level J (step 2^-J)")->capture_default_str();
  cascade->add_option("--iters", cfg.iters, "iterations")->capture_default_str();
  cascade->add_option("-o,--output", cfg.output, "phi CSV")->required();
  cascade->add_option("--plot", cfg.plot, "phi SVG");
  cascade->add_option("--wavelet", cfg.wavelet, "psi CSV (suffixed _i when N > 2)");

  auto* packets = app.add_subcommand("packets", "wavelet packet decomposition into k_n.csv files");
  add_bank_input(packets, cfg);
  packets->add_option("--signal", cfg.signal, "input CSV index,re,im")->required();
  packets->add_option("--depth", cfg.depth, "full tree depth when no partition is given")->capture_default_str();
  packets->add_option("--partition", cfg.partition, "JSON list of leaves [[k, n], ...]");
  packets->add_option("-o,--output", cfg.output, "output directory")->required();

  auto* transfer = app.add_subcommand("transfer", "transfer-operator spectrum; exit 1 unless Perron-Frobenius holds");
  add_bank_input(transfer, cfg);
  transfer->add_flag("--per", cfg.per, "also check PER = 1 and the fixed-point relation");
  transfer->add_option("--n-max", cfg.n_max, "PER truncation")->capture_default_str();
  transfer->add_option("-o,--output", cfg.output, "spectrum JSON (default stdout)");

  auto* lift = app.add_subcommand("lift", "lifting factorization of a two-band bank or a det-1 polyphase matrix");
  lift->add_option("input", cfg.input, "bank JSON or matrix JSON")->required();
  lift->add_option("-o,--output", cfg.output, "steps JSON (default stdout)");

  auto* pyramid = app.add_subcommand("pyramid", "multilevel analysis into coarse.csv and detail_l_b.csv");
  add_bank_input(pyramid, cfg);
  pyramid->add_option("--signal", cfg.signal, "input CSV index,re,im")->required();
  pyramid->add_option("--levels", cfg.levels, "levels")->capture_default_str();
  pyramid->add_option("-o,--output", cfg.output, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(qmf::ExitStatus::usage);
  }

  const std::map<CLI::App*, qmf::Command> commands{
      {design, qmf::Command::design},   {verify, qmf::Command::verify}, {cascade, qmf::Command::cascade},
      {packets, qmf::Command::packets}, {transfer, qmf::Command::transfer}, {lift, qmf::Command::lift},
      {pyramid, qmf::Command::pyramid}};
  for (const auto& [sub, cmd] : commands)
    if (sub->parsed()) cfg.command = cmd;

  if (cfg.command == qmf::Command::design) {
    if (*proj_opt) {
      cfg.source = qmf::DesignSource::projections;
      cfg.input = projections;
    } else if (*rand_opt) {
      cfg.source = qmf::DesignSource::random;
    } else if (*d4_opt) {
      cfg.source = qmf::DesignSource::daubechies4;
    } else if (*haar_opt) {
      cfg.source = qmf::DesignSource::haar;
    } else if (*six_opt) {
      cfg.source = qmf::DesignSource::six_tap;
      cfg.theta = angles[0];
      cfg.rho = angles[1];
    } else {
      std::cerr << "error: design needs one of --projections, --random, --daubechies4, --haar, --six-tap\n";
      return static_cast<int>(qmf::ExitStatus::usage);
    }
  }
  return qmf::dispatch(cfg, std::cout, std::cerr);
}
