// Command-line driver: field sweeps of pair correlation measures in the
// cyclic XY chain ground state, measurement-transition scans, and the
// solver-vs-exact-diagonalization consistency check.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qcorr/ed.hpp"
#include "qcorr/sweep.hpp"
#include "qcorr/version.hpp"

namespace {

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

bool parse_separations(const std::string& text, int n,
                       std::vector<int>* seps) {
  seps->clear();
  if (text == "all" || text.empty()) return true;
  for (const std::string& tok : split_list(text)) {
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') return false;
    seps->push_back(int(v));
  }
  (void)n;
  return true;
}

int write_output(const std::string& payload, const std::string& path) {
  if (path.empty()) {
    std::cout << payload;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file '" << path << "'\n";
    return 2;
  }
  out << payload;
  return 0;
}

struct SweepOptions {
  int n = 40;
  double chi = 0.5;
  double jx = 1.0;
  double b_min = 0.0, b_max = 1.5;
  int b_steps = 300;
  std::string separations = "all";
  std::string measures = "C,E,D,I1,I2";
  std::string format = "csv";
  std::string side_limits = "both";
  std::string out_path;
};

int run_sweep_command(const SweepOptions& opt) {
  qcorr::sweep::SweepConfig cfg;
  cfg.n = opt.n;
  cfg.chi = opt.chi;
  cfg.jx = opt.jx;
  cfg.b_min = opt.b_min;
  cfg.b_max = opt.b_max;
  cfg.b_steps = opt.b_steps;
  try {
    if (!parse_separations(opt.separations, opt.n, &cfg.separations))
      throw std::invalid_argument("config field separations: bad list '" +
                                  opt.separations + "'");
    for (const std::string& tok : split_list(opt.measures))
      cfg.measures.push_back(qcorr::sweep::MeasureRequest::parse(tok));
    if (opt.format == "csv")
      cfg.format = qcorr::sweep::OutputFormat::Csv;
    else if (opt.format == "json")
      cfg.format = qcorr::sweep::OutputFormat::Json;
    else
      throw std::invalid_argument("config field format: csv or json");
    if (opt.side_limits == "both")
      cfg.side_limits = qcorr::sweep::SideLimitPolicy::Both;
    else if (opt.side_limits == "left")
      cfg.side_limits = qcorr::sweep::SideLimitPolicy::Left;
    else if (opt.side_limits == "right")
      cfg.side_limits = qcorr::sweep::SideLimitPolicy::Right;
    else
      throw std::invalid_argument(
          "config field side_limits: both, left or right");
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    const qcorr::sweep::SweepResult res = qcorr::sweep::run_sweep(cfg);
    const std::string payload =
        cfg.format == qcorr::sweep::OutputFormat::Csv
            ? qcorr::sweep::to_csv(res)
            : qcorr::sweep::to_json(res).dump(2) + "\n";
    const int wrc = write_output(payload, opt.out_path);
    if (wrc != 0) return wrc;
    if (res.any_error) {
      std::cerr << "warning: some rows failed numerically\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

struct TransitionOptions {
  int n = 40;
  double chi_min = 0.05, chi_max = 1.0;
  int chi_steps = 60;
  double jx = 1.0;
  double b_max = 1.5;
  std::string separations = "all";
  std::string format = "csv";
  std::string out_path;
};

int run_transition_command(const TransitionOptions& opt) {
  std::vector<double> chis(opt.chi_steps);
  qcorr::sweep::SweepConfig cfg;
  try {
    if (opt.chi_steps < 1)
      throw std::invalid_argument("config field chi_steps: must be >= 1");
    if (!(opt.chi_min > 0.0) || opt.chi_max > 1.0 ||
        opt.chi_min > opt.chi_max)
      throw std::invalid_argument(
          "config field chi range: need 0 < chi_min <= chi_max <= 1");
    for (int i = 0; i < opt.chi_steps; ++i)
      chis[i] = opt.chi_steps == 1
                    ? opt.chi_min
                    : opt.chi_min + (opt.chi_max - opt.chi_min) * i /
                          double(opt.chi_steps - 1);
    cfg.n = opt.n;
    cfg.jx = opt.jx;
    cfg.b_min = 0.0;
    cfg.b_max = opt.b_max;
    cfg.transition_scan = true;
    if (!parse_separations(opt.separations, opt.n, &cfg.separations))
      throw std::invalid_argument("config field separations: bad list");
    if (opt.format != "csv" && opt.format != "json")
      throw std::invalid_argument("config field format: csv or json");
    cfg.chi = chis.front();
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    std::vector<qcorr::sweep::TransitionRecord> all;
    for (double chi : chis) {
      cfg.chi = chi;
      auto recs = qcorr::sweep::scan_measurement_transition(cfg);
      all.insert(all.end(), recs.begin(), recs.end());
    }
    const std::string payload =
        opt.format == "csv"
            ? qcorr::sweep::transition_csv(all)
            : qcorr::sweep::transition_json(all, cfg).dump(2) + "\n";
    return write_output(payload, opt.out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

struct OracleOptions {
  int n = 8;
  double jx = 1.0;
  double tolerance = 1e-10;
};

// Compares the Jordan-Wigner pair states and sector energies against dense
// exact diagonalization over the standard validation grid.
int run_oracle_check(const OracleOptions& opt) {
  if (opt.n < 4 || opt.n % 2 != 0 || opt.n > qcorr::ed::kMaxSites) {
    std::cerr << "usage error: oracle-check needs even n in [4, 12]\n";
    return 1;
  }
  const std::vector<double> chis = {0.25, 0.5, 1.0};
  double worst_rho = 0.0, worst_e = 0.0;
  bool ok = true;
  try {
    for (double chi : chis) {
      std::vector<double> bs = {0.0, 0.3, 1.0, 1.5};
      if (chi < 1.0) bs.insert(bs.begin() + 2, std::sqrt(chi) * opt.jx);
      for (double b : bs) {
        const auto params =
            qcorr::ChainParams::make(opt.n, opt.jx, chi * opt.jx, b);
        double dev_rho = 0.0, dev_e = 0.0;
        for (int parity : {+1, -1}) {
          const auto jw = qcorr::mode_energies(params, parity);
          const auto edst = qcorr::ed::ground_state_sector(params, parity);
          dev_e = std::max(dev_e,
                           std::abs(jw.vacuum_energy - edst.energy));
          const auto corr =
              qcorr::pair_correlators(jw, params.n / 2);
          for (int L = 1; L <= params.n / 2; ++L) {
            const qcorr::XState a = qcorr::pair_rdm_from(corr, L);
            const qcorr::XState e = qcorr::ed::reduce_pair(edst, 0, L);
            for (double d :
                 {a.a_plus - e.a_plus, a.a_minus - e.a_minus,
                  a.c_plus - e.c_plus, a.c_minus - e.c_minus,
                  a.alpha - e.alpha, a.beta - e.beta})
              dev_rho = std::max(dev_rho, std::abs(d));
          }
        }
        std::printf("chi=%-5g B=%-8g max|drho|=%.3e max|dE|=%.3e\n", chi, b,
                    dev_rho, dev_e);
        worst_rho = std::max(worst_rho, dev_rho);
        worst_e = std::max(worst_e, dev_e);
        if (dev_rho > opt.tolerance || dev_e > 100 * opt.tolerance)
          ok = false;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::printf("oracle-check n=%d: worst|drho|=%.3e worst|dE|=%.3e -> %s\n",
              opt.n, worst_rho, worst_e, ok ? "PASS" : "FAIL");
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qcorr: quantum correlations of spin pairs in finite cyclic XY "
      "chains (concurrence, discord, information deficits)"};
  app.set_version_flag("--version", qcorr::kVersion);
  app.require_subcommand(1);

  SweepOptions sw;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "sweep the transverse field and emit measure columns");
  sweep_cmd->add_option("--n", sw.n, "chain length (even)");
  sweep_cmd->add_option("--chi", sw.chi, "anisotropy Jy/Jx");
  sweep_cmd->add_option("--jx", sw.jx, "coupling Jx (energy unit)");
  sweep_cmd->add_option("--b-min", sw.b_min, "first field value");
  sweep_cmd->add_option("--b-max", sw.b_max, "last field value");
  sweep_cmd->add_option("--b-steps", sw.b_steps, "number of field points");
  sweep_cmd->add_option("--L", sw.separations,
                        "separations: comma list or 'all'");
  sweep_cmd->add_option(
      "--measures", sw.measures,
      "comma list from C,E,D,I1,I2,Iq(q),IRq(q),gamma_D,gamma_I1,gamma_I2");
  sweep_cmd->add_option("--format", sw.format, "csv or json");
  sweep_cmd->add_option("--side-limits", sw.side_limits,
                        "rows at degenerate fields: both, left or right");
  sweep_cmd->add_option("--out", sw.out_path, "output file (default stdout)");
  sweep_cmd->set_config("--config", "",
                        "flat key=value config file (flags override)");

  TransitionOptions tr;
  CLI::App* trans_cmd = app.add_subcommand(
      "transition",
      "locate the measurement transition of I2 (sharp) and I1 (interval)");
  trans_cmd->add_option("--n", tr.n, "chain length (even)");
  trans_cmd->add_option("--chi-min", tr.chi_min, "first anisotropy");
  trans_cmd->add_option("--chi-max", tr.chi_max, "last anisotropy");
  trans_cmd->add_option("--chi-steps", tr.chi_steps, "anisotropy points");
  trans_cmd->add_option("--jx", tr.jx, "coupling Jx");
  trans_cmd->add_option("--b-max", tr.b_max, "scan window upper field");
  trans_cmd->add_option("--L", tr.separations,
                        "separations: comma list or 'all'");
  trans_cmd->add_option("--format", tr.format, "csv or json");
  trans_cmd->add_option("--out", tr.out_path, "output file");

  OracleOptions oc;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle-check",
      "compare the solver against dense exact diagonalization");
  oracle_cmd->add_option("--n", oc.n, "chain length (even, <= 12)");
  oracle_cmd->add_option("--jx", oc.jx, "coupling Jx");
  oracle_cmd->add_option("--tolerance", oc.tolerance,
                         "coefficient tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (sweep_cmd->parsed()) return run_sweep_command(sw);
  if (trans_cmd->parsed()) return run_transition_command(tr);
  if (oracle_cmd->parsed()) return run_oracle_check(oc);
  return 1;
}
