#include "cssdual/cli.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cssdual/classical.hpp"
#include "cssdual/config.hpp"
#include "cssdual/criticality.hpp"
#include "cssdual/duality.hpp"
#include "cssdual/errors.hpp"
#include "cssdual/format.hpp"
#include "cssdual/hypergraph.hpp"
#include "cssdual/quantum.hpp"

namespace cssdual {

namespace {

struct RunConfig {
  std::uint64_t master_seed = kDefaultSeed;
  unsigned threads = 1;
  Caps caps;
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--seed", cfg.master_seed, "master seed (all randomness)");
  cmd->add_option("--threads", cfg.threads,
                  "worker threads; never changes output bytes");
  cmd->add_option("--dense-cap", cfg.caps.dense_cap,
                  "max qubits for dense verification");
  cmd->add_option("--enum-cap", cfg.caps.enum_cap,
                  "max span dimension for 2^M enumeration");
  cmd->add_option("--exact-cap", cfg.caps.exact_cap,
                  "max spins for exact classical enumeration");
}

void print_summary(const Hypergraph& h, std::ostream& out, std::ostream& err) {
  const StabilizerSpec spec = stabilizer_spec(h);
  out << "N=" << h.n_vertices() << " |E|=" << h.n_edges() << " M=" << spec.m
      << " K=" << spec.k << "\n";
  if (h.has_duplicate_edges())
    err << "warning: hypergraph contains duplicate hyperedges\n";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw validation_error("cannot open output file: " + path);
  return f;
}

nlohmann::json ground_state_json(const GroundStateReport& r) {
  return {{"beta", r.beta},
          {"k", r.k},
          {"max_q_residual", r.max_q_residual},
          {"max_b_residual", r.max_b_residual},
          {"energy_expectation", r.energy_expectation},
          {"min_eigenvalue", r.min_eigenvalue},
          {"spectral_gap", r.spectral_gap},
          {"pass", r.all_pass()}};
}

int cmd_build(const std::string& family, std::size_t n, std::size_t L,
              const std::string& in_path, const std::string& out_path,
              std::ostream& out, std::ostream& err) {
  Hypergraph h;
  if (family == "ghz_ring")
    h = ghz_ring(n);
  else if (family == "ising_square")
    h = ising_square(L);
  else if (family == "toric_code")
    h = toric_code(L).hypergraph;
  else if (family == "from-file")
    h = read_hypergraph_file(in_path);
  else
    throw validation_error("unknown family: " + family);
  if (!out_path.empty()) write_hypergraph_file(h, out_path);
  print_summary(h, out, err);
  return kExitOk;
}

int cmd_dual(const std::string& in_path, const std::string& out_path,
             std::ostream& out, std::ostream& err) {
  const Hypergraph h = read_hypergraph_file(in_path);
  const Hypergraph d = dual(h);
  if (!out_path.empty()) write_hypergraph_file(d, out_path);
  print_summary(d, out, err);
  return kExitOk;
}

int cmd_verify(const std::string& in_path, std::vector<double> betas,
               double fid_beta, std::vector<double> dbetas,
               const std::string& out_path, const RunConfig& cfg,
               std::ostream& out, std::ostream& err) {
  const Hypergraph h = read_hypergraph_file(in_path);
  if (betas.empty())
    betas.assign(kDefaultBetaGrid.begin(), kDefaultBetaGrid.end());
  if (dbetas.empty()) dbetas = {1e-1, 1e-2, 1e-3};

  const auto corr =
      verify_partition_correspondence(h, betas, cfg.caps, cfg.threads);
  const auto mag = verify_magnetization_energy(h, betas, cfg.caps, cfg.threads);
  const auto fid =
      verify_fidelity_heat_capacity(h, fid_beta, dbetas, cfg.caps, cfg.threads);

  nlohmann::json gs = nlohmann::json::array();
  bool gs_pass = true;
  for (double beta : {0.0, 0.5, 1.0}) {
    const GroundStateReport r = verify_ground_state(h, beta, cfg.caps);
    gs.push_back(ground_state_json(r));
    gs_pass = gs_pass && r.all_pass();
  }

  const bool all_pass = corr.pass && mag.pass && fid.pass && gs_pass;
  nlohmann::json report = {
      {"n_qubits", h.n_vertices()},
      {"n_edges", h.n_edges()},
      {"partition_correspondence", to_json(corr)},
      {"magnetization_energy", to_json(mag)},
      {"fidelity_heat_capacity", to_json(fid)},
      {"ground_state", gs},
      {"all_pass", all_pass}};
  if (!out_path.empty()) {
    auto f = open_output(out_path);
    f << report.dump(2) << "\n";
  }
  out << (all_pass ? "verify: PASS" : "verify: FAIL") << "\n";
  if (!all_pass) {
    err << "identity failure; see report\n";
    return kExitIdentityFailure;
  }
  return kExitOk;
}

std::vector<double> make_grid(double tmin, double tmax, std::size_t count) {
  if (!(tmin > 0.0) || !(tmax > tmin) || count < 2)
    throw validation_error("temperature grid requires 0 < tmin < tmax and "
                           ">= 2 points");
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = tmin + (tmax - tmin) * static_cast<double>(i) /
                      static_cast<double>(count - 1);
  return t;
}

int cmd_scan(const std::string& family, const std::vector<std::size_t>& sizes,
             double tmin, double tmax, std::size_t tcount,
             const McParams& mc, const std::string& csv_path,
             const std::string& verdict_path, bool with_verdict,
             const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ScanSpec spec;
  spec.family = family_from_name(family);
  spec.sizes = sizes;
  spec.temperatures = make_grid(tmin, tmax, tcount);
  spec.mc = mc;
  spec.master_seed = cfg.master_seed;
  spec.threads = cfg.threads;
  spec.exact_cap = cfg.caps.exact_cap;

  const ScanResult result = scan(spec);
  if (!csv_path.empty()) {
    auto f = open_output(csv_path);
    write_scan_csv(result, f);
  } else {
    write_scan_csv(result, out);
  }

  if (with_verdict) {
    const Verdict v = finite_size_verdict(result);
    const nlohmann::json vj = verdict_to_json(v);
    if (!verdict_path.empty()) {
      auto f = open_output(verdict_path);
      f << vj.dump(2) << "\n";
    }
    out << "decision: " << decision_name(v.decision);
    if (v.has_tc)
      out << " tc=" << fmt17(v.tc) << " err=" << fmt17(v.tc_err);
    out << "\n";
  }
  (void)err;
  return kExitOk;
}

int cmd_fidelity(const std::string& in_path, std::vector<double> betas,
                 double dbeta, const std::string& out_path,
                 const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Hypergraph h = read_hypergraph_file(in_path);
  if (betas.empty())
    betas.assign(kDefaultBetaGrid.begin(), kDefaultBetaGrid.end());
  const CssState css = build_css(h);
  const SpinModel dual_model{dual(h)};

  std::ostringstream csv;
  csv << "beta,F_exact,F_quadratic,Cv_dual,residual\n";
  for (double beta : betas) {
    const double f = fidelity(css, beta, dbeta, cfg.caps, cfg.threads);
    const Observables obs =
        observables_exact(dual_model, beta, cfg.caps.exact_cap);
    const double cv =
        obs.heat_capacity_per_spin * static_cast<double>(dual_model.n_spins());
    const double quad = 1.0 - cv * dbeta * dbeta / (8.0 * beta * beta);
    csv << fmt17(beta) << ',' << fmt17(f) << ',' << fmt17(quad) << ','
        << fmt17(cv) << ',' << fmt17(std::abs(f - quad)) << '\n';
  }
  if (!out_path.empty()) {
    auto f = open_output(out_path);
    f << csv.str();
  } else {
    out << csv.str();
  }
  (void)err;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"CSS-state topological-order diagnosis via the dual "
               "classical spin model"};
  app.require_subcommand(1);
  app.set_config("--config");

  RunConfig cfg;

  // build
  auto* build = app.add_subcommand(
      "build", "construct a hypergraph (ghz_ring | ising_square | "
               "toric_code | from-file) and write its document");
  std::string build_family;
  std::size_t build_n = 3, build_L = 2;
  std::string build_in, build_out;
  build->add_option("family", build_family, "model family")->required();
  build->add_option("--n", build_n, "ring length");
  build->add_option("--L", build_L, "torus side");
  build->add_option("--in", build_in, "input document for from-file");
  build->add_option("--out", build_out, "output hypergraph document");
  add_common(build, cfg);

  // dual
  auto* dualcmd = app.add_subcommand("dual", "write the dual hypergraph");
  std::string dual_in, dual_out;
  dualcmd->add_option("--in", dual_in, "input hypergraph document")
      ->required();
  dualcmd->add_option("--out", dual_out, "output hypergraph document");
  add_common(dualcmd, cfg);

  // verify
  auto* verify = app.add_subcommand(
      "verify", "check the quantum/classical correspondence identities and "
                "the deformed ground state");
  std::string verify_in, verify_out;
  std::vector<double> verify_betas, verify_dbetas;
  double verify_beta = 1.0;
  verify->add_option("--in", verify_in, "input hypergraph document")
      ->required();
  verify->add_option("--betas", verify_betas, "beta grid")->delimiter(',');
  verify->add_option("--beta", verify_beta, "beta for the fidelity identity");
  verify->add_option("--dbetas", verify_dbetas, "dbeta list")->delimiter(',');
  verify->add_option("--out", verify_out, "report document path");
  add_common(verify, cfg);

  // scan / diagnose
  std::string scan_family = "square2d";
  std::vector<std::size_t> scan_sizes;
  double scan_tmin = 1.8, scan_tmax = 2.8;
  std::size_t scan_tcount = 41;
  std::string scan_csv, scan_verdict;
  McParams mc;
  std::string mc_algorithm = "auto";
  auto add_scan_options = [&](CLI::App* cmd) {
    cmd->add_option("--family", scan_family, "ring1d | square2d")->required();
    cmd->add_option("--sizes", scan_sizes, "system sizes")
        ->required()
        ->delimiter(',');
    cmd->add_option("--tmin", scan_tmin, "lowest temperature");
    cmd->add_option("--tmax", scan_tmax, "highest temperature");
    cmd->add_option("--tcount", scan_tcount, "grid points");
    cmd->add_option("--equil", mc.equilibration_sweeps,
                    "equilibration sweeps");
    cmd->add_option("--measure", mc.measurement_sweeps, "measurement sweeps");
    cmd->add_option("--measure-every", mc.measure_every,
                    "sweeps between measurements");
    cmd->add_option("--algorithm", mc_algorithm,
                    "auto | metropolis | wolff");
    cmd->add_option("--out", scan_csv, "CSV output path");
    add_common(cmd, cfg);
  };
  auto* scancmd =
      app.add_subcommand("scan", "temperature scan; writes the CSV grid");
  add_scan_options(scancmd);
  auto* diagnose = app.add_subcommand(
      "diagnose", "scan plus finite-size verdict document");
  add_scan_options(diagnose);
  diagnose->add_option("--verdict", scan_verdict, "verdict document path");

  // fidelity
  auto* fid = app.add_subcommand(
      "fidelity", "fidelity vs quadratic heat-capacity law over a beta grid");
  std::string fid_in, fid_out;
  std::vector<double> fid_betas;
  double fid_dbeta = 1e-2;
  fid->add_option("--in", fid_in, "input hypergraph document")->required();
  fid->add_option("--betas", fid_betas, "beta grid")->delimiter(',');
  fid->add_option("--dbeta", fid_dbeta, "fidelity step");
  fid->add_option("--out", fid_out, "CSV output path");
  add_common(fid, cfg);

  std::vector<const char*> argv;
  argv.push_back("cssdual");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (build->parsed())
      return cmd_build(build_family, build_n, build_L, build_in, build_out,
                       out, err);
    if (dualcmd->parsed()) return cmd_dual(dual_in, dual_out, out, err);
    if (verify->parsed())
      return cmd_verify(verify_in, verify_betas, verify_beta, verify_dbetas,
                        verify_out, cfg, out, err);
    if (scancmd->parsed() || diagnose->parsed()) {
      if (mc_algorithm == "metropolis")
        mc.algorithm = McAlgorithm::Metropolis;
      else if (mc_algorithm == "wolff")
        mc.algorithm = McAlgorithm::Wolff;
      else if (mc_algorithm == "auto")
        mc.algorithm = McAlgorithm::Auto;
      else
        throw validation_error("unknown algorithm: " + mc_algorithm);
      return cmd_scan(scan_family, scan_sizes, scan_tmin, scan_tmax,
                      scan_tcount, mc, scan_csv, scan_verdict,
                      diagnose->parsed(), cfg, out, err);
    }
    if (fid->parsed())
      return cmd_fidelity(fid_in, fid_betas, fid_dbeta, fid_out, cfg, out,
                          err);
  } catch (const resource_error& e) {
    err << "resource cap: " << e.what() << "\n";
    return kExitResource;
  } catch (const validation_error& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  }
  err << "no command executed\n";
  return kExitValidation;
}

}  // namespace cssdual
