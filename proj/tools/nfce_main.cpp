#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "nfce/errors.hpp"
#include "nfce/harness.hpp"
#include "nfce/io.hpp"

namespace {

using namespace nfce;

double parse_snr(const std::string& s) {
  if (s == "inf" || s == "+inf" || s == "none")
    return std::numeric_limits<double>::infinity();
  return std::stod(s);
}

std::vector<double> parse_snr_list(const std::string& s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const std::string tok = s.substr(start, comma - start);
    if (!tok.empty()) out.push_back(parse_snr(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty SNR list");
  return out;
}

ScenarioConfig make_cfg(const std::string& config_path,
                        const std::vector<std::string>& overrides,
                        std::uint64_t seed, bool seed_given,
                        const std::string& distance_range) {
  ScenarioConfig cfg =
      config_path.empty() ? ScenarioConfig{} : load_config(config_path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override must look like key=value: " + kv);
    apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!distance_range.empty()) {
    const auto comma = distance_range.find(',');
    if (comma == std::string::npos)
      throw ConfigError("distance range must look like lo,hi");
    cfg.u_range.lo = std::stod(distance_range.substr(0, comma));
    cfg.u_range.hi = std::stod(distance_range.substr(comma + 1));
  }
  if (seed_given) cfg.seed = seed;
  cfg.validate();
  return cfg;
}

int cmd_simulate(const ScenarioConfig& cfg, double snr_db,
                 const std::string& out, const std::string& tensor_csv) {
  RngStream path_rng(derive_seed(cfg.seed, 0, 0, 1));
  SimulationBundle bundle;
  bundle.cfg = cfg;
  bundle.truth = sample_paths(cfg, path_rng);
  const TrainingOperators ops =
      make_training_operators(cfg, cfg.link, derive_seed(cfg.seed, 0, 0, 2));
  const Tensor3 clean = synthesize_noiseless(bundle.truth, ops, cfg);
  bundle.meas = add_noise(clean, ops, snr_db, derive_seed(cfg.seed, 0, 0, 3));
  bundle.snr_db = snr_db;
  save_bundle(bundle, out);
  if (!tensor_csv.empty()) write_tensor_csv(bundle.meas.data, tensor_csv);
  std::cout << "wrote " << out << " (Q=" << cfg.q << " T_a=" << cfg.t_a
            << " P=" << cfg.p << " L=" << cfg.l << ", sigma2=" << bundle.meas.sigma2
            << ")\n";
  return 0;
}

int cmd_estimate(const std::string& in, const std::string& out) {
  const SimulationBundle bundle = load_bundle(in);
  const Codebooks books = build_codebooks(bundle.cfg);
  const EstimationResult res = estimate(bundle.meas, bundle.cfg, books);
  const std::string text = format_estimation_result(res);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw IoError("cannot open output file: " + out);
    f << text;
  }
  return 0;
}

int cmd_crlb(const ScenarioConfig& cfg, const std::vector<double>& snr_list,
             const std::string& out) {
  RngStream path_rng(derive_seed(cfg.seed, 0, 0, 1));
  const PathSet paths = sample_paths(cfg, path_rng);
  const TrainingOperators ops =
      make_training_operators(cfg, cfg.link, derive_seed(cfg.seed, 0, 0, 2));
  const Tensor3 clean = synthesize_noiseless(paths, ops, cfg);
  const double signal_energy = clean.vec().squaredNorm();
  const double entries = double(clean.size());

  std::ostringstream text;
  text << "snr_db,sigma2,crlb_total,crlb_theta,crlb_phi,crlb_psi,crlb_tau,"
          "crlb_gamma,crlb_channel\n";
  char buf[400];
  for (double snr_db : snr_list) {
    const double sigma2 =
        signal_energy / (std::pow(10.0, snr_db / 10.0) * entries);
    const CrlbReport rep = crlb_report(paths, ops, cfg, sigma2);
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  snr_db, rep.sigma2, rep.total, rep.theta_e, rep.phi_a,
                  rep.psi, rep.tau, rep.gamma, rep.channel);
    text << buf;
  }
  if (out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream f(out);
    if (!f) throw IoError("cannot open output file: " + out);
    f << text.str();
  }
  return 0;
}

int cmd_sweep(const ScenarioConfig& cfg, const std::vector<double>& snr_list,
              int trials, bool on_grid, const std::string& out) {
  SweepSpec spec;
  spec.cfg = cfg;
  spec.snr_db = snr_list;
  spec.trials = trials;
  spec.master_seed = cfg.seed;
  spec.on_grid = on_grid;
  const SweepResult result = run_sweep(spec);
  emit_results(result, spec, out);
  int failed = 0;
  for (const auto& per_snr : result.trials)
    for (const auto& rec : per_snr) failed += rec.ok ? 0 : 1;
  std::cout << "wrote " << out << " (" << result.rows.size() << " rows, "
            << failed << " failed trials)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"near-field IRS channel simulation and estimation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out, tensor_csv, in_path, distance_range, snr_str = "inf",
              snr_list_str = "0,10,20,30";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int trials = 100;
  bool on_grid = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file (key = value lines)");
    cmd->add_option("--set", overrides, "inline config override key=value")
        ->take_all();
    cmd->add_option("--seed", seed, "RNG seed (overrides the config seed)")
        ->each([&](const std::string&) { seed_given = true; });
    cmd->add_option("--distance-range", distance_range, "path distance range lo,hi [m]");
  };

  auto* sim = app.add_subcommand("simulate", "synthesize a measurement tensor");
  add_common(sim);
  sim->add_option("--snr", snr_str, "SNR in dB, or 'inf' for noiseless");
  sim->add_option("--out", out, "bundle output path (JSON)")->required();
  sim->add_option("--tensor-csv", tensor_csv, "also dump the tensor as flat CSV");

  auto* est = app.add_subcommand("estimate", "run the estimator on a saved tensor");
  est->add_option("--in", in_path, "bundle produced by simulate")->required();
  est->add_option("--out", out, "result path (stdout when omitted)");

  auto* crl = app.add_subcommand("crlb", "emit the bound report for a scenario");
  add_common(crl);
  crl->add_option("--snr-list", snr_list_str, "comma-separated SNRs in dB");
  crl->add_option("--out", out, "CSV path (stdout when omitted)");

  auto* swp = app.add_subcommand("sweep", "full Monte Carlo NMSE-vs-SNR sweep");
  add_common(swp);
  swp->add_option("--snr-list", snr_list_str, "comma-separated SNRs in dB");
  swp->add_option("--trials", trials, "Monte Carlo trials per SNR point");
  swp->add_flag("--on-grid", on_grid, "snap sampled angles onto the codebook lattices");
  swp->add_option("--out", out, "results CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      const auto cfg = make_cfg(config_path, overrides, seed, seed_given, distance_range);
      return cmd_simulate(cfg, parse_snr(snr_str), out, tensor_csv);
    }
    if (est->parsed()) return cmd_estimate(in_path, out);
    if (crl->parsed()) {
      const auto cfg = make_cfg(config_path, overrides, seed, seed_given, distance_range);
      return cmd_crlb(cfg, parse_snr_list(snr_list_str), out);
    }
    if (swp->parsed()) {
      const auto cfg = make_cfg(config_path, overrides, seed, seed_given, distance_range);
      return cmd_sweep(cfg, parse_snr_list(snr_list_str), trials, on_grid, out);
    }
  } catch (const nfce::Error& e) {
    std::cerr << "error: {\"kind\":\"" << e.kind << "\",\"message\":\""
              << e.what() << "\"}\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: {\"kind\":\"Unexpected\",\"message\":\"" << e.what()
              << "\"}\n";
    return 3;
  }
  return 1;
}
