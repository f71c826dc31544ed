#include "nfce/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "nfce/errors.hpp"
#include "nfce/io.hpp"
#include "nfce/rng.hpp"

namespace nfce {

double to_db(double x) { return 10.0 * std::log10(x); }

double nmse(const VectorXd& truth, const VectorXd& est) {
  const double ref = truth.squaredNorm();
  if (!(ref > 0.0)) throw ZeroReference("NMSE reference vector has zero norm");
  return (truth - est).squaredNorm() / ref;
}

double nmse(const VectorXcd& truth, const VectorXcd& est) {
  const double ref = truth.squaredNorm();
  if (!(ref > 0.0)) throw ZeroReference("NMSE reference vector has zero norm");
  return (truth - est).squaredNorm() / ref;
}

PathSet paths_from_estimate(const EstimationResult& res) {
  PathSet paths(res.tau.size());
  for (int l = 0; l < res.tau.size(); ++l) {
    paths[l].theta_e = res.theta_e[l];
    paths[l].phi_a = res.phi_a[l];
    paths[l].psi = res.psi[l];
    paths[l].u = res.u[l];
    paths[l].gamma = res.gamma[l];
  }
  return paths;
}

double channel_nmse(const PathSet& truth, const EstimationResult& res,
                    const ScenarioConfig& cfg) {
  const VectorXcd h_true = channel_vec(truth, cfg);
  const VectorXcd h_est = channel_vec(paths_from_estimate(res), cfg);
  const double ref = h_true.squaredNorm();
  if (!(ref > 0.0)) throw ZeroReference("true channel has zero energy");
  return (h_true - h_est).squaredNorm() / ref;
}

std::vector<int> align_paths(const VectorXd& tau_true, const VectorXd& tau_est) {
  const int n = int(tau_true.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (n > 8) {
    // Greedy nearest-delay matching for large path counts.
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
      int best = -1;
      double best_cost = 0.0;
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double cost = std::abs(tau_est[j] - tau_true[i]);
        if (best < 0 || cost < best_cost) {
          best = j;
          best_cost = cost;
        }
      }
      perm[i] = best;
      used[best] = true;
    }
    return perm;
  }
  std::vector<int> trial = perm, best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  std::sort(trial.begin(), trial.end());
  do {
    double cost = 0.0;
    for (int i = 0; i < n; ++i) cost += std::abs(tau_est[trial[i]] - tau_true[i]);
    if (cost < best_cost) {
      best_cost = cost;
      best = trial;
    }
  } while (std::next_permutation(trial.begin(), trial.end()));
  return best;
}

TrialRecord run_trial(const ScenarioConfig& cfg, const Codebooks& books,
                      double snr_db, std::uint64_t master_seed, int snr_index,
                      int trial_index, bool on_grid) {
  TrialRecord rec;
  try {
    RngStream path_rng(derive_seed(master_seed, snr_index, trial_index, 1));
    const PathSet paths = on_grid ? sample_paths_on_grid(cfg, path_rng)
                                  : sample_paths(cfg, path_rng);
    const TrainingOperators ops = make_training_operators(
        cfg, cfg.link, derive_seed(master_seed, snr_index, trial_index, 2));
    const Tensor3 clean = synthesize_noiseless(paths, ops, cfg);
    const MeasurementTensor meas = add_noise(
        clean, ops, snr_db, derive_seed(master_seed, snr_index, trial_index, 3));
    const EstimationResult res = estimate(meas, cfg, books);

    const int num_paths = cfg.l;
    VectorXd t_theta(num_paths), t_phi(num_paths), t_psi(num_paths), t_tau(num_paths);
    VectorXcd t_gamma(num_paths);
    for (int l = 0; l < num_paths; ++l) {
      t_theta[l] = paths[l].theta_e;
      t_phi[l] = paths[l].phi_a;
      t_psi[l] = paths[l].psi;
      t_tau[l] = paths[l].tau();
      t_gamma[l] = paths[l].gamma;
    }
    const std::vector<int> perm = align_paths(t_tau, res.tau);
    VectorXd e_theta(num_paths), e_phi(num_paths), e_psi(num_paths), e_tau(num_paths);
    VectorXcd e_gamma(num_paths);
    for (int l = 0; l < num_paths; ++l) {
      e_theta[l] = res.theta_e[perm[l]];
      e_phi[l] = res.phi_a[perm[l]];
      e_psi[l] = res.psi[perm[l]];
      e_tau[l] = res.tau[perm[l]];
      e_gamma[l] = res.gamma[perm[l]];
    }

    rec.nmse_theta = nmse(t_theta, e_theta);
    rec.nmse_phi = nmse(t_phi, e_phi);
    rec.nmse_psi = nmse(t_psi, e_psi);
    rec.nmse_tau = nmse(t_tau, e_tau);
    rec.nmse_gamma = nmse(t_gamma, e_gamma);
    rec.nmse_channel = channel_nmse(paths, res, cfg);
    rec.se_tau = (t_tau - e_tau).squaredNorm();
    rec.snr_realized_db = to_db(meas.snr_linear);
    rec.m_condition = res.diag.m_condition;
    rec.gain_leakage = res.diag.gain_leakage;
    rec.max_z_modulus_drift = (res.diag.z_moduli.array() - 1.0).abs().maxCoeff();

    if (meas.sigma2 > 0.0) {
      rec.crlb = crlb_report(paths, meas.ops, cfg, meas.sigma2);
      const double h_energy = channel_vec(paths, cfg).squaredNorm();
      rec.crlb_theta_n = rec.crlb.theta_e / t_theta.squaredNorm();
      rec.crlb_phi_n = rec.crlb.phi_a / t_phi.squaredNorm();
      rec.crlb_psi_n = rec.crlb.psi / t_psi.squaredNorm();
      rec.crlb_tau_n = rec.crlb.tau / t_tau.squaredNorm();
      rec.crlb_gamma_n = rec.crlb.gamma / t_gamma.squaredNorm();
      rec.crlb_channel_n = rec.crlb.channel / h_energy;
    }
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = e.kind;
  }
  return rec;
}

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.trials < 1) throw ConfigError("trial count must be >= 1");
  if (spec.snr_db.empty()) throw ConfigError("SNR list must be nonempty");
  spec.cfg.validate();
  const Codebooks books = build_codebooks(spec.cfg);

  SweepResult result;
  result.trials.resize(spec.snr_db.size());
  const char* families[] = {"theta_e", "phi_a", "psi", "tau", "gamma", "channel"};

  for (std::size_t s = 0; s < spec.snr_db.size(); ++s) {
    auto& records = result.trials[s];
    records.reserve(spec.trials);
    for (int k = 0; k < spec.trials; ++k)
      records.push_back(run_trial(spec.cfg, books, spec.snr_db[s],
                                  spec.master_seed, int(s), k, spec.on_grid));

    int ok = 0;
    for (const auto& rec : records) ok += rec.ok ? 1 : 0;
    const int failed = spec.trials - ok;

    for (int f = 0; f < 6; ++f) {
      std::vector<double> vals, crlbs;
      for (const auto& rec : records) {
        if (!rec.ok) continue;
        const double nm[] = {rec.nmse_theta, rec.nmse_phi, rec.nmse_psi,
                             rec.nmse_tau, rec.nmse_gamma, rec.nmse_channel};
        const double cb[] = {rec.crlb_theta_n, rec.crlb_phi_n, rec.crlb_psi_n,
                             rec.crlb_tau_n, rec.crlb_gamma_n, rec.crlb_channel_n};
        vals.push_back(nm[f]);
        crlbs.push_back(cb[f]);
      }
      SweepRow row;
      row.snr_db = spec.snr_db[s];
      row.family = families[f];
      row.median_nmse_db = to_db(median_of(vals));
      row.mean_nmse_db = to_db(mean_of(vals));
      row.crlb_db = to_db(mean_of(crlbs));
      row.trials_ok = ok;
      row.trials_failed = failed;
      result.rows.push_back(row);
    }
  }
  return result;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void emit_results(const SweepResult& result, const SweepSpec& spec,
                  const std::string& path) {
  if (result.rows.empty()) throw IoError("refusing to emit an empty table");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << "snr_db,family,median_nmse_db,mean_nmse_db,crlb_db,trials_ok,trials_failed\n";
  for (const auto& row : result.rows)
    out << num(row.snr_db) << ',' << row.family << ','
        << num(row.median_nmse_db) << ',' << num(row.mean_nmse_db) << ','
        << num(row.crlb_db) << ',' << row.trials_ok << ',' << row.trials_failed
        << '\n';
  out.close();
  if (!out) throw IoError("failed writing: " + path);

  write_run_manifest(spec, path + ".manifest.json");
}

std::vector<SweepRow> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open results file: " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "snr_db,family,median_nmse_db,mean_nmse_db,crlb_db,trials_ok,trials_failed")
    throw IoError("unexpected results header in " + path);
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    SweepRow row;
    std::getline(ss, field, ',');
    row.snr_db = std::stod(field);
    std::getline(ss, row.family, ',');
    std::getline(ss, field, ',');
    row.median_nmse_db = std::stod(field);
    std::getline(ss, field, ',');
    row.mean_nmse_db = std::stod(field);
    std::getline(ss, field, ',');
    row.crlb_db = std::stod(field);
    std::getline(ss, field, ',');
    row.trials_ok = std::stoi(field);
    std::getline(ss, field, ',');
    row.trials_failed = std::stoi(field);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nfce
