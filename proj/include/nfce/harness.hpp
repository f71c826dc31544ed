#pragma once

#include <string>
#include <vector>

#include "nfce/crlb.hpp"
#include "nfce/estimator.hpp"

namespace nfce {

// Monte Carlo experiment description. Per-trial RNG streams are derived from
// (master seed, snr index, trial index), so results are independent of
// execution order.
struct SweepSpec {
  ScenarioConfig cfg;
  std::vector<double> snr_db;  // nonempty
  int trials = 100;            // >= 1
  std::uint64_t master_seed = 1;
  bool on_grid = false;  // validation mode: angles snapped onto the lattices
};

struct TrialRecord {
  bool ok = false;
  std::string error;  // failure kind when !ok
  double snr_realized_db = 0.0;
  // Normalized squared errors per family, after delay-based path matching.
  double nmse_theta = 0.0, nmse_phi = 0.0, nmse_psi = 0.0;
  double nmse_tau = 0.0, nmse_gamma = 0.0, nmse_channel = 0.0;
  // Raw squared errors (unnormalized), for CRLB comparisons.
  double se_tau = 0.0;
  // CRLB normalized by the same reference energies.
  CrlbReport crlb;
  double crlb_theta_n = 0.0, crlb_phi_n = 0.0, crlb_psi_n = 0.0;
  double crlb_tau_n = 0.0, crlb_gamma_n = 0.0, crlb_channel_n = 0.0;
  // Diagnostics.
  double m_condition = 0.0, gain_leakage = 0.0;
  double max_z_modulus_drift = 0.0;
};

struct SweepRow {
  double snr_db = 0.0;
  std::string family;  // theta_e | phi_a | psi | tau | gamma | channel
  double median_nmse_db = 0.0;
  double mean_nmse_db = 0.0;
  double crlb_db = 0.0;  // mean normalized family CRLB
  int trials_ok = 0;
  int trials_failed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::vector<TrialRecord>> trials;  // [snr index][trial]
};

// ||truth - est||^2 / ||truth||^2. Throws ZeroReference on a zero reference.
double nmse(const VectorXd& truth, const VectorXd& est);
double nmse(const VectorXcd& truth, const VectorXcd& est);

// Overall-channel NMSE through the vectorized reconstruction; the sum over
// paths makes it permutation-free.
double channel_nmse(const PathSet& truth, const EstimationResult& res,
                    const ScenarioConfig& cfg);

// Assignment of estimated paths to true paths minimizing total |tau
// mismatch|; exhaustive over permutations for L <= 8, greedy beyond.
// Returns est index for each true index.
std::vector<int> align_paths(const VectorXd& tau_true, const VectorXd& tau_est);

// Builds a PathSet out of an estimation result (used for reconstruction).
PathSet paths_from_estimate(const EstimationResult& res);

// Runs one trial end to end; throws nothing, failures land in the record.
TrialRecord run_trial(const ScenarioConfig& cfg, const Codebooks& books,
                      double snr_db, std::uint64_t master_seed, int snr_index,
                      int trial_index, bool on_grid);

SweepResult run_sweep(const SweepSpec& spec);

// CSV with one row per (snr, family) plus a JSON run-manifest next to it
// (same path with ".manifest.json" appended).
void emit_results(const SweepResult& result, const SweepSpec& spec,
                  const std::string& path);

std::vector<SweepRow> read_results_csv(const std::string& path);

// 10*log10, passing through zero as -inf.
double to_db(double x);

// FNV-1a 64-bit hex digest, used for the manifest config hash.
std::string fnv1a_hex(const std::string& text);

}  // namespace nfce
