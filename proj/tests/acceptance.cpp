// Acceptance suite: runs every exit criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "nfce/channel.hpp"
#include "nfce/crlb.hpp"
#include "nfce/errors.hpp"
#include "nfce/harness.hpp"
#include "test_util.hpp"

using namespace nfce;
using namespace nfce_test;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Criterion {
  int id;
  const char* description;
  std::function<bool(std::string&)> run;
};

// 1. Noiseless exact recovery on 50 random on-grid desk-scale scenarios.
bool criterion1(std::string& detail) {
  const ScenarioConfig cfg;  // desk scale: N_r = 64, P = Q = T_a = 16, L = 4
  const Codebooks books = build_codebooks(cfg);
  double worst_tau = 0.0, worst_gain = 0.0, worst_time = 0.0;
  for (int scenario = 0; scenario < 50; ++scenario) {
    RngStream rng(derive_seed(4001, scenario));
    const PathSet paths = sample_paths_on_grid(cfg, rng);
    const auto ops =
        make_training_operators(cfg, cfg.link, derive_seed(4002, scenario));
    const Tensor3 clean = synthesize_noiseless(paths, ops, cfg);
    const auto meas =
        add_noise(clean, ops, std::numeric_limits<double>::infinity(), 0);

    const auto start = Clock::now();
    const EstimationResult res = estimate(meas, cfg, books);
    worst_time = std::max(worst_time, seconds_since(start));

    VectorXd tau_true(cfg.l);
    for (int l = 0; l < cfg.l; ++l) tau_true[l] = paths[l].tau();
    const auto perm = align_paths(tau_true, res.tau);
    for (int l = 0; l < cfg.l; ++l) {
      const int j = perm[l];
      worst_tau = std::max(worst_tau, rel_err(res.tau[j], paths[l].tau()));
      if (res.theta_e[j] != paths[l].theta_e || res.phi_a[j] != paths[l].phi_a ||
          res.psi[j] != paths[l].psi) {
        detail = "angle came back off-grid";
        return false;
      }
      worst_gain = std::max(worst_gain,
                            std::abs(res.gamma[j] - paths[l].gamma) /
                                std::abs(paths[l].gamma));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "worst tau rel %.2e, worst gain rel %.2e, worst time %.2fs",
                worst_tau, worst_gain, worst_time);
  detail = buf;
  return worst_tau <= 1e-8 && worst_gain <= 1e-6 && worst_time < 1.0;
}

// 2. Unfolding identities on random CP tensors and the reception-chain
// oracle on full scenarios.
bool criterion2(std::string& detail) {
  RngStream rng(4010);
  double worst_unfold = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int nq = 2 + int(rng.uniform01() * 5);
    const int nt = 2 + int(rng.uniform01() * 5);
    const int np = 2 + int(rng.uniform01() * 5);
    const int rank = 1 + int(rng.uniform01() * 4);
    const MatrixXcd a = random_matrix(rng, nq, rank);
    const MatrixXcd b = random_matrix(rng, nt, rank);
    const MatrixXcd c = random_matrix(rng, np, rank);
    const Tensor3 t = cp_tensor(a, b, c);
    const double scale = t.frobenius_norm();
    worst_unfold = std::max(
        {worst_unfold,
         (unfold(t, 1).transpose() - khatri_rao(c, b) * a.transpose()).norm() / scale,
         (unfold(t, 2).transpose() - khatri_rao(c, a) * b.transpose()).norm() / scale,
         (unfold(t, 3).transpose() - khatri_rao(b, a) * c.transpose()).norm() / scale});
  }

  // Scalar chain: w^H H_s Omega_q H x(t) with the transposed UE dyad and
  // conjugated pilot columns, evaluated entry by entry.
  const ScenarioConfig cfg;
  double worst_chain = 0.0;
  for (int scenario = 0; scenario < 20; ++scenario) {
    RngStream srng(derive_seed(4011, scenario));
    const PathSet paths = sample_paths(cfg, srng);
    const auto ops =
        make_training_operators(cfg, cfg.link, derive_seed(4012, scenario));
    const Tensor3 got = synthesize_noiseless(paths, ops, cfg);

    double max_abs = 0.0, max_diff = 0.0;
    for (int p = 1; p <= cfg.p; ++p) {
      const Eigen::RowVectorXcd wh_hs =
          ops.w.adjoint() * bs_irs_channel(cfg.link, p, cfg);
      MatrixXcd h_u = MatrixXcd::Zero(cfg.n_r(), cfg.n_t);
      for (const auto& path : paths)
        h_u.noalias() += path.gamma * std::pow(delay_generator(path.tau(), cfg), p) *
                         irs_nf_response(path, cfg) *
                         ue_ff_response(path.psi, cfg).transpose();
      for (int t = 1; t <= cfg.t_a; ++t) {
        const VectorXcd x = ops.f.col(t - 1).conjugate();
        for (int q = 1; q <= cfg.q; ++q) {
          const std::complex<double> want =
              (wh_hs.cwiseProduct(ops.v.row(q - 1)) * h_u * x)(0, 0);
          max_abs = std::max(max_abs, std::abs(want));
          max_diff = std::max(max_diff, std::abs(got(q - 1, t - 1, p - 1) - want));
        }
      }
    }
    worst_chain = std::max(worst_chain, max_diff / max_abs);
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "unfold rel %.2e, chain rel %.2e",
                worst_unfold, worst_chain);
  detail = buf;
  return worst_unfold <= 1e-12 && worst_chain <= 1e-9;
}

// 3. Analytic FIM vs the finite-difference Gaussian oracle.
bool criterion3(std::string& detail) {
  const auto start = Clock::now();
  auto cfg = small_config();  // L = 2, Q = T_a = P = 8
  const double sigma2 = 0.02;
  double worst = 0.0;
  for (int scenario = 0; scenario < 20; ++scenario) {
    const auto ops =
        make_training_operators(cfg, cfg.link, derive_seed(4020, scenario));
    RngStream rng(derive_seed(4021, scenario));
    const PathSet paths = sample_paths(cfg, rng);
    const FimMatrix fim = assemble_fim(paths, ops, cfg, sigma2);

    // Finite-difference Jacobian over the 6L real parameters.
    const int num_paths = cfg.l;
    const Eigen::Index dim = Eigen::Index(cfg.q) * cfg.t_a * cfg.p;
    MatrixXcd jac(dim, 6 * num_paths);
    for (int f = 0; f < 6; ++f)
      for (int l = 0; l < num_paths; ++l) {
        const double h = (f == 3) ? 1e-15 : 1e-7;
        PathSet hi = paths, lo = paths;
        switch (f) {
          case 0: hi[l].theta_e += h; lo[l].theta_e -= h; break;
          case 1: hi[l].phi_a += h; lo[l].phi_a -= h; break;
          case 2: hi[l].psi += h; lo[l].psi -= h; break;
          case 3: hi[l].u += h * kSpeedOfLight; lo[l].u -= h * kSpeedOfLight; break;
          case 4: hi[l].gamma += h; lo[l].gamma -= h; break;
          case 5:
            hi[l].gamma += std::complex<double>(0, h);
            lo[l].gamma -= std::complex<double>(0, h);
            break;
        }
        jac.col(f * num_paths + l) = (synthesize_noiseless(hi, ops, cfg).vec() -
                                      synthesize_noiseless(lo, ops, cfg).vec()) /
                                     (2.0 * h);
      }
    const Eigen::MatrixXd want = (2.0 / sigma2) * (jac.adjoint() * jac).real();

    // Complex-to-real convention map of the analytic matrix.
    const int nr = 4 * num_paths;
    Eigen::MatrixXd got(6 * num_paths, 6 * num_paths);
    got.topLeftCorner(nr, nr) = fim.j.topLeftCorner(nr, nr).real();
    for (int a = 0; a < nr; ++a)
      for (int l = 0; l < num_paths; ++l) {
        const auto g = fim.j(a, nr + l);
        got(a, nr + l) = got(nr + l, a) = 2.0 * g.real();
        got(a, nr + num_paths + l) = got(nr + num_paths + l, a) = -2.0 * g.imag();
      }
    for (int l1 = 0; l1 < num_paths; ++l1)
      for (int l2 = 0; l2 < num_paths; ++l2) {
        const auto k = fim.j(nr + l1, nr + l2);
        got(nr + l1, nr + l2) = 2.0 * k.real();
        got(nr + l1, nr + num_paths + l2) = -2.0 * k.imag();
        got(nr + num_paths + l1, nr + l2) = 2.0 * k.imag();
        got(nr + num_paths + l1, nr + num_paths + l2) = 2.0 * k.real();
      }

    const double floor = 1e-12 * want.cwiseAbs().maxCoeff();
    for (int i = 0; i < got.rows(); ++i)
      for (int j = 0; j < got.cols(); ++j) {
        const double denom =
            std::max({std::abs(got(i, j)), std::abs(want(i, j)), floor});
        worst = std::max(worst, std::abs(got(i, j) - want(i, j)) / denom);
      }
  }
  const double elapsed = seconds_since(start);
  char buf[120];
  std::snprintf(buf, sizeof(buf), "worst entry rel %.2e, %.1fs total", worst,
                elapsed);
  detail = buf;
  return worst <= 1e-3 && elapsed < 30.0;
}

// 4. Exact noise-variance linearity of the bounds and the resulting
// -10 dB/decade slope.
bool criterion4(std::string& detail) {
  auto cfg = small_config();
  const auto ops = make_training_operators(cfg, cfg.link, 4030);
  RngStream rng(4031);
  const PathSet paths = sample_paths(cfg, rng);

  const CrlbReport r1 = crlb_report(paths, ops, cfg, 0.005);
  const CrlbReport r2 = crlb_report(paths, ops, cfg, 0.010);
  double ratio_err = 0.0;
  for (double pair : {r2.total / r1.total, r2.theta_e / r1.theta_e,
                      r2.phi_a / r1.phi_a, r2.psi / r1.psi, r2.tau / r1.tau,
                      r2.gamma / r1.gamma, r2.channel / r1.channel})
    ratio_err = std::max(ratio_err, std::abs(pair - 2.0) / 2.0);

  const Tensor3 clean = synthesize_noiseless(paths, ops, cfg);
  const double energy = clean.vec().squaredNorm();
  double max_resid = 0.0;
  std::vector<double> snrs, dbs;
  for (double snr = 0.0; snr <= 30.0; snr += 5.0) {
    const double sigma2 =
        energy / (std::pow(10.0, snr / 10.0) * double(clean.size()));
    snrs.push_back(snr);
    dbs.push_back(to_db(crlb_report(paths, ops, cfg, sigma2).total));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(snrs.size());
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    sx += snrs[i];
    sy += dbs[i];
    sxx += snrs[i] * snrs[i];
    sxy += snrs[i] * dbs[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  for (std::size_t i = 0; i < snrs.size(); ++i)
    max_resid = std::max(max_resid,
                         std::abs(dbs[i] - (intercept + slope * snrs[i])));
  char buf[140];
  std::snprintf(buf, sizeof(buf),
                "sigma2 ratio err %.2e, slope %.4f dB/dB, fit resid %.2e dB",
                ratio_err, slope, max_resid);
  detail = buf;
  return ratio_err <= 1e-9 && std::abs(slope + 1.0) < 0.02 && max_resid <= 0.2;
}

// 5. Desk-scale figure trend: median channel NMSE falls strictly to 20 dB
// and may flatten above.
bool criterion5(std::string& detail) {
  const auto start = Clock::now();
  SweepSpec spec;
  spec.cfg = ScenarioConfig{};
  spec.cfg.u_range = {1.0, 6.0};
  spec.snr_db = {0.0, 10.0, 20.0, 30.0};
  spec.trials = 100;
  spec.master_seed = 4040;
  const SweepResult result = run_sweep(spec);

  double med[4] = {0, 0, 0, 0};
  for (const auto& row : result.rows) {
    if (row.family != "channel") continue;
    for (int i = 0; i < 4; ++i)
      if (row.snr_db == spec.snr_db[i]) med[i] = row.median_nmse_db;
  }
  const double elapsed = seconds_since(start);
  char buf[180];
  std::snprintf(buf, sizeof(buf),
                "median channel NMSE dB {%.1f, %.1f, %.1f, %.1f}, %.0fs",
                med[0], med[1], med[2], med[3], elapsed);
  detail = buf;
  const bool strict_drop = med[0] > med[1] && med[1] > med[2];
  const bool flattening_ok = med[3] <= med[2] + 0.5;
  return strict_drop && flattening_ok && elapsed < 600.0;
}

// 6. Rayleigh distance against the published value.
bool criterion6(std::string& detail) {
  const double rd = rayleigh_distance(ScenarioConfig::paper_scale());
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "2D^2/lambda = %.3f m vs 6.24 m (larger-side aperture)", rd);
  detail = buf;
  return std::abs(rd - 6.24) / 6.24 <= 0.10;
}

// 7. Excluded comparisons, stated explicitly.
bool criterion7(std::string& detail) {
  detail =
      "baseline algorithms (PSOMP, PF-RCE) and their comparison figures are "
      "out of scope; the published 8.5 dB NMSE margin is not reproduced here "
      "and is substituted by criteria 1-5 and 8";
  return true;
}

// 8. Mean delay MSE within 10 dB of the delay-family bound at 30 dB SNR.
bool criterion8(std::string& detail) {
  auto cfg = ScenarioConfig{};
  cfg.l = 1;
  const Codebooks books = build_codebooks(cfg);
  double mse = 0.0, bound = 0.0;
  int ok = 0, failed = 0;
  for (int k = 0; k < 500; ++k) {
    const TrialRecord rec = run_trial(cfg, books, 30.0, 4050, 0, k, false);
    if (!rec.ok) {
      ++failed;
      continue;
    }
    ++ok;
    mse += rec.se_tau;
    bound += rec.crlb.tau;
  }
  mse /= std::max(1, ok);
  bound /= std::max(1, ok);
  const double gap_db = to_db(mse / bound);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "delay MSE %.3e vs CRLB %.3e (gap %.2f dB), %d/500 failed",
                mse, bound, gap_db, failed);
  detail = buf;
  return std::abs(gap_db) <= 10.0 && failed <= 10;  // 2% failure budget
}

// 9. Codebook searches equal the exhaustive maximizer with the documented
// tie-break.
bool criterion9(std::string& detail) {
  auto cfg = small_config();
  const Codebooks books = build_codebooks(cfg);
  const auto ops = make_training_operators(cfg, cfg.link, 4060);
  RngStream rng(4061);
  for (int rep = 0; rep < 20; ++rep) {
    const VectorXcd query = random_matrix(rng, cfg.q, 1);
    const double u_hat = rng.uniform(cfg.u_range.lo, cfg.u_range.hi);
    const auto est = search_irs_angles(query, u_hat, books, ops, cfg);
    double best = -1.0;
    double want_theta = 0, want_phi = 0;
    for (int i = 0; i < cfg.g_z; ++i)
      for (int j = 0; j < cfg.g_y; ++j) {
        PathParams cand;
        cand.theta_e = books.theta[i];
        cand.phi_a = books.phi[j];
        cand.u = u_hat;
        const VectorXcd proj = ops.vt * irs_nf_response(cand, cfg);
        const double metric =
            std::norm(query.dot(proj)) / (query.norm() * proj.norm());
        if (metric > best) {
          best = metric;
          want_theta = cand.theta_e;
          want_phi = cand.phi_a;
        }
      }
    if (est.theta_e != want_theta || est.phi_a != want_phi) {
      detail = "IRS search disagreed with the exhaustive scan";
      return false;
    }

    const VectorXcd bq = random_matrix(rng, cfg.t_a, 1);
    const auto ue = search_ue_angle(bq, books, ops.f, cfg);
    best = -1.0;
    double want_psi = 0;
    for (int k = 0; k < cfg.g_u; ++k) {
      const VectorXcd cand = ops.f.adjoint() * ue_ff_response(books.psi[k], cfg);
      const double metric = std::norm(bq.dot(cand)) / (bq.norm() * cand.norm());
      if (metric > best) {
        best = metric;
        want_psi = books.psi[k];
      }
    }
    if (ue.psi != want_psi) {
      detail = "UE search disagreed with the exhaustive scan";
      return false;
    }
  }
  detail = "20 random queries, both searches exact";
  return true;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "noiseless exact recovery, 50 on-grid scenarios", criterion1},
      {2, "factorization and unfolding identities", criterion2},
      {3, "FIM vs finite-difference Gaussian oracle", criterion3},
      {4, "CRLB noise-variance linearity and slope", criterion4},
      {5, "figure trend: channel NMSE vs SNR", criterion5},
      {6, "Rayleigh distance vs published value", criterion6},
      {7, "excluded baselines stated", criterion7},
      {8, "delay MSE within 10 dB of the bound", criterion8},
      {9, "exhaustive-search equivalence", criterion9},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %d: %s%s%s%s\n", ok ? "PASS" : "FAIL",
                criterion.id, criterion.description, detail.empty() ? "" : " [",
                detail.c_str(), detail.empty() ? "" : "]");
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
