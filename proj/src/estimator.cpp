#include "nfce/estimator.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "nfce/errors.hpp"

namespace nfce {

Codebooks build_codebooks(const ScenarioConfig& cfg) {
  Codebooks books;
  books.theta.resize(cfg.g_z);
  for (int i = 1; i <= cfg.g_z; ++i)
    books.theta[i - 1] = cfg.theta_c_min + i * cfg.theta_step();
  books.phi.resize(cfg.g_y);
  for (int j = 1; j <= cfg.g_y; ++j)
    books.phi[j - 1] = cfg.phi_c_min + j * cfg.phi_step();
  books.psi.resize(cfg.g_u);
  for (int k = 1; k <= cfg.g_u; ++k)
    books.psi[k - 1] = cfg.psi_c_min + k * cfg.psi_step();
  return books;
}

TruncatedSvd truncated_svd_mode1(const Tensor3& y, int rank,
                                 const ScenarioConfig& cfg) {
  if (std::min((cfg.p - 1) * cfg.t_a, cfg.q) < rank)
    throw UniquenessViolation("min((P-1)*T_a, Q) >= L does not hold");
  const MatrixXcd y1t = unfold(y, 1).transpose();  // T_a*P x Q
  Eigen::JacobiSVD<MatrixXcd> svd(y1t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  if (rank > sv.size() || sv[rank - 1] < 1e-12 * sv[0])
    throw RankDeficient("fewer than L resolvable components in the unfolding");
  TruncatedSvd out;
  out.u = svd.matrixU().leftCols(rank);
  out.v = svd.matrixV().leftCols(rank);
  out.singular_values = sv;
  return out;
}

ShiftInvarianceEvd shift_invariance_evd(const MatrixXcd& u,
                                        const ScenarioConfig& cfg) {
  const int block = cfg.t_a;
  const Eigen::Index rows = Eigen::Index(cfg.p - 1) * block;
  if (u.rows() != Eigen::Index(cfg.p) * block)
    throw ShapeMismatch("subspace rows do not match P*T_a");
  const MatrixXcd u1 = u.topRows(rows);
  const MatrixXcd u2 = u.bottomRows(rows);
  const MatrixXcd w = u1.completeOrthogonalDecomposition().solve(u2);

  Eigen::ComplexEigenSolver<MatrixXcd> eig(w);
  if (eig.info() != Eigen::Success)
    throw IllConditioned("eigendecomposition did not converge");

  ShiftInvarianceEvd out;
  out.z = eig.eigenvalues();
  out.m = eig.eigenvectors();

  Eigen::JacobiSVD<MatrixXcd> msvd(out.m);
  const VectorXd& msv = msvd.singularValues();
  out.m_condition = msv[0] / msv[msv.size() - 1];
  if (!(out.m_condition < 1e8))
    throw IllConditioned("near-coincident delays: cond(M) > 1e8");

  // Deterministic path order: phase descending.
  const int n = int(out.z.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::arg(out.z[a]) > std::arg(out.z[b]);
  });
  VectorXcd zs(n);
  MatrixXcd ms(out.m.rows(), n);
  for (int i = 0; i < n; ++i) {
    zs[i] = out.z[order[i]];
    ms.col(i) = out.m.col(order[i]);
  }
  out.z = zs;
  out.m = ms;
  return out;
}

DelayEstimate recover_delay(std::complex<double> z, const ScenarioConfig& cfg) {
  if (z == std::complex<double>(0.0, 0.0))
    throw IllConditioned("zero eigenvalue cannot carry a delay");
  const std::complex<double> zp = z / std::abs(z);
  DelayEstimate out;
  out.tau = -cfg.p0 / (2.0 * M_PI * cfg.f_s) * std::arg(zp);
  if (out.tau < 0.0) out.tau += cfg.delay_period();
  out.u = out.tau * kSpeedOfLight;
  out.c.resize(cfg.p);
  std::complex<double> acc = 1.0;
  for (int pi = 0; pi < cfg.p; ++pi) {
    acc *= zp;
    out.c[pi] = acc;
  }
  return out;
}

MatrixXcd recover_b_columns(const MatrixXcd& u, const MatrixXcd& m,
                            const std::vector<DelayEstimate>& delays,
                            const ScenarioConfig& cfg) {
  const int num_paths = int(delays.size());
  MatrixXcd b(cfg.t_a, num_paths);
  for (int l = 0; l < num_paths; ++l) {
    const VectorXcd um = u * m.col(l);  // stacked T_a blocks, one per p
    const VectorXcd& c = delays[l].c;
    const double cc = c.squaredNorm();
    VectorXcd acc = VectorXcd::Zero(cfg.t_a);
    for (int pi = 0; pi < cfg.p; ++pi)
      acc += std::conj(c[pi]) * um.segment(pi * cfg.t_a, cfg.t_a);
    b.col(l) = acc / cc;
  }
  return b;
}

namespace {

// pinv with an explicit column-rank check.
MatrixXcd pinv_checked(const MatrixXcd& m, int required_rank,
                       const char* what) {
  Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(m);
  if (cod.rank() < required_rank) throw SingularKhatriRao(what);
  return cod.pseudoInverse();
}

}  // namespace

MatrixXcd recover_a(const MatrixXcd& y1, const MatrixXcd& c_hat,
                    const MatrixXcd& b_hat) {
  const MatrixXcd cb_t = khatri_rao(c_hat, b_hat).transpose();
  return y1 * pinv_checked(cb_t, int(c_hat.cols()), "C kr B lost column rank");
}

IrsAngleEstimate search_irs_angles(const VectorXcd& a_hat, double u_hat,
                                   const Codebooks& books,
                                   const TrainingOperators& ops,
                                   const ScenarioConfig& cfg) {
  const double a_norm = a_hat.norm();
  IrsAngleEstimate best;
  double best_metric = -1.0;
  PathParams probe;
  probe.u = u_hat;
  MatrixXcd candidates(cfg.n_r(), books.phi.size());
  for (int i = 0; i < books.theta.size(); ++i) {
    probe.theta_e = books.theta[i];
    for (int j = 0; j < books.phi.size(); ++j) {
      probe.phi_a = books.phi[j];
      candidates.col(j) = irs_nf_response(probe, cfg);
    }
    const MatrixXcd projected = ops.vt * candidates;  // Q x G_y
    const Eigen::RowVectorXcd corr = a_hat.adjoint() * projected;
    for (int j = 0; j < books.phi.size(); ++j) {
      const double metric =
          std::norm(corr[j]) / (a_norm * projected.col(j).norm());
      if (metric > best_metric) {
        best_metric = metric;
        best.theta_e = books.theta[i];
        best.phi_a = books.phi[j];
      }
    }
  }
  best.peak = best_metric;
  return best;
}

UeAngleEstimate search_ue_angle(const VectorXcd& b_hat, const Codebooks& books,
                                const MatrixXcd& f, const ScenarioConfig& cfg) {
  const double b_norm = b_hat.norm();
  UeAngleEstimate best;
  double best_metric = -1.0;
  for (int k = 0; k < books.psi.size(); ++k) {
    const VectorXcd cand = f.adjoint() * ue_ff_response(books.psi[k], cfg);
    const double metric = std::norm(b_hat.dot(cand)) / (b_norm * cand.norm());
    if (metric > best_metric) {
      best_metric = metric;
      best.psi = books.psi[k];
    }
  }
  best.peak = best_metric;
  return best;
}

GainEstimate recover_gains(const MatrixXcd& y2, const MatrixXcd& a_bar,
                           const MatrixXcd& b_bar_ue, const MatrixXcd& c_bar) {
  const int num_paths = int(a_bar.cols());
  const MatrixXcd ca_t = khatri_rao(c_bar, a_bar).transpose();
  const MatrixXcd b_prime =
      y2 * pinv_checked(ca_t, num_paths, "C kr A lost column rank");
  const MatrixXcd gains_full =
      pinv_checked(b_bar_ue, num_paths, "UE steering matrix lost column rank") *
      b_prime;
  GainEstimate out;
  out.gamma = gains_full.diagonal();
  MatrixXcd off = gains_full;
  off.diagonal().setZero();
  out.leakage = off.norm();
  return out;
}

EstimationResult estimate(const MeasurementTensor& meas,
                          const ScenarioConfig& cfg, const Codebooks& books) {
  const int num_paths = cfg.l;
  const TruncatedSvd svd = truncated_svd_mode1(meas.data, num_paths, cfg);
  const ShiftInvarianceEvd evd = shift_invariance_evd(svd.u, cfg);

  EstimationResult res;
  res.diag.singular_values = svd.singular_values;
  res.diag.m_condition = evd.m_condition;
  res.diag.z_moduli = evd.z.cwiseAbs();

  std::vector<DelayEstimate> delays(num_paths);
  res.tau.resize(num_paths);
  res.u.resize(num_paths);
  res.c_hat.resize(cfg.p, num_paths);
  for (int l = 0; l < num_paths; ++l) {
    delays[l] = recover_delay(evd.z[l], cfg);
    res.tau[l] = delays[l].tau;
    res.u[l] = delays[l].u;
    res.c_hat.col(l) = delays[l].c;
  }

  res.b_hat = recover_b_columns(svd.u, evd.m, delays, cfg);
  const MatrixXcd y1 = unfold(meas.data, 1);
  res.a_hat = recover_a(y1, res.c_hat, res.b_hat);

  res.theta_e.resize(num_paths);
  res.phi_a.resize(num_paths);
  res.psi.resize(num_paths);
  res.diag.irs_peak.resize(num_paths);
  res.diag.ue_peak.resize(num_paths);
  MatrixXcd a_bar(cfg.q, num_paths);
  MatrixXcd b_bar_ue(cfg.t_a, num_paths);
  for (int l = 0; l < num_paths; ++l) {
    const IrsAngleEstimate irs =
        search_irs_angles(res.a_hat.col(l), res.u[l], books, meas.ops, cfg);
    res.theta_e[l] = irs.theta_e;
    res.phi_a[l] = irs.phi_a;
    res.diag.irs_peak[l] = irs.peak;

    const UeAngleEstimate ue =
        search_ue_angle(res.b_hat.col(l), books, meas.ops.f, cfg);
    res.psi[l] = ue.psi;
    res.diag.ue_peak[l] = ue.peak;

    PathParams est;
    est.theta_e = irs.theta_e;
    est.phi_a = irs.phi_a;
    est.u = res.u[l];
    a_bar.col(l) = meas.ops.vt * irs_nf_response(est, cfg);
    b_bar_ue.col(l) = meas.ops.f.adjoint() * ue_ff_response(ue.psi, cfg);
  }

  const MatrixXcd y2 = unfold(meas.data, 2);
  const GainEstimate gains = recover_gains(y2, a_bar, b_bar_ue, res.c_hat);
  res.gamma = gains.gamma;
  res.diag.gain_leakage = gains.leakage;
  return res;
}

}  // namespace nfce
