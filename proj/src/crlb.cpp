#include "nfce/crlb.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "nfce/errors.hpp"
#include "nfce/tensor_ops.hpp"

namespace nfce {

namespace {
constexpr std::complex<double> kJ{0.0, 1.0};
}

DerivativeMatrices build_derivative_matrices(const PathSet& paths,
                                             const TrainingOperators& ops,
                                             const ScenarioConfig& cfg) {
  const int num_paths = int(paths.size());
  DerivativeMatrices dm;
  dm.a1t.resize(cfg.q, num_paths);
  dm.a2t.resize(cfg.q, num_paths);
  dm.bt.resize(cfg.t_a, num_paths);
  dm.gt.resize(cfg.p, num_paths);
  dm.ca.resize(Eigen::Index(cfg.t_a) * cfg.q, num_paths);
  dm.cb.resize(num_paths, cfg.p);
  dm.a_tau.resize(cfg.q, num_paths);
  dm.dg.resize(cfg.p, num_paths);
  dm.b0.resize(cfg.t_a, num_paths);

  const FactorMatrices fm = ground_truth_factors(paths, ops, cfg);

  for (int l = 0; l < num_paths; ++l) {
    const auto& path = paths[l];
    dm.a1t.col(l) = ops.vt * irs_nf_response_deriv(path, cfg, IrsDeriv::Theta);
    dm.a2t.col(l) = ops.vt * irs_nf_response_deriv(path, cfg, IrsDeriv::Phi);
    dm.a_tau.col(l) = ops.vt * irs_nf_response_deriv(path, cfg, IrsDeriv::Tau);
    dm.bt.col(l) = path.gamma * (ops.f.adjoint() * ue_ff_response_dpsi(path.psi, cfg));
    dm.b0.col(l) = ops.f.adjoint() * ue_ff_response(path.psi, cfg);
    dm.gt.col(l) = fm.c.col(l);
    for (int pi = 1; pi <= cfg.p; ++pi)
      dm.dg(pi - 1, l) =
          fm.c(pi - 1, l) * (-kJ * 2.0 * M_PI * cfg.f_s * double(pi) / double(cfg.p0));
    dm.cb.row(l) = path.gamma * dm.dg.col(l).transpose();
    // Column of d(B kr A)/dtau: B fixed, A differentiated.
    for (int t = 0; t < cfg.t_a; ++t)
      dm.ca.block(Eigen::Index(t) * cfg.q, l, cfg.q, 1) =
          fm.b(t, l) * dm.a_tau.col(l);
  }
  return dm;
}

namespace {

MatrixXcd gram(const MatrixXcd& x, const MatrixXcd& y) { return x.adjoint() * y; }

MatrixXcd had3(const MatrixXcd& a, const MatrixXcd& b, const MatrixXcd& c) {
  return a.cwiseProduct(b).cwiseProduct(c);
}

}  // namespace

FimMatrix assemble_fim(const PathSet& paths, const TrainingOperators& ops,
                       const ScenarioConfig& cfg, double sigma2) {
  if (!(sigma2 > 0.0)) throw SingularFim("noise variance must be positive");
  const int num_paths = int(paths.size());
  const FactorMatrices fm = ground_truth_factors(paths, ops, cfg);
  const DerivativeMatrices dm = build_derivative_matrices(paths, ops, cfg);

  const MatrixXcd& a = fm.a;
  const MatrixXcd& b = fm.b;
  const MatrixXcd& c = fm.c;

  // Factor Grams shared by every block.
  const MatrixXcd gbb = gram(b, b);
  const MatrixXcd gcc = gram(c, c);
  const MatrixXcd gaa = gram(a, a);

  // Blocks of the derivative Gram S(i,j) = D_i^H D_j, assembled as Hadamard
  // products of factor Grams (one product per covariance term; the tau row
  // and column carry the two chain-rule terms).
  const int n = 5 * num_paths;
  MatrixXcd s(n, n);
  auto blk = [&](int bi, int bj) {
    return s.block(bi * num_paths, bj * num_paths, num_paths, num_paths);
  };

  blk(0, 0) = had3(gram(dm.a1t, dm.a1t), gbb, gcc);
  blk(0, 1) = had3(gram(dm.a1t, dm.a2t), gbb, gcc);
  blk(0, 2) = had3(gram(dm.a1t, a), gram(b, dm.bt), gcc);
  blk(0, 3) = had3(gram(dm.a1t, dm.a_tau), gbb, gcc) +
              had3(gram(dm.a1t, a), gbb, gram(c, dm.dg));
  blk(0, 4) = had3(gram(dm.a1t, a), gram(b, dm.b0), gcc);

  blk(1, 1) = had3(gram(dm.a2t, dm.a2t), gbb, gcc);
  blk(1, 2) = had3(gram(dm.a2t, a), gram(b, dm.bt), gcc);
  blk(1, 3) = had3(gram(dm.a2t, dm.a_tau), gbb, gcc) +
              had3(gram(dm.a2t, a), gbb, gram(c, dm.dg));
  blk(1, 4) = had3(gram(dm.a2t, a), gram(b, dm.b0), gcc);

  blk(2, 2) = had3(gaa, gram(dm.bt, dm.bt), gcc);
  blk(2, 3) = had3(gram(a, dm.a_tau), gram(dm.bt, b), gcc) +
              had3(gaa, gram(dm.bt, b), gram(c, dm.dg));
  blk(2, 4) = had3(gaa, gram(dm.bt, dm.b0), gcc);

  blk(3, 3) = had3(gram(dm.a_tau, dm.a_tau), gbb, gcc) +
              had3(gram(dm.a_tau, a), gbb, gram(c, dm.dg)) +
              had3(gram(a, dm.a_tau), gbb, gram(dm.dg, c)) +
              had3(gaa, gbb, gram(dm.dg, dm.dg));
  blk(3, 4) = had3(gram(dm.a_tau, a), gram(b, dm.b0), gcc) +
              had3(gaa, gram(b, dm.b0), gram(dm.dg, c));

  blk(4, 4) = had3(gaa, gram(dm.b0, dm.b0), gcc);

  for (int bi = 1; bi < 5; ++bi)
    for (int bj = 0; bj < bi; ++bj) blk(bi, bj) = blk(bj, bi).adjoint();

  FimMatrix fim;
  fim.num_paths = num_paths;
  fim.sigma2 = sigma2;
  fim.j.resize(n, n);
  const int nr = 4 * num_paths;  // real-parameter rows
  // Real-parameter blocks double the real part; gain blocks keep the plain
  // covariance, which stays Hermitian PSD overall.
  fim.j.topLeftCorner(nr, nr) =
      (2.0 / sigma2) * s.topLeftCorner(nr, nr).real().cast<std::complex<double>>();
  fim.j.topRightCorner(nr, num_paths) = (1.0 / sigma2) * s.topRightCorner(nr, num_paths);
  fim.j.bottomLeftCorner(num_paths, nr) = (1.0 / sigma2) * s.bottomLeftCorner(num_paths, nr);
  fim.j.bottomRightCorner(num_paths, num_paths) =
      (1.0 / sigma2) * s.bottomRightCorner(num_paths, num_paths);
  return fim;
}

SparseCovariance noise_cross_covariance(int mode_a, int mode_b,
                                        const ScenarioConfig& cfg,
                                        double sigma2) {
  if (mode_a < 1 || mode_a > 3 || mode_b < 1 || mode_b > 3)
    throw InvalidMode("covariance modes must be 1, 2 or 3");
  SparseCovariance cov;
  cov.dim = long(cfg.q) * cfg.t_a * cfg.p;
  cov.value = sigma2;
  cov.entries.reserve(cov.dim);
  for (int p = 1; p <= cfg.p; ++p)
    for (int t = 1; t <= cfg.t_a; ++t)
      for (int q = 1; q <= cfg.q; ++q) {
        const auto idx = vec_index_maps(q, t, p, cfg.q, cfg.t_a, cfg.p);
        cov.entries.emplace_back(idx[mode_a - 1], idx[mode_b - 1]);
      }
  return cov;
}

CrlbReport crlb_parameters(const FimMatrix& fim) {
  CrlbReport rep;
  rep.sigma2 = fim.sigma2;
  const int num_paths = fim.num_paths;
  const int n = 5 * num_paths;

  MatrixXcd j = fim.j;
  Eigen::JacobiSVD<MatrixXcd> svd(j);
  const VectorXd& sv = svd.singularValues();
  if (!(sv[n - 1] > 0.0) || sv[0] / sv[n - 1] > 1e12) {
    const double eps = 1e-12 * j.trace().real() / n;
    j += eps * MatrixXcd::Identity(n, n);
    rep.regularized = true;
  }
  const MatrixXcd jinv = j.inverse();

  auto family_trace = [&](int f) {
    return jinv.block(f * num_paths, f * num_paths, num_paths, num_paths)
        .trace()
        .real();
  };
  rep.total = jinv.trace().real();
  rep.theta_e = family_trace(0);
  rep.phi_a = family_trace(1);
  rep.psi = family_trace(2);
  rep.tau = family_trace(3);
  rep.gamma = family_trace(4);
  return rep;
}

PhysicalSteering physical_steering(const PathSet& paths, const ScenarioConfig& cfg) {
  const int num_paths = int(paths.size());
  PhysicalSteering ps;
  ps.a_r.resize(cfg.n_r(), num_paths);
  ps.a_u.resize(cfg.n_t, num_paths);
  ps.c.resize(cfg.p, num_paths);
  for (int l = 0; l < num_paths; ++l) {
    ps.a_r.col(l) = irs_nf_response(paths[l], cfg);
    ps.a_u.col(l) = ue_ff_response(paths[l].psi, cfg);
    const std::complex<double> z = delay_generator(paths[l].tau(), cfg);
    std::complex<double> zp = 1.0;
    for (int pi = 0; pi < cfg.p; ++pi) {
      zp *= z;
      ps.c(pi, l) = zp;
    }
  }
  return ps;
}

VectorXcd channel_vec(const PathSet& paths, const ScenarioConfig& cfg) {
  const PhysicalSteering ps = physical_steering(paths, cfg);
  VectorXcd gamma(paths.size());
  for (std::size_t l = 0; l < paths.size(); ++l) gamma[l] = paths[l].gamma;
  return khatri_rao(khatri_rao(ps.c, ps.a_u.conjugate()), ps.a_r) * gamma;
}

MatrixXcd channel_jacobian(const PathSet& paths, const ScenarioConfig& cfg) {
  const int num_paths = int(paths.size());
  const PhysicalSteering ps = physical_steering(paths, cfg);
  const Eigen::Index dim = Eigen::Index(cfg.n_r()) * cfg.n_t * cfg.p;
  MatrixXcd jac = MatrixXcd::Zero(dim, 5 * num_paths);

  auto triple = [&](const VectorXcd& cc, const VectorXcd& uu, const VectorXcd& rr) {
    VectorXcd out(dim);
    Eigen::Index i = 0;
    for (int pi = 0; pi < cfg.p; ++pi)
      for (int nt = 0; nt < cfg.n_t; ++nt) {
        out.segment(i, cfg.n_r()) = cc[pi] * uu[nt] * rr;
        i += cfg.n_r();
      }
    return out;
  };

  for (int l = 0; l < num_paths; ++l) {
    const auto& path = paths[l];
    const VectorXcd au_conj = ps.a_u.col(l).conjugate();
    const VectorXcd dtheta = irs_nf_response_deriv(path, cfg, IrsDeriv::Theta);
    const VectorXcd dphi = irs_nf_response_deriv(path, cfg, IrsDeriv::Phi);
    const VectorXcd dtau_r = irs_nf_response_deriv(path, cfg, IrsDeriv::Tau);
    const VectorXcd dpsi_conj = ue_ff_response_dpsi(path.psi, cfg).conjugate();
    VectorXcd dg(cfg.p);
    for (int pi = 1; pi <= cfg.p; ++pi)
      dg[pi - 1] = ps.c(pi - 1, l) * (-kJ * 2.0 * M_PI * cfg.f_s * double(pi) / double(cfg.p0));

    jac.col(0 * num_paths + l) = path.gamma * triple(ps.c.col(l), au_conj, dtheta);
    jac.col(1 * num_paths + l) = path.gamma * triple(ps.c.col(l), au_conj, dphi);
    jac.col(2 * num_paths + l) = path.gamma * triple(ps.c.col(l), dpsi_conj, ps.a_r.col(l));
    jac.col(3 * num_paths + l) =
        path.gamma * (triple(dg, au_conj, ps.a_r.col(l)) +
                      triple(ps.c.col(l), au_conj, dtau_r));
    jac.col(4 * num_paths + l) = triple(ps.c.col(l), au_conj, ps.a_r.col(l));
  }
  return jac;
}

double crlb_channel(const FimMatrix& fim, const PathSet& paths,
                    const ScenarioConfig& cfg) {
  const int n = 5 * fim.num_paths;
  const MatrixXcd jac = channel_jacobian(paths, cfg);
  const MatrixXcd gh = jac.adjoint() * jac;

  MatrixXcd j = fim.j;
  Eigen::JacobiSVD<MatrixXcd> svd(j);
  const VectorXd& sv = svd.singularValues();
  if (!(sv[n - 1] > 0.0) || sv[0] / sv[n - 1] > 1e12)
    j += (1e-12 * j.trace().real() / n) * MatrixXcd::Identity(n, n);
  return j.ldlt().solve(gh).trace().real();
}

CrlbReport crlb_report(const PathSet& paths, const TrainingOperators& ops,
                       const ScenarioConfig& cfg, double sigma2) {
  const FimMatrix fim = assemble_fim(paths, ops, cfg, sigma2);
  CrlbReport rep = crlb_parameters(fim);
  rep.channel = crlb_channel(fim, paths, cfg);
  return rep;
}

}  // namespace nfce
