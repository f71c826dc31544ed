#include "nfce/measurement.hpp"

#include <cmath>

#include "nfce/errors.hpp"
#include "nfce/rng.hpp"

namespace nfce {

TrainingOperators make_training_operators(const ScenarioConfig& cfg,
                                          const BsIrsLink& link,
                                          std::uint64_t seed) {
  TrainingOperators ops;
  RngStream rng(seed);

  ops.w.resize(cfg.n_b);
  for (int i = 0; i < cfg.n_b; ++i)
    ops.w[i] = rng.unit_phase() / std::sqrt(double(cfg.n_b));

  ops.f.resize(cfg.n_t, cfg.t_a);
  for (int t = 0; t < cfg.t_a; ++t)
    for (int n = 0; n < cfg.n_t; ++n)
      ops.f(n, t) = rng.unit_phase() / std::sqrt(double(cfg.n_t));

  ops.v.resize(cfg.q, cfg.n_r());
  for (int qi = 0; qi < cfg.q; ++qi)
    for (int k = 0; k < cfg.n_r(); ++k) ops.v(qi, k) = rng.unit_phase();

  // Subcarrier-independent part of w^H H_s; the tau_bar phase is common to
  // the whole training block and assumed zero.
  ops.h_tilde = link.alpha * (ops.w.adjoint() * bs_ff_response(link.phi_b, cfg)) *
                irs_ff_response(link.theta_irs, link.phi_irs, cfg).adjoint();

  ops.vt = ops.v.array().rowwise() * ops.h_tilde.array();
  return ops;
}

FactorMatrices ground_truth_factors(const PathSet& paths,
                                    const TrainingOperators& ops,
                                    const ScenarioConfig& cfg) {
  const int num_paths = int(paths.size());
  FactorMatrices fm;
  fm.a.resize(cfg.q, num_paths);
  fm.b.resize(cfg.t_a, num_paths);
  fm.c.resize(cfg.p, num_paths);
  for (int l = 0; l < num_paths; ++l) {
    const auto& path = paths[l];
    fm.a.col(l) = ops.vt * irs_nf_response(path, cfg);
    fm.b.col(l) = path.gamma * (ops.f.adjoint() * ue_ff_response(path.psi, cfg));
    const std::complex<double> z = delay_generator(path.tau(), cfg);
    std::complex<double> zp = 1.0;
    for (int pi = 0; pi < cfg.p; ++pi) {
      zp *= z;
      fm.c(pi, l) = zp;
    }
  }
  return fm;
}

Tensor3 synthesize_noiseless(const PathSet& paths, const TrainingOperators& ops,
                             const ScenarioConfig& cfg) {
  if (std::min((cfg.p - 1) * cfg.t_a, cfg.q) < int(paths.size()))
    throw UniquenessViolation("min((P-1)*T_a, Q) >= L does not hold");
  const FactorMatrices fm = ground_truth_factors(paths, ops, cfg);
  return cp_tensor(fm.a, fm.b, fm.c);
}

MeasurementTensor add_noise(const Tensor3& noiseless,
                            const TrainingOperators& ops, double snr_db,
                            std::uint64_t seed) {
  MeasurementTensor meas;
  meas.ops = ops;
  meas.data = noiseless;
  if (std::isinf(snr_db) && snr_db > 0) {
    meas.sigma2 = 0.0;
    meas.snr_linear = std::numeric_limits<double>::infinity();
    return meas;
  }
  const double signal_energy = noiseless.vec().squaredNorm();
  const double snr_lin = std::pow(10.0, snr_db / 10.0);
  const double entries = double(noiseless.size());
  meas.sigma2 = signal_energy / (snr_lin * entries);

  RngStream rng(seed);
  const double scale = std::sqrt(meas.sigma2);
  double noise_energy = 0.0;
  for (Eigen::Index i = 0; i < meas.data.vec().size(); ++i) {
    const std::complex<double> n = scale * rng.complex_normal();
    noise_energy += std::norm(n);
    meas.data.vec()[i] += n;
  }
  meas.snr_linear = signal_energy / noise_energy;
  return meas;
}

}  // namespace nfce
