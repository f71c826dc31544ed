#pragma once

#include <Eigen/Dense>
#include <limits>

#include "nfce/channel.hpp"
#include "nfce/config.hpp"
#include "nfce/tensor_ops.hpp"

namespace nfce {

// Training-side quantities. The IRS phase patterns are drawn once per
// scenario and reused across all frames and subcarriers; with tau_bar = 0 the
// effective matrix Vt is subcarrier-independent.
struct TrainingOperators {
  VectorXcd w;          // combiner, unit norm (N_b)
  MatrixXcd f;          // pilot beams, columns x(t) (N_t x T_a)
  MatrixXcd v;          // IRS phase vectors, rows v_q, unit-modulus (Q x N_r)
  RowVectorXcd h_tilde; // w^H H_s (1 x N_r)
  MatrixXcd vt;         // effective training matrix, row q = v_q .* h_tilde
};

struct FactorMatrices {
  MatrixXcd a;  // Q x L, columns Vt * a_IRS
  MatrixXcd b;  // T_a x L, columns gamma_l * F^H * a_ue
  MatrixXcd c;  // P x L, Vandermonde columns z_l^p, p = 1..P
};

struct MeasurementTensor {
  Tensor3 data;  // Q x T_a x P
  TrainingOperators ops;
  double sigma2 = 0.0;       // applied noise variance
  double snr_linear = std::numeric_limits<double>::infinity();
};

// Unit-modulus random combiner/beams/phase patterns, deterministic in seed.
TrainingOperators make_training_operators(const ScenarioConfig& cfg,
                                          const BsIrsLink& link,
                                          std::uint64_t seed);

FactorMatrices ground_truth_factors(const PathSet& paths,
                                    const TrainingOperators& ops,
                                    const ScenarioConfig& cfg);

// Noiseless reception tensor, the triple outer-product sum of the ground
// truth factors. Throws UniquenessViolation if min((P-1)*T_a, Q) < L.
Tensor3 synthesize_noiseless(const PathSet& paths, const TrainingOperators& ops,
                             const ScenarioConfig& cfg);

// Adds i.i.d. circular Gaussian noise calibrated against the realized signal
// norm: sigma^2 = ||Y||_F^2 / (10^(snr/10) * Q*T_a*P). snr_db = +inf disables
// noise. Records the applied sigma^2 and the realized SNR.
MeasurementTensor add_noise(const Tensor3& noiseless,
                            const TrainingOperators& ops, double snr_db,
                            std::uint64_t seed);

}  // namespace nfce
