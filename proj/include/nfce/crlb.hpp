#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "nfce/measurement.hpp"

namespace nfce {

using Eigen::VectorXd;

// Analytic parameter derivatives of the factor constructions. The tau
// derivatives carry the chain rule through both the array response (via
// u = c*tau) and the Vandermonde delay factor.
struct DerivativeMatrices {
  MatrixXcd a1t;  // Q x L, dA/dtheta_e columns
  MatrixXcd a2t;  // Q x L, dA/dphi_a columns
  MatrixXcd bt;   // T_a x L, dB/dpsi columns
  MatrixXcd gt;   // P x L, gain-derivative columns g(tau_l)
  MatrixXcd ca;   // T_a*Q x L, d(B kr A)/dtau columns
  MatrixXcd cb;   // L x P, rows gamma_l * dg(tau_l)^T/dtau
  // Per-factor pieces behind ca/cb, reused by the FIM assembly.
  MatrixXcd a_tau;  // Q x L, dA/dtau columns
  MatrixXcd dg;     // P x L, dg/dtau columns (no gain)
  MatrixXcd b0;     // T_a x L, gain-free UE columns F^H a_ue
};

DerivativeMatrices build_derivative_matrices(const PathSet& paths,
                                             const TrainingOperators& ops,
                                             const ScenarioConfig& cfg);

// Fisher information for p_e = [theta_e; phi_a; psi; tau; gamma], Hermitian
// PSD 5L x 5L. Real-parameter blocks carry the 2*Re{.} form; blocks touching
// the complex gains keep the single-covariance form (the second expectation
// vanishes for circular noise), which maps onto the real-parameter FIM as
// 2*[[Re, -Im], [Im, Re]].
struct FimMatrix {
  MatrixXcd j;
  int num_paths = 0;
  double sigma2 = 0.0;
};

FimMatrix assemble_fim(const PathSet& paths, const TrainingOperators& ops,
                       const ScenarioConfig& cfg, double sigma2);

// Nonzero entries of the cross-covariance between two noise unfoldings,
// E{vec(W_a^H) vec(W_b)^T}-style: one sigma^2 entry per tensor cell at the
// positions given by vec_index_maps. Same-mode covariance is sigma^2 * I.
struct SparseCovariance {
  long dim = 0;
  double value = 0.0;  // sigma^2
  std::vector<std::pair<long, long>> entries;  // 1-based index pairs
};
SparseCovariance noise_cross_covariance(int mode_a, int mode_b,
                                        const ScenarioConfig& cfg,
                                        double sigma2);

struct CrlbReport {
  double total = 0.0;  // tr(J^-1)
  double theta_e = 0.0, phi_a = 0.0, psi = 0.0, tau = 0.0, gamma = 0.0;
  double channel = 0.0;
  double sigma2 = 0.0;
  bool regularized = false;  // set when the solve needed regularization
};

// Per-family traces of the corresponding L x L diagonal sub-blocks of J^-1.
// Regularizes by +1e-12*tr(J)/(5L)*I when cond(J) > 1e12 and flags it.
CrlbReport crlb_parameters(const FimMatrix& fim);

// Physical (training-free) steering matrices of the path set.
struct PhysicalSteering {
  MatrixXcd a_r;  // N_r x L near-field IRS responses
  MatrixXcd a_u;  // N_t x L UE responses
  MatrixXcd c;    // P x L delay factor
};
PhysicalSteering physical_steering(const PathSet& paths, const ScenarioConfig& cfg);

// Vectorized overall channel h_v = (C kr conj(A_U) kr A_R) * gamma.
VectorXcd channel_vec(const PathSet& paths, const ScenarioConfig& cfg);

// Jacobian of h_v with respect to p_e, one column per parameter, Khatri-Rao
// products with a single differentiated factor.
MatrixXcd channel_jacobian(const PathSet& paths, const ScenarioConfig& cfg);

// tr(Jac J^-1 Jac^H), the overall-channel bound.
double crlb_channel(const FimMatrix& fim, const PathSet& paths,
                    const ScenarioConfig& cfg);

// Full report: parameter families plus the overall channel.
CrlbReport crlb_report(const PathSet& paths, const TrainingOperators& ops,
                       const ScenarioConfig& cfg, double sigma2);

}  // namespace nfce
