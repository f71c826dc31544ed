#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nfce/measurement.hpp"

namespace nfce {

using Eigen::VectorXd;

// Reduced, distance-conditioned search grids: the delay stage pins the
// distance, so only angles remain to be searched.
struct Codebooks {
  VectorXd theta;  // elevation lattice, size G_z, value i = min + (i+1)*step
  VectorXd phi;    // azimuth lattice, size G_y
  VectorXd psi;    // UE angle lattice, size G_u
};

Codebooks build_codebooks(const ScenarioConfig& cfg);

struct EstimationDiagnostics {
  VectorXd singular_values;     // full spectrum of the mode-1 unfolding
  VectorXd z_moduli;            // |z_l| before the unit-circle projection
  double m_condition = 0.0;     // cond of the eigenvector matrix
  VectorXd irs_peak;            // codebook correlation peak per path
  VectorXd ue_peak;
  double gain_leakage = 0.0;    // off-diagonal mass left by the gain solve
};

struct EstimationResult {
  VectorXd theta_e, phi_a, psi, tau, u;  // per-path estimates
  VectorXcd gamma;
  MatrixXcd a_hat, b_hat, c_hat;
  EstimationDiagnostics diag;
};

// Top-L left singular vectors of the transposed mode-1 unfolding
// (T_a*P x Q). Throws RankDeficient when the L-th singular value collapses
// below 1e-12 of the first.
struct TruncatedSvd {
  MatrixXcd u;           // T_a*P x L
  VectorXd singular_values;  // all of them, nonincreasing
  MatrixXcd v;           // Q x L
};
TruncatedSvd truncated_svd_mode1(const Tensor3& y, int rank,
                                 const ScenarioConfig& cfg);

// Shift-invariance eigendecomposition: pinv(U1) * U2 = M Z M^-1 with U1/U2
// the first/last (P-1)*T_a row blocks of U. Eigenvalues are returned sorted
// by phase descending together with the matching eigenvector columns.
// Throws IllConditioned when cond(M) exceeds 1e8.
struct ShiftInvarianceEvd {
  VectorXcd z;    // L eigenvalues
  MatrixXcd m;    // L x L eigenvectors
  double m_condition = 0.0;
};
ShiftInvarianceEvd shift_invariance_evd(const MatrixXcd& u,
                                        const ScenarioConfig& cfg);

// Projects z onto the unit circle and inverts the delay phase into
// [0, P0/f_s); u follows as tau * c.
struct DelayEstimate {
  double tau = 0.0;
  double u = 0.0;
  VectorXcd c;  // [z^1 .. z^P] from the projected value
};
DelayEstimate recover_delay(std::complex<double> z, const ScenarioConfig& cfg);

// Per-path Khatri-Rao slice extraction: b_l = ((c^H / c^H c) kron I_T) U m_l.
MatrixXcd recover_b_columns(const MatrixXcd& u, const MatrixXcd& m,
                            const std::vector<DelayEstimate>& delays,
                            const ScenarioConfig& cfg);

// Least-squares factor recovery A = Y_(1) * pinv((C kr B)^T). Throws
// SingularKhatriRao when C kr B loses column rank.
MatrixXcd recover_a(const MatrixXcd& y1, const MatrixXcd& c_hat,
                    const MatrixXcd& b_hat);

// Grid search of the distance-conditioned IRS codebook. Ties go to the
// smallest (i, j) lexicographic grid index. Returns the grid values and the
// winning correlation (diagnostic).
struct IrsAngleEstimate {
  double theta_e = 0.0;
  double phi_a = 0.0;
  double peak = 0.0;
};
IrsAngleEstimate search_irs_angles(const VectorXcd& a_hat, double u_hat,
                                   const Codebooks& books,
                                   const TrainingOperators& ops,
                                   const ScenarioConfig& cfg);

struct UeAngleEstimate {
  double psi = 0.0;
  double peak = 0.0;
};
UeAngleEstimate search_ue_angle(const VectorXcd& b_hat, const Codebooks& books,
                                const MatrixXcd& f, const ScenarioConfig& cfg);

// Double least-squares gain recovery from the mode-2 unfolding and the
// steering matrices rebuilt from the estimated parameters. The off-diagonal
// mass of the final solve is reported as leakage.
struct GainEstimate {
  VectorXcd gamma;
  double leakage = 0.0;
};
GainEstimate recover_gains(const MatrixXcd& y2, const MatrixXcd& a_bar,
                           const MatrixXcd& b_bar_ue, const MatrixXcd& c_bar);

// Runs the full pipeline: SVD, shift-invariance EVD, delay recovery, factor
// recovery, codebook searches, gain recovery. Deterministic given inputs.
EstimationResult estimate(const MeasurementTensor& meas,
                          const ScenarioConfig& cfg, const Codebooks& books);

}  // namespace nfce
