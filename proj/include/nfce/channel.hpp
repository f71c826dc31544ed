#pragma once

#include <Eigen/Dense>

#include "nfce/config.hpp"
#include "nfce/rng.hpp"

namespace nfce {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// IRS elements are flattened with n_y fastest: k = (n_z - 1) * N_y + n_y
// (1-based). Every function below uses this map.
inline int irs_flat_index(int ny, int nz, const ScenarioConfig& cfg) {
  return (nz - 1) * cfg.n_y + ny;  // 1-based
}

// Distance from the scatterer of `path` to IRS element (n_y, n_z); the
// reference element (1, 1) sits at the origin and gives exactly path.u.
double nf_element_distance(const PathParams& path, int ny, int nz,
                           const ScenarioConfig& cfg);

// Near-field IRS array response: unit-modulus entries exp(-j*2*pi*du/lambda)
// with du the per-element excess distance over the reference element.
VectorXcd irs_nf_response(const PathParams& path, const ScenarioConfig& cfg);

// Far-field ULA responses, entry n = exp(-j*2*pi*(n-1)*d*sin(angle)/lambda).
VectorXcd ue_ff_response(double psi, const ScenarioConfig& cfg);
VectorXcd bs_ff_response(double phi_b, const ScenarioConfig& cfg);

// Far-field IRS (UPA) response, separable in the row/column offsets and laid
// out with the same flattening as irs_nf_response.
VectorXcd irs_ff_response(double theta, double phi, const ScenarioConfig& cfg);

// UE-IRS multipath channel at training subcarrier p (1-based).
MatrixXcd ue_irs_channel(const PathSet& paths, int p, const ScenarioConfig& cfg);

// Rank-1 BS-IRS channel at subcarrier p (1-based).
MatrixXcd bs_irs_channel(const BsIrsLink& link, int p, const ScenarioConfig& cfg);

// 2*D^2/lambda with D the larger IRS aperture side length.
double rayleigh_distance(const ScenarioConfig& cfg);

// Analytic parameter derivatives of the steering vectors; tau derivatives
// follow the u = c*tau tie through both the excess distance and the
// reference distance.
enum class IrsDeriv { Theta, Phi, Tau };
VectorXcd irs_nf_response_deriv(const PathParams& path, const ScenarioConfig& cfg,
                                IrsDeriv which);
VectorXcd ue_ff_response_dpsi(double psi, const ScenarioConfig& cfg);

// Delay-phase generator z = exp(-j*2*pi*f_s*tau/P_0).
std::complex<double> delay_generator(double tau, const ScenarioConfig& cfg);

// Draws L paths: u uniform on the distance range, angles uniform on their
// ranges, gains circular Gaussian. Resamples until the delay generators are
// pairwise separated by at least `min_z_gap` (keeps the shift-invariance
// eigenvalues distinct).
PathSet sample_paths(const ScenarioConfig& cfg, RngStream& rng,
                     double min_z_gap = 1e-3);

// Same, but angles snapped onto the codebook lattices and |gamma| kept away
// from zero so every path stays resolvable. Used by validation runs.
PathSet sample_paths_on_grid(const ScenarioConfig& cfg, RngStream& rng,
                             double min_z_gap = 1e-3, double min_gain = 0.05);

}  // namespace nfce
