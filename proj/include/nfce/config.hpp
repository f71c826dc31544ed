#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace nfce {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact

// One propagation path between the UE and the IRS. Distance and delay are
// tied by u = tau * c at all times.
struct PathParams {
  double theta_e = 0.0;  // elevation AoA at the IRS [rad]
  double phi_a = 0.0;    // azimuth AoA at the IRS [rad]
  double psi = 0.0;      // AoD at the UE [rad]
  double u = 1.0;        // IRS-scatterer distance [m]
  std::complex<double> gamma{1.0, 0.0};

  double tau() const { return u / kSpeedOfLight; }
};

using PathSet = std::vector<PathParams>;

// Static BS-IRS link (assumed known). tau_bar defaults to 0 so the effective
// training matrix is subcarrier-independent.
struct BsIrsLink {
  std::complex<double> alpha{1.0, 0.0};
  double tau_bar = 0.0;    // [s]
  double phi_b = 0.5;      // AoA at the BS [rad]
  double theta_irs = 1.0;  // far-field elevation departure at the IRS [rad]
  double phi_irs = 0.7;    // far-field azimuth departure at the IRS [rad]
};

struct AngleRange {
  double lo = 0.0;
  double hi = 0.0;
  double span() const { return hi - lo; }
};

// All physical and training constants. Defaults are the desk-scale setup
// (fast enough for full Monte Carlo sweeps on one core); paper_scale()
// switches to the published array sizes.
struct ScenarioConfig {
  // Array geometry.
  int n_y = 8;  // IRS rows
  int n_z = 8;  // IRS columns
  int n_t = 16; // UE elements
  int n_b = 16; // BS elements
  double spacing = 0.0;  // element spacing d [m]; 0 means lambda_c/2

  // Waveform.
  double f_c = 100e9;  // carrier [Hz]
  double f_s = 320e6;  // sampling frequency [Hz]
  int p0 = 256;        // total subcarriers
  int p = 16;          // training subcarriers (consecutive, 1..p)

  // Training dimensions.
  int t_a = 16;  // time frames
  int q = 16;    // time slots per frame
  int l = 4;     // path count (known rank)

  // Path sampling ranges. Elevation on (0, pi) and azimuth/AoD on
  // (-pi/2, pi/2) keep the steering map injective; the full (0, 2*pi)
  // circle is reachable through configuration.
  AngleRange theta_range{0.0, M_PI};
  AngleRange phi_range{-M_PI / 2.0, M_PI / 2.0};
  AngleRange psi_range{-M_PI / 2.0, M_PI / 2.0};
  AngleRange u_range{1.0, 6.0};  // [m]

  // Codebook grids; step <= 0 means span/grid-size, min defaults to the
  // matching sampling range minimum.
  int g_z = 180;
  int g_y = 180;
  int g_u = 720;
  double theta_c_min = 0.0, dtheta_c = 0.0;
  double phi_c_min = -M_PI / 2.0, dphi_c = 0.0;
  double psi_c_min = -M_PI / 2.0, dpsi_c = 0.0;

  std::uint64_t seed = 1;

  BsIrsLink link;

  int n_r() const { return n_y * n_z; }
  double lambda_c() const { return kSpeedOfLight / f_c; }
  double d() const { return spacing > 0.0 ? spacing : lambda_c() / 2.0; }
  // Unambiguous delay period of the Vandermonde generator.
  double delay_period() const { return static_cast<double>(p0) / f_s; }

  double theta_step() const { return dtheta_c > 0.0 ? dtheta_c : theta_range.span() / g_z; }
  double phi_step() const { return dphi_c > 0.0 ? dphi_c : phi_range.span() / g_y; }
  double psi_step() const { return dpsi_c > 0.0 ? dpsi_c : psi_range.span() / g_u; }

  // Throws ConfigError on a violated invariant, UniquenessViolation when
  // min((P-1)*T_a, Q) < L.
  void validate() const;

  static ScenarioConfig paper_scale();
};

// Loads "key = value" text; unknown keys are rejected. Every default above is
// overridable. '#' starts a comment.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text);

// Applies a single key=value override to an existing config.
void apply_config_entry(ScenarioConfig& cfg, const std::string& key,
                        const std::string& value);

std::string config_to_text(const ScenarioConfig& cfg);

}  // namespace nfce
