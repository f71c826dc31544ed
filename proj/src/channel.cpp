#include "nfce/channel.hpp"

#include <cmath>

#include "nfce/errors.hpp"

namespace nfce {

namespace {
constexpr std::complex<double> kJ{0.0, 1.0};
}

double nf_element_distance(const PathParams& path, int ny, int nz,
                           const ScenarioConfig& cfg) {
  const double d = cfg.d();
  const double oy = (ny - 1) * d;
  const double oz = (nz - 1) * d;
  const double u = path.u;
  const double s2 = u * u + oy * oy + oz * oz -
                    2.0 * oy * u * std::sin(path.theta_e) * std::sin(path.phi_a) -
                    2.0 * oz * u * std::cos(path.theta_e);
  return std::sqrt(s2);
}

VectorXcd irs_nf_response(const PathParams& path, const ScenarioConfig& cfg) {
  VectorXcd a(cfg.n_r());
  const double lam = cfg.lambda_c();
  const double d = cfg.d();
  const double u = path.u;
  const double ss = std::sin(path.theta_e) * std::sin(path.phi_a);
  const double ct = std::cos(path.theta_e);
  int k = 0;
  for (int nz = 0; nz < cfg.n_z; ++nz) {
    const double oz = nz * d;
    for (int ny = 0; ny < cfg.n_y; ++ny, ++k) {
      const double oy = ny * d;
      const double uk = std::sqrt(u * u + oy * oy + oz * oz -
                                  2.0 * oy * u * ss - 2.0 * oz * u * ct);
      a[k] = std::polar(1.0, -2.0 * M_PI * (uk - u) / lam);
    }
  }
  return a;
}

namespace {
VectorXcd ula_response(int n_elem, double effective_sine, double d, double lam) {
  VectorXcd a(n_elem);
  for (int n = 1; n <= n_elem; ++n)
    a[n - 1] = std::polar(1.0, -2.0 * M_PI * (n - 1) * d * effective_sine / lam);
  return a;
}
}  // namespace

VectorXcd ue_ff_response(double psi, const ScenarioConfig& cfg) {
  return ula_response(cfg.n_t, std::sin(psi), cfg.d(), cfg.lambda_c());
}

VectorXcd bs_ff_response(double phi_b, const ScenarioConfig& cfg) {
  return ula_response(cfg.n_b, std::sin(phi_b), cfg.d(), cfg.lambda_c());
}

VectorXcd irs_ff_response(double theta, double phi, const ScenarioConfig& cfg) {
  const VectorXcd ay =
      ula_response(cfg.n_y, std::sin(theta) * std::sin(phi), cfg.d(), cfg.lambda_c());
  const VectorXcd az = ula_response(cfg.n_z, std::cos(theta), cfg.d(), cfg.lambda_c());
  VectorXcd a(cfg.n_r());
  for (int nz = 1; nz <= cfg.n_z; ++nz)
    for (int ny = 1; ny <= cfg.n_y; ++ny)
      a[irs_flat_index(ny, nz, cfg) - 1] = ay[ny - 1] * az[nz - 1];
  return a;
}

std::complex<double> delay_generator(double tau, const ScenarioConfig& cfg) {
  return std::polar(1.0, -2.0 * M_PI * cfg.f_s * tau / cfg.p0);
}

MatrixXcd ue_irs_channel(const PathSet& paths, int p, const ScenarioConfig& cfg) {
  if (p < 1 || p > cfg.p) throw IndexOutOfRange("subcarrier index out of range");
  MatrixXcd h = MatrixXcd::Zero(cfg.n_r(), cfg.n_t);
  for (const auto& path : paths) {
    const std::complex<double> phase =
        std::pow(delay_generator(path.tau(), cfg), p);
    h.noalias() += path.gamma * phase * irs_nf_response(path, cfg) *
                   ue_ff_response(path.psi, cfg).adjoint();
  }
  return h;
}

MatrixXcd bs_irs_channel(const BsIrsLink& link, int p, const ScenarioConfig& cfg) {
  if (p < 1 || p > cfg.p) throw IndexOutOfRange("subcarrier index out of range");
  const std::complex<double> phase =
      std::polar(1.0, -2.0 * M_PI * cfg.f_s * link.tau_bar * p / cfg.p0);
  return link.alpha * phase * bs_ff_response(link.phi_b, cfg) *
         irs_ff_response(link.theta_irs, link.phi_irs, cfg).adjoint();
}

double rayleigh_distance(const ScenarioConfig& cfg) {
  const double aperture = (std::max(cfg.n_y, cfg.n_z) - 1) * cfg.d();
  return 2.0 * aperture * aperture / cfg.lambda_c();
}

VectorXcd irs_nf_response_deriv(const PathParams& path, const ScenarioConfig& cfg,
                                IrsDeriv which) {
  const double d = cfg.d();
  const double lam = cfg.lambda_c();
  const double u = path.u;
  const double st = std::sin(path.theta_e), ct = std::cos(path.theta_e);
  const double sp = std::sin(path.phi_a), cp = std::cos(path.phi_a);
  VectorXcd out(cfg.n_r());
  for (int nz = 1; nz <= cfg.n_z; ++nz) {
    for (int ny = 1; ny <= cfg.n_y; ++ny) {
      const double oy = (ny - 1) * d;
      const double oz = (nz - 1) * d;
      const double uk = nf_element_distance(path, ny, nz, cfg);
      double ddu = 0.0;  // derivative of the excess distance u_k - u
      switch (which) {
        case IrsDeriv::Theta:
          ddu = (-oy * u * ct * sp + oz * u * st) / uk;
          break;
        case IrsDeriv::Phi:
          ddu = -oy * u * st * cp / uk;
          break;
        case IrsDeriv::Tau:
          // d(u_k)/du - 1, scaled by c through u = c*tau.
          ddu = kSpeedOfLight * ((u - oy * st * sp - oz * ct) / uk - 1.0);
          break;
      }
      const int k = irs_flat_index(ny, nz, cfg) - 1;
      const double du = uk - u;
      out[k] = std::polar(1.0, -2.0 * M_PI * du / lam) * (-kJ * 2.0 * M_PI / lam) * ddu;
    }
  }
  return out;
}

VectorXcd ue_ff_response_dpsi(double psi, const ScenarioConfig& cfg) {
  const VectorXcd a = ue_ff_response(psi, cfg);
  const double w = 2.0 * M_PI * cfg.d() * std::cos(psi) / cfg.lambda_c();
  VectorXcd out(cfg.n_t);
  for (int n = 1; n <= cfg.n_t; ++n) out[n - 1] = a[n - 1] * (-kJ * w * double(n - 1));
  return out;
}

namespace {

bool generators_separated(const PathSet& paths, const ScenarioConfig& cfg,
                          double min_gap) {
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = i + 1; j < paths.size(); ++j)
      if (std::abs(delay_generator(paths[i].tau(), cfg) -
                   delay_generator(paths[j].tau(), cfg)) < min_gap)
        return false;
  return true;
}

}  // namespace

PathSet sample_paths(const ScenarioConfig& cfg, RngStream& rng, double min_z_gap) {
  PathSet paths(cfg.l);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    for (auto& path : paths) {
      path.theta_e = rng.uniform(cfg.theta_range.lo, cfg.theta_range.hi);
      path.phi_a = rng.uniform(cfg.phi_range.lo, cfg.phi_range.hi);
      path.psi = rng.uniform(cfg.psi_range.lo, cfg.psi_range.hi);
      path.u = rng.uniform(cfg.u_range.lo, cfg.u_range.hi);
      path.gamma = rng.complex_normal();
    }
    if (generators_separated(paths, cfg, min_z_gap)) return paths;
  }
  throw ConfigError("could not separate delay generators; distance range too narrow");
}

PathSet sample_paths_on_grid(const ScenarioConfig& cfg, RngStream& rng,
                             double min_z_gap, double min_gain) {
  PathSet paths(cfg.l);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    bool distinct = true;
    std::vector<std::pair<int, int>> cells;
    for (auto& path : paths) {
      const int i = 1 + static_cast<int>(rng.uniform01() * cfg.g_z);
      const int j = 1 + static_cast<int>(rng.uniform01() * cfg.g_y);
      const int k = 1 + static_cast<int>(rng.uniform01() * cfg.g_u);
      path.theta_e = cfg.theta_c_min + i * cfg.theta_step();
      path.phi_a = cfg.phi_c_min + j * cfg.phi_step();
      path.psi = cfg.psi_c_min + k * cfg.psi_step();
      path.u = rng.uniform(cfg.u_range.lo, cfg.u_range.hi);
      do {
        path.gamma = rng.complex_normal();
      } while (std::abs(path.gamma) < min_gain);
      for (const auto& cell : cells)
        if (cell.first == i && cell.second == j) distinct = false;
      cells.emplace_back(i, j);
    }
    if (distinct && generators_separated(paths, cfg, min_z_gap)) return paths;
  }
  throw ConfigError("could not separate on-grid paths");
}

}  // namespace nfce
