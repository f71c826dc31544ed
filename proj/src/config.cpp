#include "nfce/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nfce/errors.hpp"

namespace nfce {

void ScenarioConfig::validate() const {
  if (n_y < 1 || n_z < 1 || n_t < 1 || n_b < 1)
    throw ConfigError("array element counts must be >= 1");
  if (p < 1 || p0 < 1 || t_a < 1 || q < 1 || l < 1)
    throw ConfigError("training dimensions must be >= 1");
  if (d() <= 0.0) throw ConfigError("element spacing must be positive");
  if (f_c <= 0.0 || f_s <= 0.0) throw ConfigError("frequencies must be positive");
  if (f_s >= f_c) throw ConfigError("sampling frequency must be below the carrier");
  if (p > p0) throw ConfigError("training subcarriers exceed total subcarriers");
  if (u_range.lo <= 0.0 || u_range.hi < u_range.lo)
    throw ConfigError("distance range must satisfy 0 < u_min <= u_max");
  if (u_range.hi / kSpeedOfLight >= delay_period())
    throw ConfigError("distance range exceeds the unambiguous delay period");
  if (g_z < 1 || g_y < 1 || g_u < 1) throw ConfigError("codebook sizes must be >= 1");
  if (std::min((p - 1) * t_a, q) < l)
    throw UniquenessViolation("min((P-1)*T_a, Q) >= L does not hold");
}

ScenarioConfig ScenarioConfig::paper_scale() {
  ScenarioConfig cfg;
  cfg.n_y = 64;
  cfg.n_z = 8;
  cfg.n_t = 64;
  cfg.n_b = 64;
  cfg.g_z = 300;
  cfg.g_y = 300;
  cfg.g_u = 2000;
  return cfg;
}

namespace {

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for '" + key + "': " + v);
  }
}

int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  if (x != std::floor(x)) throw ConfigError("expected integer for '" + key + "'");
  return static_cast<int>(x);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_entry(ScenarioConfig& cfg, const std::string& key,
                        const std::string& value) {
  using Setter = std::function<void(ScenarioConfig&, const std::string&)>;
  static const std::map<std::string, Setter> setters = {
      {"n_y", [](ScenarioConfig& c, const std::string& v) { c.n_y = parse_int("n_y", v); }},
      {"n_z", [](ScenarioConfig& c, const std::string& v) { c.n_z = parse_int("n_z", v); }},
      {"n_t", [](ScenarioConfig& c, const std::string& v) { c.n_t = parse_int("n_t", v); }},
      {"n_b", [](ScenarioConfig& c, const std::string& v) { c.n_b = parse_int("n_b", v); }},
      {"spacing", [](ScenarioConfig& c, const std::string& v) { c.spacing = parse_double("spacing", v); }},
      {"f_c", [](ScenarioConfig& c, const std::string& v) { c.f_c = parse_double("f_c", v); }},
      {"f_s", [](ScenarioConfig& c, const std::string& v) { c.f_s = parse_double("f_s", v); }},
      {"p0", [](ScenarioConfig& c, const std::string& v) { c.p0 = parse_int("p0", v); }},
      {"p", [](ScenarioConfig& c, const std::string& v) { c.p = parse_int("p", v); }},
      {"t_a", [](ScenarioConfig& c, const std::string& v) { c.t_a = parse_int("t_a", v); }},
      {"q", [](ScenarioConfig& c, const std::string& v) { c.q = parse_int("q", v); }},
      {"l", [](ScenarioConfig& c, const std::string& v) { c.l = parse_int("l", v); }},
      {"theta_min", [](ScenarioConfig& c, const std::string& v) { c.theta_range.lo = parse_double("theta_min", v); }},
      {"theta_max", [](ScenarioConfig& c, const std::string& v) { c.theta_range.hi = parse_double("theta_max", v); }},
      {"phi_min", [](ScenarioConfig& c, const std::string& v) { c.phi_range.lo = parse_double("phi_min", v); }},
      {"phi_max", [](ScenarioConfig& c, const std::string& v) { c.phi_range.hi = parse_double("phi_max", v); }},
      {"psi_min", [](ScenarioConfig& c, const std::string& v) { c.psi_range.lo = parse_double("psi_min", v); }},
      {"psi_max", [](ScenarioConfig& c, const std::string& v) { c.psi_range.hi = parse_double("psi_max", v); }},
      {"u_min", [](ScenarioConfig& c, const std::string& v) { c.u_range.lo = parse_double("u_min", v); }},
      {"u_max", [](ScenarioConfig& c, const std::string& v) { c.u_range.hi = parse_double("u_max", v); }},
      {"g_z", [](ScenarioConfig& c, const std::string& v) { c.g_z = parse_int("g_z", v); }},
      {"g_y", [](ScenarioConfig& c, const std::string& v) { c.g_y = parse_int("g_y", v); }},
      {"g_u", [](ScenarioConfig& c, const std::string& v) { c.g_u = parse_int("g_u", v); }},
      {"theta_c_min", [](ScenarioConfig& c, const std::string& v) { c.theta_c_min = parse_double("theta_c_min", v); }},
      {"phi_c_min", [](ScenarioConfig& c, const std::string& v) { c.phi_c_min = parse_double("phi_c_min", v); }},
      {"psi_c_min", [](ScenarioConfig& c, const std::string& v) { c.psi_c_min = parse_double("psi_c_min", v); }},
      {"dtheta_c", [](ScenarioConfig& c, const std::string& v) { c.dtheta_c = parse_double("dtheta_c", v); }},
      {"dphi_c", [](ScenarioConfig& c, const std::string& v) { c.dphi_c = parse_double("dphi_c", v); }},
      {"dpsi_c", [](ScenarioConfig& c, const std::string& v) { c.dpsi_c = parse_double("dpsi_c", v); }},
      {"seed", [](ScenarioConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(parse_double("seed", v)); }},
      {"link_alpha_re", [](ScenarioConfig& c, const std::string& v) { c.link.alpha.real(parse_double("link_alpha_re", v)); }},
      {"link_alpha_im", [](ScenarioConfig& c, const std::string& v) { c.link.alpha.imag(parse_double("link_alpha_im", v)); }},
      {"link_tau_bar", [](ScenarioConfig& c, const std::string& v) { c.link.tau_bar = parse_double("link_tau_bar", v); }},
      {"link_phi_b", [](ScenarioConfig& c, const std::string& v) { c.link.phi_b = parse_double("link_phi_b", v); }},
      {"link_theta_irs", [](ScenarioConfig& c, const std::string& v) { c.link.theta_irs = parse_double("link_theta_irs", v); }},
      {"link_phi_irs", [](ScenarioConfig& c, const std::string& v) { c.link.phi_irs = parse_double("link_phi_irs", v); }},
      {"preset", [](ScenarioConfig& c, const std::string& v) {
         if (v == "desk") { ScenarioConfig base; base.seed = c.seed; c = base; }
         else if (v == "paper") { auto base = ScenarioConfig::paper_scale(); base.seed = c.seed; c = base; }
         else throw ConfigError("unknown preset '" + v + "'");
       }},
  };
  auto it = setters.find(key);
  if (it == setters.end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second(cfg, value);
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_text(const ScenarioConfig& cfg) {
  std::ostringstream out;
  auto num = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  out << "n_y = " << cfg.n_y << "\nn_z = " << cfg.n_z << "\nn_t = " << cfg.n_t
      << "\nn_b = " << cfg.n_b << "\nspacing = " << num(cfg.spacing)
      << "\nf_c = " << num(cfg.f_c) << "\nf_s = " << num(cfg.f_s)
      << "\np0 = " << cfg.p0 << "\np = " << cfg.p << "\nt_a = " << cfg.t_a
      << "\nq = " << cfg.q << "\nl = " << cfg.l
      << "\ntheta_min = " << num(cfg.theta_range.lo)
      << "\ntheta_max = " << num(cfg.theta_range.hi)
      << "\nphi_min = " << num(cfg.phi_range.lo)
      << "\nphi_max = " << num(cfg.phi_range.hi)
      << "\npsi_min = " << num(cfg.psi_range.lo)
      << "\npsi_max = " << num(cfg.psi_range.hi)
      << "\nu_min = " << num(cfg.u_range.lo)
      << "\nu_max = " << num(cfg.u_range.hi) << "\ng_z = " << cfg.g_z
      << "\ng_y = " << cfg.g_y << "\ng_u = " << cfg.g_u
      << "\ntheta_c_min = " << num(cfg.theta_c_min)
      << "\ndtheta_c = " << num(cfg.dtheta_c)
      << "\nphi_c_min = " << num(cfg.phi_c_min)
      << "\ndphi_c = " << num(cfg.dphi_c)
      << "\npsi_c_min = " << num(cfg.psi_c_min)
      << "\ndpsi_c = " << num(cfg.dpsi_c) << "\nseed = " << cfg.seed
      << "\nlink_alpha_re = " << num(cfg.link.alpha.real())
      << "\nlink_alpha_im = " << num(cfg.link.alpha.imag())
      << "\nlink_tau_bar = " << num(cfg.link.tau_bar)
      << "\nlink_phi_b = " << num(cfg.link.phi_b)
      << "\nlink_theta_irs = " << num(cfg.link.theta_irs)
      << "\nlink_phi_irs = " << num(cfg.link.phi_irs) << "\n";
  return out.str();
}

}  // namespace nfce
