#include "nfce/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nfce/errors.hpp"
#include "nfce/harness.hpp"

namespace nfce {

using nlohmann::json;

namespace {

json matrix_to_json(const MatrixXcd& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  j["re"] = re;
  j["im"] = im;
  return j;
}

MatrixXcd matrix_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows"), cols = j.at("cols");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (Eigen::Index(re.size()) != rows * cols || re.size() != im.size())
    throw IoError("matrix payload size mismatch");
  MatrixXcd m(rows, cols);
  Eigen::Index i = 0;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r, ++i)
      m(r, c) = {re[i].get<double>(), im[i].get<double>()};
  return m;
}

}  // namespace

void save_bundle(const SimulationBundle& bundle, const std::string& path) {
  json j;
  j["format"] = "nfce-bundle-v1";
  j["config"] = config_to_text(bundle.cfg);
  j["snr_db"] = bundle.snr_db;
  j["sigma2"] = bundle.meas.sigma2;
  j["snr_linear"] = bundle.meas.snr_linear;
  json truth = json::array();
  for (const auto& p : bundle.truth)
    truth.push_back({{"theta_e", p.theta_e},
                     {"phi_a", p.phi_a},
                     {"psi", p.psi},
                     {"u", p.u},
                     {"gamma_re", p.gamma.real()},
                     {"gamma_im", p.gamma.imag()}});
  j["truth"] = truth;
  j["ops"] = {{"w", matrix_to_json(bundle.meas.ops.w)},
              {"f", matrix_to_json(bundle.meas.ops.f)},
              {"v", matrix_to_json(bundle.meas.ops.v)},
              {"h_tilde", matrix_to_json(bundle.meas.ops.h_tilde)},
              {"vt", matrix_to_json(bundle.meas.ops.vt)}};
  json tensor;
  tensor["dims"] = {bundle.meas.data.dim1(), bundle.meas.data.dim2(),
                    bundle.meas.data.dim3()};
  tensor["layout"] = "q fastest, then t, then p";
  std::vector<double> re, im;
  for (Eigen::Index i = 0; i < bundle.meas.data.vec().size(); ++i) {
    re.push_back(bundle.meas.data.vec()[i].real());
    im.push_back(bundle.meas.data.vec()[i].imag());
  }
  tensor["re"] = re;
  tensor["im"] = im;
  j["tensor"] = tensor;

  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("failed writing: " + path);
}

SimulationBundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open bundle file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError(std::string("bad bundle JSON: ") + e.what());
  }
  if (j.value("format", "") != "nfce-bundle-v1")
    throw IoError("unrecognized bundle format");
  SimulationBundle bundle;
  bundle.cfg = parse_config(j.at("config").get<std::string>());
  bundle.snr_db = j.at("snr_db");
  bundle.meas.sigma2 = j.at("sigma2");
  bundle.meas.snr_linear = j.at("snr_linear");
  for (const auto& p : j.at("truth")) {
    PathParams path;
    path.theta_e = p.at("theta_e");
    path.phi_a = p.at("phi_a");
    path.psi = p.at("psi");
    path.u = p.at("u");
    path.gamma = {p.at("gamma_re").get<double>(), p.at("gamma_im").get<double>()};
    bundle.truth.push_back(path);
  }
  const auto& ops = j.at("ops");
  bundle.meas.ops.w = matrix_from_json(ops.at("w"));
  bundle.meas.ops.f = matrix_from_json(ops.at("f"));
  bundle.meas.ops.v = matrix_from_json(ops.at("v"));
  bundle.meas.ops.h_tilde = matrix_from_json(ops.at("h_tilde"));
  bundle.meas.ops.vt = matrix_from_json(ops.at("vt"));

  const auto& tensor = j.at("tensor");
  const auto dims = tensor.at("dims");
  Tensor3 t(dims[0], dims[1], dims[2]);
  const auto& re = tensor.at("re");
  const auto& im = tensor.at("im");
  if (Eigen::Index(re.size()) != t.size())
    throw IoError("tensor payload size mismatch");
  for (Eigen::Index i = 0; i < t.size(); ++i)
    t.vec()[i] = {re[i].get<double>(), im[i].get<double>()};
  bundle.meas.data = t;
  return bundle;
}

void write_tensor_csv(const Tensor3& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << "# nfce tensor dump; entries ordered with q fastest, then t, then p\n";
  out << "# dims: " << t.dim1() << ',' << t.dim2() << ',' << t.dim3() << "\n";
  out << "re,im\n";
  char buf[96];
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t.vec()[i].real(),
                  t.vec()[i].imag());
    out << buf;
  }
  if (!out) throw IoError("failed writing: " + path);
}

Tensor3 read_tensor_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tensor file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty tensor file");
  if (!std::getline(in, line) || line.rfind("# dims: ", 0) != 0)
    throw IoError("missing dims header");
  int nq = 0, nt = 0, np = 0;
  if (std::sscanf(line.c_str(), "# dims: %d,%d,%d", &nq, &nt, &np) != 3)
    throw IoError("bad dims header");
  std::getline(in, line);  // column header
  Tensor3 t(nq, nt, np);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (!std::getline(in, line)) throw IoError("truncated tensor file");
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%lg,%lg", &re, &im) != 2)
      throw IoError("bad tensor entry at line " + std::to_string(i + 4));
    t.vec()[i] = {re, im};
  }
  return t;
}

std::string format_estimation_result(const EstimationResult& res) {
  std::ostringstream out;
  char buf[256];
  out << "# path theta_e phi_a psi tau u gamma_re gamma_im\n";
  for (int l = 0; l < res.tau.size(); ++l) {
    std::snprintf(buf, sizeof(buf),
                  "%d %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", l + 1,
                  res.theta_e[l], res.phi_a[l], res.psi[l], res.tau[l],
                  res.u[l], res.gamma[l].real(), res.gamma[l].imag());
    out << buf;
  }
  out << "# diagnostics\n";
  out << "singular_values:";
  for (int i = 0; i < res.diag.singular_values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), " %.6g", res.diag.singular_values[i]);
    out << buf;
  }
  out << "\nz_moduli:";
  for (int i = 0; i < res.diag.z_moduli.size(); ++i) {
    std::snprintf(buf, sizeof(buf), " %.6g", res.diag.z_moduli[i]);
    out << buf;
  }
  out << "\nirs_correlation_peaks:";
  for (int i = 0; i < res.diag.irs_peak.size(); ++i) {
    std::snprintf(buf, sizeof(buf), " %.6g", res.diag.irs_peak[i]);
    out << buf;
  }
  out << "\nue_correlation_peaks:";
  for (int i = 0; i < res.diag.ue_peak.size(); ++i) {
    std::snprintf(buf, sizeof(buf), " %.6g", res.diag.ue_peak[i]);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "\neigvec_condition: %.6g\ngain_leakage: %.6g\n",
                res.diag.m_condition, res.diag.gain_leakage);
  out << buf;
  return out.str();
}

void write_run_manifest(const SweepSpec& spec, const std::string& path) {
  const std::string cfg_text = config_to_text(spec.cfg);
  std::ostringstream canonical;
  canonical << cfg_text << "master_seed=" << spec.master_seed
            << ";trials=" << spec.trials << ";on_grid=" << spec.on_grid
            << ";snr=";
  for (double s : spec.snr_db) canonical << s << ',';

  json j;
  j["format"] = "nfce-manifest-v1";
  j["tool"] = kToolVersion;
  j["config"] = cfg_text;
  j["master_seed"] = spec.master_seed;
  j["trials"] = spec.trials;
  j["on_grid"] = spec.on_grid;
  j["snr_db"] = spec.snr_db;
  j["config_hash"] = fnv1a_hex(canonical.str());

  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("failed writing: " + path);
}

}  // namespace nfce
