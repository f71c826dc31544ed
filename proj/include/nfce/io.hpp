#pragma once

#include <string>

#include "nfce/estimator.hpp"
#include "nfce/measurement.hpp"

namespace nfce {

struct SweepSpec;  // harness.hpp

// Everything a downstream `estimate` run needs, in one JSON file: config
// text, training operators, the measurement tensor, and (when available) the
// ground-truth paths.
struct SimulationBundle {
  ScenarioConfig cfg;
  PathSet truth;  // may be empty
  MeasurementTensor meas;
  double snr_db = 0.0;
};

void save_bundle(const SimulationBundle& bundle, const std::string& path);
SimulationBundle load_bundle(const std::string& path);

// Flat text dump of a tensor for cross-implementation comparison: one
// "re,im" line per entry, mode-1 index (q) fastest, then t, then p. The
// header documents the ordering and dimensions.
void write_tensor_csv(const Tensor3& t, const std::string& path);
Tensor3 read_tensor_csv(const std::string& path);

// Structured text for an estimation result: one row per path
// (theta_e phi_a psi tau u re_gamma im_gamma) followed by diagnostics.
std::string format_estimation_result(const EstimationResult& res);

// JSON run manifest (full config + seed + version + config hash).
void write_run_manifest(const SweepSpec& spec, const std::string& path);

inline constexpr const char* kToolVersion = "nfce 0.1.0";

}  // namespace nfce
