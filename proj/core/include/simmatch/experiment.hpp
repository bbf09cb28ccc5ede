#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simmatch/config.hpp"
#include "simmatch/online.hpp"

namespace simmatch {

struct NetworkRun {
  NetworkConfig config;
  std::string alpha_derivation;
  RunResult result;                    // log is partial when `failure` is set
  std::optional<std::string> failure;
  std::int64_t failure_iteration = -1;
};

struct ExperimentResult {
  ExperimentConfig config;
  SymmetricSpectrum truth;  // per-sample generating spectrum
  std::vector<NetworkRun> runs;

  bool ok() const;
};

// Materializes the stream once (or uses `replay`, which must come from the
// same schedule) and runs every configured network on it concurrently.
// Numerical failures are captured per network, not thrown.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::vector<Sample>* replay = nullptr);

// Writes <dir>/<kind>.csv per network (metrics CSV schema), provenance.json
// and, when `svg` is set, <kind>.svg with the windowed output spectrum.
// Returns the paths written.
std::vector<std::string> write_experiment_outputs(const ExperimentResult& result, const std::string& dir, bool svg);

}  // namespace simmatch
