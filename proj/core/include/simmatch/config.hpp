#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simmatch/datagen.hpp"
#include "simmatch/online.hpp"
#include "simmatch/regularizer.hpp"

namespace simmatch {

// One online network in an experiment. Exactly one of `alpha` (used as is)
// or `threshold` (target eigenvalue cutoff, converted per regularizer by
// resolve_alpha) must be set.
struct NetworkSpec {
  RegularizerKind kind = RegularizerKind::ScaleDependent;
  std::optional<double> alpha;
  std::optional<double> threshold;
  int k = 4;
  double eta = tol::kJacobiWeight;
  double beta = 1.0;
  double tol = tol::kDynamicsTolerance;
  int max_iters = tol::kDynamicsMaxIterations;
  std::uint64_t init_seed = 1;
};

struct ExperimentConfig {
  std::string name = "experiment";
  StreamSchedule stream;
  std::int64_t iterations = 10000;
  std::vector<NetworkSpec> networks;
  std::int64_t window = 1000;  // 0 = cumulative
  std::int64_t snapshot_period = 100;
  std::string output_dir = "results";

  void validate() const;
};

// JSON document; unknown keys anywhere are rejected with InvalidInput.
//
// {
//   "name": "stationary",
//   "stream": {"dim": 64, "head": [6, 5, 4, 2],
//              "tail": {"count": 60, "low": 0, "high": 0.2},
//              "segments": [{"start": 0, "scale": 1}],
//              "seed": 1, "iterations": 10000},
//   "networks": [{"kind": "scale-dependent", "threshold": 2, "k": 4,
//                 "eta": 0.1, "beta": 1, "tol": 1e-6, "max_iters": 500,
//                 "init_seed": 2}],
//   "metrics": {"window": 1000, "snapshot_period": 100},
//   "output_dir": "results/stationary"
// }
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

// Canonical form: every field written, keys sorted, two-space indent.
std::string to_canonical_json(const ExperimentConfig& cfg);

// Converts a target cutoff into this regularizer's alpha on the per-sample
// ground-truth spectrum (descending):
//   scale-dependent  alpha = tau
//   input-output     alpha = tau / sum(lambda)
//   squared-output   alpha = tau / (S_p - p tau), p = #{lambda_i > tau} (at
//                    most k), S_p the sum of those eigenvalues; this makes
//                    the shrinkage alpha S_p / (1 + alpha p) equal tau.
struct ResolvedAlpha {
  double alpha;
  std::string derivation;
};
ResolvedAlpha resolve_alpha(const NetworkSpec& spec, const Eigen::VectorXd& spectrum);

// The two built-in protocols: 64-dim colored Gaussian, head {6, 5, 4, 2},
// 60 tail values in [0, 0.2], one network per regularizer with cutoff 2.
// Non-stationary: eigenvalues x2 over [1000, 6000), beta = exp(-1/1000).
ExperimentConfig stationary_config(std::uint64_t seed = 1);
ExperimentConfig nonstationary_config(std::uint64_t seed = 1);

}  // namespace simmatch
