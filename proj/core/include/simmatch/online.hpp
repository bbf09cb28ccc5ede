#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "simmatch/constants.hpp"
#include "simmatch/datagen.hpp"
#include "simmatch/errors.hpp"
#include "simmatch/metrics.hpp"
#include "simmatch/regularizer.hpp"

namespace simmatch {

struct NetworkConfig {
  int n = 1;                 // input neurons
  int k = 1;                 // output neurons
  double alpha = 0.0;
  double eta = tol::kJacobiWeight;   // Jacobi weight, (0, 1]
  double beta = 1.0;                 // discount, (0, 1]; 1 disables forgetting
  RegularizerKind kind = RegularizerKind::ScaleDependent;
  double dynamics_tol = tol::kDynamicsTolerance;
  int dynamics_max_iters = tol::kDynamicsMaxIterations;
  std::uint64_t init_seed = 0;

  void validate() const;
};

// Feedforward weights W^YX (k x n), lateral weights W^YY (k x k, zero
// diagonal) and per-neuron cumulative activity mu (learning rate 1/mu).
struct NetworkState {
  Eigen::MatrixXd w_yx;
  Eigen::MatrixXd w_yy;
  Eigen::VectorXd mu;
  std::int64_t t = 0;

  // W^YX uniform in [-1/sqrt(n), 1/sqrt(n)] from cfg.init_seed, W^YY = 0,
  // mu = 1.
  static NetworkState initial(const NetworkConfig& cfg);

  // Throws InvariantViolation / NumericalFailure when broken.
  void check_invariants() const;

  friend bool operator==(const NetworkState& a, const NetworkState& b);
};

struct StepResult {
  Eigen::VectorXd y;
  int dynamics_iters = 0;
  bool converged = false;
};

// Weighted Jacobi iteration y <- (1 - eta) y + eta (W^YX x - W^YY y) from
// y = 0 until the infinity-norm change is <= cfg.dynamics_tol or the cap is
// hit. Non-convergence is reported, not thrown; NaN throws NumericalFailure.
StepResult neural_dynamics(const NetworkState& state, const Eigen::VectorXd& x, const NetworkConfig& cfg);

// Regularizer drive entering every update: alpha, alpha ||x||^2 or
// alpha ||y||^2.
double regularizer_drive(RegularizerKind kind, double alpha, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Synaptic update after the dynamics settle. With r = regularizer_drive:
//   mu_i   <- mu_i + r + y_i^2               (cumulative)
//   mu_i   <- beta^2 mu_i + r + y_i^2        (discounted)
//   W^YX_ij += (y_i x_j - (r + y_i^2) W^YX_ij) / mu_i
//   W^YY_ij += (y_i y_j - (r + y_i^2) W^YY_ij) / mu_i,  j != i
// update_weights() uses the discounted rule iff cfg.beta < 1.
NetworkState update_weights(const NetworkState& state, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const NetworkConfig& cfg);
void update_weights_cumulative(NetworkState& state, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                               const NetworkConfig& cfg);
void update_weights_discounted(NetworkState& state, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                               const NetworkConfig& cfg);

// Fixed-point input-to-output map F = (I + W^YY)^{-1} W^YX.
Eigen::MatrixXd effective_filter(const NetworkState& state);

// Orthonormal n x rank basis of the input subspace the network transmits:
// the top right singular vectors of the effective filter.
Eigen::MatrixXd learned_subspace(const NetworkState& state, int rank);

class Network {
 public:
  explicit Network(NetworkConfig cfg);
  Network(NetworkConfig cfg, NetworkState state);

  StepResult step(const Eigen::VectorXd& x);

  const NetworkConfig& config() const { return cfg_; }
  const NetworkState& state() const { return state_; }

 private:
  NetworkConfig cfg_;
  NetworkState state_;
};

struct RunOptions {
  std::int64_t snapshot_period = 100;
  std::int64_t window = 1000;                    // 0 = cumulative spectra
  const StreamReference* reference = nullptr;    // enables both error metrics
  // Precomputed input spectra, one per snapshot (see input_spectrum_track);
  // computed on the fly when null.
  const std::vector<Eigen::VectorXd>* input_track = nullptr;
  bool keep_outputs = true;
};

struct RunResult {
  MetricsLog log;
  NetworkState final_state;
  std::vector<Eigen::VectorXd> outputs;
  std::int64_t nonconverged_steps = 0;
};

// Raised when a step fails numerically; carries everything logged before it.
class RunFailure : public NumericalFailure {
 public:
  RunFailure(const std::string& what, std::int64_t iteration, MetricsLog partial)
      : NumericalFailure(what), iteration_(iteration), partial_(std::move(partial)) {}
  std::int64_t iteration() const { return iteration_; }
  const MetricsLog& partial_log() const { return partial_; }

 private:
  std::int64_t iteration_;
  MetricsLog partial_;
};

// Alternates neural_dynamics and update_weights over the stream, snapshotting
// every options.snapshot_period samples (record t = samples processed).
RunResult run_stream(const NetworkConfig& cfg, std::span<const Sample> stream, const RunOptions& options = {});

// Top kInputSpectrumColumns windowed input eigenvalues at each snapshot time;
// NaN while the window holds a non-finite sample.
std::vector<Eigen::VectorXd> input_spectrum_track(std::span<const Sample> stream, std::int64_t window,
                                                  std::int64_t snapshot_period);

// Binary checkpoint: "SMCK", u32 version, i32 k, i32 n, i64 t, then mu,
// W^YX (row-major), W^YY (row-major) as little-endian IEEE doubles.
void write_checkpoint(std::ostream& out, const NetworkState& state);
NetworkState read_checkpoint(std::istream& in);

}  // namespace simmatch
