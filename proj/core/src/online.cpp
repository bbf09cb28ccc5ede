#include "simmatch/online.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "simmatch/spectral.hpp"

namespace simmatch {

void NetworkConfig::validate() const {
  if (n < 1 || k < 1) throw InvalidInput("network config: n and k must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidInput("network config: eta must lie in (0, 1]");
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidInput("network config: beta must lie in (0, 1]");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("network config: alpha must be finite and >= 0");
  if (!(dynamics_tol > 0.0)) throw InvalidInput("network config: dynamics tolerance must be > 0");
  if (dynamics_max_iters < 1) throw InvalidInput("network config: dynamics iteration cap must be >= 1");
}

NetworkState NetworkState::initial(const NetworkConfig& cfg) {
  cfg.validate();
  SeededRng rng(cfg.init_seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.n));
  NetworkState s;
  s.w_yx.resize(cfg.k, cfg.n);
  for (int i = 0; i < cfg.k; ++i) {
    for (int j = 0; j < cfg.n; ++j) s.w_yx(i, j) = rng.uniform(-bound, bound);
  }
  s.w_yy = Eigen::MatrixXd::Zero(cfg.k, cfg.k);
  s.mu = Eigen::VectorXd::Ones(cfg.k);
  s.t = 0;
  return s;
}

void NetworkState::check_invariants() const {
  for (Eigen::Index i = 0; i < w_yy.rows(); ++i) {
    if (w_yy(i, i) != 0.0) throw InvariantViolation("network state: lateral diagonal is nonzero");
  }
  if ((mu.array() <= 0.0).any()) throw InvariantViolation("network state: mu must stay strictly positive");
  if (!w_yx.allFinite() || !w_yy.allFinite() || !mu.allFinite()) {
    throw NumericalFailure("network state: non-finite weights at t=" + std::to_string(t));
  }
}

bool operator==(const NetworkState& a, const NetworkState& b) {
  return a.t == b.t && a.w_yx.rows() == b.w_yx.rows() && a.w_yx.cols() == b.w_yx.cols() &&
         a.w_yx == b.w_yx && a.w_yy == b.w_yy && a.mu == b.mu;
}

StepResult neural_dynamics(const NetworkState& state, const Eigen::VectorXd& x, const NetworkConfig& cfg) {
  if (x.size() != state.w_yx.cols()) {
    throw InvalidInput("neural_dynamics: input has length " + std::to_string(x.size()) + ", expected " +
                       std::to_string(state.w_yx.cols()));
  }
  const Eigen::VectorXd drive = state.w_yx * x;
  const double eta = cfg.eta;
  StepResult r;
  r.y = Eigen::VectorXd::Zero(state.w_yx.rows());
  Eigen::VectorXd next(r.y.size());
  for (int it = 1; it <= cfg.dynamics_max_iters; ++it) {
    next.noalias() = (1.0 - eta) * r.y + eta * (drive - state.w_yy * r.y);
    const double change = (next - r.y).lpNorm<Eigen::Infinity>();
    r.y.swap(next);
    r.dynamics_iters = it;
    if (!std::isfinite(change)) {
      throw NumericalFailure("neural_dynamics: non-finite activity after " + std::to_string(it) + " iterations");
    }
    if (change <= cfg.dynamics_tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

double regularizer_drive(RegularizerKind kind, double alpha, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  switch (kind) {
    case RegularizerKind::ScaleDependent: return alpha;
    case RegularizerKind::InputOutput: return alpha * x.squaredNorm();
    case RegularizerKind::SquaredOutput: return alpha * y.squaredNorm();
  }
  return alpha;
}

namespace {

void check_step_shapes(const NetworkState& s, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != s.w_yx.cols() || y.size() != s.w_yx.rows()) {
    throw InvalidInput("update_weights: x/y lengths do not match the network shape");
  }
}

// Weight part of the update, shared by both mu rules. Expects state.mu to
// hold mu_{T+1} already.
void hebbian_anti_hebbian(NetworkState& s, const Eigen::VectorXd& x, const Eigen::VectorXd& y, double r) {
  const Eigen::Index k = s.w_yx.rows();
  for (Eigen::Index i = 0; i < k; ++i) {
    const double yi = y(i);
    const double decay = r + yi * yi;
    const double mu = s.mu(i);
    for (Eigen::Index j = 0; j < s.w_yx.cols(); ++j) {
      s.w_yx(i, j) += (yi * x(j) - decay * s.w_yx(i, j)) / mu;
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j == i) continue;
      s.w_yy(i, j) += (yi * y(j) - decay * s.w_yy(i, j)) / mu;
    }
    s.w_yy(i, i) = 0.0;
  }
  ++s.t;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(s.mu(i) > 0.0)) {
      throw InvariantViolation("update_weights: mu_" + std::to_string(i) + " <= 0 at t=" + std::to_string(s.t));
    }
  }
  if (!s.w_yx.allFinite() || !s.w_yy.allFinite() || !s.mu.allFinite()) {
    throw NumericalFailure("update_weights: non-finite weights at t=" + std::to_string(s.t));
  }
}

}  // namespace

void update_weights_cumulative(NetworkState& state, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                               const NetworkConfig& cfg) {
  check_step_shapes(state, x, y);
  const double r = regularizer_drive(cfg.kind, cfg.alpha, x, y);
  for (Eigen::Index i = 0; i < state.mu.size(); ++i) {
    state.mu(i) = state.mu(i) + r + y(i) * y(i);
  }
  hebbian_anti_hebbian(state, x, y, r);
}

void update_weights_discounted(NetworkState& state, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                               const NetworkConfig& cfg) {
  check_step_shapes(state, x, y);
  const double r = regularizer_drive(cfg.kind, cfg.alpha, x, y);
  const double beta2 = cfg.beta * cfg.beta;
  for (Eigen::Index i = 0; i < state.mu.size(); ++i) {
    state.mu(i) = beta2 * state.mu(i) + r + y(i) * y(i);
  }
  hebbian_anti_hebbian(state, x, y, r);
}

NetworkState update_weights(const NetworkState& state, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const NetworkConfig& cfg) {
  NetworkState next = state;
  if (cfg.beta < 1.0) {
    update_weights_discounted(next, x, y, cfg);
  } else {
    update_weights_cumulative(next, x, y, cfg);
  }
  return next;
}

Eigen::MatrixXd effective_filter(const NetworkState& state) {
  const Eigen::Index k = state.w_yy.rows();
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(k, k) + state.w_yy;
  return system.partialPivLu().solve(state.w_yx);
}

Eigen::MatrixXd learned_subspace(const NetworkState& state, int rank) {
  const Eigen::Index k = state.w_yx.rows();
  if (rank < 0 || rank > k) {
    throw InvalidInput("learned_subspace: rank " + std::to_string(rank) + " outside [0, " + std::to_string(k) + "]");
  }
  if (rank == 0) return Eigen::MatrixXd(state.w_yx.cols(), 0);
  const Eigen::MatrixXd f = effective_filter(state);
  const SymmetricSpectrum left = sym_eig(SymMatrix(f * f.transpose()));
  Eigen::MatrixXd right(f.cols(), rank);
  for (int c = 0; c < rank; ++c) {
    const double sigma = std::sqrt(std::max(left.eigenvalues(c), 0.0));
    right.col(c) = sigma > 0.0 ? Eigen::VectorXd(f.transpose() * left.eigenvectors.col(c) / sigma)
                               : Eigen::VectorXd::Zero(f.cols());
  }
  return orthonormalize_columns(right);
}

Network::Network(NetworkConfig cfg) : cfg_(cfg), state_(NetworkState::initial(cfg)) {}

Network::Network(NetworkConfig cfg, NetworkState state) : cfg_(cfg), state_(std::move(state)) {
  cfg_.validate();
  if (state_.w_yx.rows() != cfg_.k || state_.w_yx.cols() != cfg_.n) {
    throw InvalidInput("Network: state shape does not match config");
  }
  state_.check_invariants();
}

StepResult Network::step(const Eigen::VectorXd& x) {
  StepResult r = neural_dynamics(state_, x, cfg_);
  if (cfg_.beta < 1.0) {
    update_weights_discounted(state_, x, r.y, cfg_);
  } else {
    update_weights_cumulative(state_, x, r.y, cfg_);
  }
  return r;
}

namespace {

bool is_snapshot(std::int64_t processed, std::int64_t total, std::int64_t period) {
  return (period > 0 && processed % period == 0) || processed == total;
}

Eigen::VectorXd top_input(const WindowedSpectrum& w) {
  const Eigen::Index m = std::min<Eigen::Index>(kInputSpectrumColumns, w.eigenvalues.size());
  return w.eigenvalues.head(m);
}

}  // namespace

std::vector<Eigen::VectorXd> input_spectrum_track(std::span<const Sample> stream, std::int64_t window,
                                                  std::int64_t snapshot_period) {
  std::vector<Eigen::VectorXd> track;
  if (stream.empty()) return track;
  SlidingGram gram(static_cast<int>(stream.front().x.size()), window);
  const auto total = static_cast<std::int64_t>(stream.size());
  for (std::int64_t i = 0; i < total; ++i) {
    gram.push(stream[i].x);
    if (!is_snapshot(i + 1, total, snapshot_period)) continue;
    if (gram.gram().allFinite()) {
      track.push_back(top_input(gram.spectrum()));
    } else {
      const auto m = std::min<Eigen::Index>(kInputSpectrumColumns, stream.front().x.size());
      track.push_back(Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN()));
    }
  }
  return track;
}

RunResult run_stream(const NetworkConfig& cfg, std::span<const Sample> stream, const RunOptions& options) {
  cfg.validate();
  if (options.snapshot_period < 0 || options.window < 0) {
    throw InvalidInput("run_stream: snapshot period and window must be >= 0");
  }
  RunResult result;
  result.log.window = options.window;
  Network net(cfg);
  if (stream.empty()) {
    result.final_state = net.state();
    return result;
  }
  for (const auto& s : stream) {
    if (s.x.size() != cfg.n) {
      throw InvalidInput("run_stream: sample t=" + std::to_string(s.t) + " has dimension " +
                         std::to_string(s.x.size()) + ", network expects " + std::to_string(cfg.n));
    }
  }

  const auto total = static_cast<std::int64_t>(stream.size());
  SlidingGram outputs(cfg.k, options.window);
  std::optional<SlidingGram> inputs;
  if (!options.input_track) inputs.emplace(cfg.n, options.window);
  std::size_t snapshot_index = 0;
  if (options.keep_outputs) result.outputs.reserve(stream.size());

  for (std::int64_t i = 0; i < total; ++i) {
    StepResult step;
    try {
      step = net.step(stream[i].x);
    } catch (const NumericalFailure& e) {
      throw RunFailure(std::string(e.what()) + " (stream iteration " + std::to_string(i) + ")", i, result.log);
    } catch (const InvariantViolation& e) {
      throw RunFailure(std::string(e.what()) + " (stream iteration " + std::to_string(i) + ")", i, result.log);
    }
    if (!step.converged) ++result.nonconverged_steps;
    outputs.push(step.y);
    if (inputs) inputs->push(stream[i].x);
    if (options.keep_outputs) result.outputs.push_back(step.y);

    const std::int64_t processed = i + 1;
    if (!is_snapshot(processed, total, options.snapshot_period)) continue;

    MetricsRecord rec;
    rec.t = processed;
    const WindowedSpectrum out = outputs.spectrum();
    rec.output_spectrum = out.eigenvalues;
    rec.partial_window = out.partial;
    rec.rank = static_cast<int>((out.eigenvalues.array() > tol::kTransmitThreshold).count());
    if (options.input_track) {
      if (snapshot_index >= options.input_track->size()) {
        throw InvalidInput("run_stream: input track has fewer snapshots than the run");
      }
      rec.input_spectrum = (*options.input_track)[snapshot_index];
    } else {
      rec.input_spectrum = top_input(inputs->spectrum());
    }
    ++snapshot_index;
    if (options.reference) {
      const Eigen::VectorXd optimal =
          options.reference->optimal_spectrum(cfg.kind, cfg.alpha, cfg.k, stream[i].t);
      rec.eigenvalue_error = eigenvalue_error(rec.output_spectrum, optimal);
      const Eigen::MatrixXd learned = learned_subspace(net.state(), rec.rank);
      rec.subspace_error =
          subspace_error(learned, options.reference->true_basis(static_cast<int>(learned.cols())));
    }
    result.log.append(std::move(rec));
  }
  result.final_state = net.state();
  return result;
}

namespace {

constexpr char kMagic[4] = {'S', 'M', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits;
  std::memcpy(&bits, &value, sizeof bits);
  for (std::size_t b = 0; b < sizeof bits; ++b) out.put(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t b = 0; b < sizeof bits; ++b) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw InvalidInput("checkpoint: truncated file");
    bits |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * b);
  }
  T value;
  std::memcpy(&value, &bits, sizeof value);
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const NetworkState& state) {
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::int32_t>(out, static_cast<std::int32_t>(state.w_yx.rows()));
  put_le<std::int32_t>(out, static_cast<std::int32_t>(state.w_yx.cols()));
  put_le<std::int64_t>(out, state.t);
  for (Eigen::Index i = 0; i < state.mu.size(); ++i) put_le<double>(out, state.mu(i));
  for (Eigen::Index i = 0; i < state.w_yx.rows(); ++i) {
    for (Eigen::Index j = 0; j < state.w_yx.cols(); ++j) put_le<double>(out, state.w_yx(i, j));
  }
  for (Eigen::Index i = 0; i < state.w_yy.rows(); ++i) {
    for (Eigen::Index j = 0; j < state.w_yy.cols(); ++j) put_le<double>(out, state.w_yy(i, j));
  }
  if (!out) throw InvalidInput("checkpoint: write failed");
}

NetworkState read_checkpoint(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw InvalidInput("checkpoint: bad magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw InvalidInput("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto k = get_le<std::int32_t>(in);
  const auto n = get_le<std::int32_t>(in);
  if (k < 1 || n < 1) throw InvalidInput("checkpoint: invalid shape");
  NetworkState s;
  s.t = get_le<std::int64_t>(in);
  s.mu.resize(k);
  for (int i = 0; i < k; ++i) s.mu(i) = get_le<double>(in);
  s.w_yx.resize(k, n);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < n; ++j) s.w_yx(i, j) = get_le<double>(in);
  }
  s.w_yy.resize(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) s.w_yy(i, j) = get_le<double>(in);
  }
  s.check_invariants();
  return s;
}

}  // namespace simmatch
