#include "simmatch/offline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "simmatch/constants.hpp"
#include "simmatch/errors.hpp"

namespace simmatch {

std::string_view to_string(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::ScaleDependent: return "scale-dependent";
    case RegularizerKind::InputOutput: return "input-output";
    case RegularizerKind::SquaredOutput: return "squared-output";
  }
  return "unknown";
}

RegularizerKind parse_regularizer(std::string_view text) {
  if (text == "scale-dependent" || text == "scale" || text == "sd") return RegularizerKind::ScaleDependent;
  if (text == "input-output" || text == "io" || text == "input") return RegularizerKind::InputOutput;
  if (text == "squared-output" || text == "squared" || text == "so") return RegularizerKind::SquaredOutput;
  throw InvalidInput("unknown regularizer '" + std::string(text) +
                     "' (expected scale-dependent, input-output or squared-output)");
}

OfflineProblem OfflineProblem::from_gram(const SymMatrix& gram, int k, double alpha,
                                         RegularizerKind kind, std::int64_t samples) {
  SymmetricSpectrum spec = sym_eig(gram);
  OfflineProblem p;
  p.input_eigenvalues = std::move(spec.eigenvalues);
  p.input_eigenvectors = std::move(spec.eigenvectors);
  p.k = k;
  p.alpha = alpha;
  p.kind = kind;
  p.samples = samples;
  return p;
}

void OfflineProblem::validate() const {
  if (k < 1) throw InvalidInput("offline problem: k must be >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("offline problem: alpha must be finite and >= 0");
  if (samples < 1) throw InvalidInput("offline problem: samples must be >= 1");
  if (input_eigenvalues.size() < 1) throw InvalidInput("offline problem: empty input spectrum");
  if (!input_eigenvalues.allFinite()) throw InvalidInput("offline problem: non-finite input spectrum");
  for (Eigen::Index i = 1; i < input_eigenvalues.size(); ++i) {
    if (input_eigenvalues(i) > input_eigenvalues(i - 1)) {
      throw InvalidInput("offline problem: input spectrum must be sorted descending");
    }
  }
  if (input_eigenvectors && input_eigenvectors->cols() != input_eigenvalues.size()) {
    throw InvalidInput("offline problem: eigenvector count does not match spectrum length");
  }
}

namespace {

double input_total(std::span<const double> lx) {
  double total = 0.0;
  for (double v : lx) total += v;
  return total;
}

int soft_threshold_into(std::span<const double> lx, double threshold, std::span<double> out) {
  int rank = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = i < lx.size() ? soft_threshold(lx[i], threshold) : 0.0;
    rank += out[i] > 0.0;
  }
  return rank;
}

// Largest support size p whose closed-form solution
//   d_p = (I - alpha/(1 + alpha p) 1 1^T) lambda_p
// is entrywise nonnegative; zero-padded to k.
int squared_output_into(double alpha, std::span<const double> lx, std::span<double> out) {
  const int k = static_cast<int>(out.size());
  const int m = std::min<int>(k, static_cast<int>(lx.size()));
  double prefix_total = 0.0;
  for (int i = 0; i < m; ++i) prefix_total += lx[i];
  for (int support = k; support >= 1; --support) {
    // Supports past the spectrum length add zero eigenvalues.
    if (support < m) prefix_total -= lx[support];
    const int filled = std::min(support, m);
    const double shrink = alpha / (1.0 + alpha * support) * prefix_total;
    bool feasible = true;
    for (int i = 0; i < support && feasible; ++i) {
      const double li = i < filled ? lx[i] : 0.0;
      feasible = li - shrink >= 0.0;
    }
    if (!feasible) continue;
    int rank = 0;
    for (int i = 0; i < k; ++i) {
      const double li = i < filled ? lx[i] : 0.0;
      out[i] = i < support ? li - shrink : 0.0;
      rank += out[i] > 0.0;
    }
    return rank;
  }
  throw InvariantViolation("solve_squared_output: no feasible support (top input eigenvalue " +
                           std::to_string(lx.empty() ? 0.0 : lx[0]) + " < 0)");
}

OfflineSolution solve_checked(const OfflineProblem& p, RegularizerKind kind, const char* who) {
  p.validate();
  if (p.kind != kind) {
    throw InvalidInput(std::string(who) + ": problem kind is " + std::string(to_string(p.kind)));
  }
  OfflineSolution s;
  s.output_eigenvalues.resize(p.k);
  const std::span<const double> lx(p.input_eigenvalues.data(), static_cast<std::size_t>(p.input_eigenvalues.size()));
  s.rank = solve_output_spectrum(p.kind, p.alpha, p.samples, lx,
                                 std::span<double>(s.output_eigenvalues.data(), static_cast<std::size_t>(p.k)));
  if (p.input_eigenvectors) {
    const Eigen::Index m = std::min<Eigen::Index>(p.k, p.input_eigenvectors->cols());
    s.principal_basis = p.input_eigenvectors->leftCols(m);
  }
  return s;
}

}  // namespace

int solve_output_spectrum(RegularizerKind kind, double alpha, std::int64_t samples,
                          std::span<const double> input_eigenvalues, std::span<double> out) {
  switch (kind) {
    case RegularizerKind::ScaleDependent:
      return soft_threshold_into(input_eigenvalues, alpha * static_cast<double>(samples), out);
    case RegularizerKind::InputOutput:
      return soft_threshold_into(input_eigenvalues, alpha * input_total(input_eigenvalues), out);
    case RegularizerKind::SquaredOutput:
      return squared_output_into(alpha, input_eigenvalues, out);
  }
  throw InvalidInput("solve_output_spectrum: unknown regularizer");
}

double offline_threshold(const OfflineProblem& p) {
  switch (p.kind) {
    case RegularizerKind::ScaleDependent: return p.alpha * static_cast<double>(p.samples);
    case RegularizerKind::InputOutput: return p.alpha * p.input_eigenvalues.sum();
    case RegularizerKind::SquaredOutput: break;
  }
  throw InvalidInput("offline_threshold: squared-output has no fixed threshold");
}

OfflineSolution solve_scale_dependent(const OfflineProblem& p) {
  return solve_checked(p, RegularizerKind::ScaleDependent, "solve_scale_dependent");
}

OfflineSolution solve_input_output(const OfflineProblem& p) {
  return solve_checked(p, RegularizerKind::InputOutput, "solve_input_output");
}

OfflineSolution solve_squared_output(const OfflineProblem& p) {
  return solve_checked(p, RegularizerKind::SquaredOutput, "solve_squared_output");
}

OfflineSolution solve(const OfflineProblem& p) {
  switch (p.kind) {
    case RegularizerKind::ScaleDependent: return solve_scale_dependent(p);
    case RegularizerKind::InputOutput: return solve_input_output(p);
    case RegularizerKind::SquaredOutput: return solve_squared_output(p);
  }
  throw InvalidInput("solve: unknown regularizer");
}

Eigen::MatrixXd explicit_output(const OfflineSolution& s, const std::optional<Eigen::MatrixXd>& rotation) {
  if (s.principal_basis.size() == 0) {
    throw InvalidInput("explicit_output: solution carries no principal basis");
  }
  const Eigen::Index m = s.principal_basis.cols();
  Eigen::MatrixXd y = s.output_eigenvalues.head(m).cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                      s.principal_basis.transpose();
  if (rotation) {
    if (rotation->rows() != m || rotation->cols() != m) {
      throw InvalidInput("explicit_output: rotation must be " + std::to_string(m) + "x" + std::to_string(m));
    }
    y = *rotation * y;
  }
  return y;
}

double objective_value(const OfflineProblem& p, const Eigen::VectorXd& output_eigenvalues) {
  const Eigen::Index n = std::max(p.input_eigenvalues.size(), output_eigenvalues.size());
  Eigen::VectorXd lx = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd ly = Eigen::VectorXd::Zero(n);
  lx.head(p.input_eigenvalues.size()) = p.input_eigenvalues;
  ly.head(output_eigenvalues.size()) = output_eigenvalues;
  const double fit = (lx - ly).squaredNorm();
  const double out_trace = ly.sum();
  switch (p.kind) {
    case RegularizerKind::ScaleDependent:
      return fit + 2.0 * p.alpha * static_cast<double>(p.samples) * out_trace;
    case RegularizerKind::InputOutput:
      return fit + 2.0 * p.alpha * lx.sum() * out_trace;
    case RegularizerKind::SquaredOutput:
      return fit + p.alpha * out_trace * out_trace;
  }
  return fit;
}

Eigen::VectorXd nnls_bruteforce(const Eigen::VectorXd& dx, double alpha) {
  const int n = static_cast<int>(dx.size());
  if (n > tol::kBruteforceMaxSize) {
    throw InvalidInput("nnls_bruteforce: size " + std::to_string(n) + " exceeds limit " +
                       std::to_string(tol::kBruteforceMaxSize));
  }
  if (!(alpha >= 0.0)) throw InvalidInput("nnls_bruteforce: alpha must be >= 0");
  auto objective = [&](const Eigen::VectorXd& d) {
    const double s = d.sum();
    return (dx - d).squaredNorm() + alpha * s * s;
  };
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_value = objective(best);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int p = std::popcount(mask);
    double support_total = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) support_total += dx(i);
    }
    const double shrink = alpha / (1.0 + alpha * p) * support_total;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    bool feasible = true;
    for (int i = 0; i < n && feasible; ++i) {
      if (mask & (1u << i)) {
        d(i) = dx(i) - shrink;
        feasible = d(i) >= 0.0;
      }
    }
    if (!feasible) continue;
    const double value = objective(d);
    if (value < best_value) {
      best_value = value;
      best = std::move(d);
    }
  }
  return best;
}

double diagonal_alignment(const Eigen::VectorXd& lambda, const Eigen::VectorXd& lambda_hat,
                          const Eigen::MatrixXd& rotation) {
  return (lambda.asDiagonal() * rotation * lambda_hat.asDiagonal() * rotation.transpose()).trace();
}

}  // namespace simmatch
