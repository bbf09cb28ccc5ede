#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "simmatch/regularizer.hpp"
#include "simmatch/spectral.hpp"

namespace simmatch {

// Regularized similarity matching posed on the (descending) input spectrum.
// `input_eigenvalues` are eigenvalues of X^T X (equivalently of X X^T, which
// shares the nonzero ones), so they carry the factor T. Pass a per-sample
// spectrum with samples = 1 to work in normalized units.
struct OfflineProblem {
  Eigen::VectorXd input_eigenvalues;
  // Optional n x m eigenbasis paired with input_eigenvalues; when present the
  // solution carries its top-k columns.
  std::optional<Eigen::MatrixXd> input_eigenvectors;
  int k = 1;
  double alpha = 0.0;
  RegularizerKind kind = RegularizerKind::ScaleDependent;
  std::int64_t samples = 1;

  // Eigendecomposes `gram` (X^T X or an unnormalized covariance X X^T).
  static OfflineProblem from_gram(const SymMatrix& gram, int k, double alpha, RegularizerKind kind,
                                  std::int64_t samples);

  void validate() const;
};

// Output spectrum of Y^T Y (length k, descending, zero-padded) plus the top-k
// input eigenbasis. Y itself is only defined up to a k x k rotation U_k, so it
// is not stored; see explicit_output().
struct OfflineSolution {
  Eigen::VectorXd output_eigenvalues;
  Eigen::MatrixXd principal_basis;  // empty when the problem had no basis
  int rank = 0;                     // count of strictly positive outputs
};

OfflineSolution solve_scale_dependent(const OfflineProblem& p);
OfflineSolution solve_input_output(const OfflineProblem& p);
OfflineSolution solve_squared_output(const OfflineProblem& p);
OfflineSolution solve(const OfflineProblem& p);

// Allocation-free kernel behind the solve_* functions: writes the k output
// eigenvalues for a descending input spectrum into `out` and returns the
// rank. Inputs are not validated.
int solve_output_spectrum(RegularizerKind kind, double alpha, std::int64_t samples,
                          std::span<const double> input_eigenvalues, std::span<double> out);

// Threshold applied by the soft-thresholding solvers: alpha * T or
// alpha * Tr(X^T X).
double offline_threshold(const OfflineProblem& p);

// Y = U diag(sqrt(d)) V_k^T; with `rotation` omitted U = I.
Eigen::MatrixXd explicit_output(const OfflineSolution& s,
                                const std::optional<Eigen::MatrixXd>& rotation = std::nullopt);

// The objective in eigenvalue coordinates, exactly as each regularizer
// defines it:
//   sum_i (lx_i - ly_i)^2 + 2 alpha T sum(ly)          (scale-dependent)
//   sum_i (lx_i - ly_i)^2 + 2 alpha sum(lx) sum(ly)    (input-output)
//   sum_i (lx_i - ly_i)^2 + alpha sum(ly)^2            (squared-output)
// `output_eigenvalues` is zero-padded to the input length.
double objective_value(const OfflineProblem& p, const Eigen::VectorXd& output_eigenvalues);

// Exhaustive NNLS for min_{d >= 0} ||dx - d||^2 + alpha (1^T d)^2: every
// support is tried and solved through the closed-form inverse
// I - alpha/(1 + alpha p) 1 1^T. Desk-scale only (size <= 12).
Eigen::VectorXd nnls_bruteforce(const Eigen::VectorXd& dx, double alpha);

// Tr(L O H O^T) for diagonal L = diag(lambda), H = diag(lambda_hat).
double diagonal_alignment(const Eigen::VectorXd& lambda, const Eigen::VectorXd& lambda_hat,
                          const Eigen::MatrixXd& rotation);

}  // namespace simmatch
