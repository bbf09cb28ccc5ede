#pragma once

#include <Eigen/Dense>

#include "simmatch/rng.hpp"

namespace simmatch {

// Dense real symmetric matrix. Construction symmetrizes its argument as
// (M + M^T) / 2, so entries(i, j) == entries(j, i) holds bit-exactly.
class SymMatrix {
 public:
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix identity(int dim);
  static SymMatrix diagonal(const Eigen::VectorXd& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double trace() const { return m_.trace(); }

 private:
  Eigen::MatrixXd m_;
};

// Eigenvalues sorted descending; column i of `eigenvectors` pairs with
// eigenvalue i.
struct SymmetricSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  Eigen::MatrixXd reconstruct() const;
  Eigen::MatrixXd top_vectors(int count) const { return eigenvectors.leftCols(count); }
};

// Full eigendecomposition by cyclic Jacobi rotations. Ties among equal
// eigenvalues keep their diagonal order after convergence (stable sort).
// Throws InvalidInput on non-finite entries, NumericalFailure when the sweep
// cap is exhausted.
SymmetricSpectrum sym_eig(const SymMatrix& m);

// Eigenvalues only, descending.
Eigen::VectorXd sym_eigenvalues(const SymMatrix& m);

// max(a - b, 0).
inline double soft_threshold(double a, double b) { return a - b > 0.0 ? a - b : 0.0; }

// Haar-ish orthonormal dim x dim matrix: Gaussian entries, modified
// Gram-Schmidt applied twice, then each column's first nonzero entry made
// positive.
Eigen::MatrixXd random_orthonormal(int dim, SeededRng& rng);

// Orthonormalizes the columns of `a` in place order (MGS, two passes).
// Columns whose residual norm drops below `drop_tol` are rejected; the
// returned matrix holds only the accepted columns.
Eigen::MatrixXd orthonormalize_columns(const Eigen::MatrixXd& a, double drop_tol = 1e-12);

}  // namespace simmatch
