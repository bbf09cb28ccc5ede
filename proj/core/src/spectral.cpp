#include "simmatch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "simmatch/constants.hpp"
#include "simmatch/errors.hpp"

namespace simmatch {

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw InvalidInput("SymMatrix: expected a non-empty square matrix, got " +
                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(int dim) {
  return SymMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
  return SymMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

Eigen::MatrixXd SymmetricSpectrum::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

namespace {

// Rotates rows/columns (p, q) of the symmetric working matrix `a` to zero
// a(p, q), and accumulates the rotation into `v`.
void jacobi_rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& v, int p, int q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = std::abs(theta) > 1e150
                       ? 0.5 / theta
                       : std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);
  const int n = static_cast<int>(a.rows());

  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (int r = 0; r < n; ++r) {
    if (r == p || r == q) continue;
    const double arp = a(r, p);
    const double arq = a(r, q);
    const double new_rp = arp - s * (arq + tau * arp);
    const double new_rq = arq + s * (arp - tau * arq);
    a(r, p) = a(p, r) = new_rp;
    a(r, q) = a(q, r) = new_rq;
  }
  for (int r = 0; r < n; ++r) {
    const double vrp = v(r, p);
    const double vrq = v(r, q);
    v(r, p) = vrp - s * (vrq + tau * vrp);
    v(r, q) = vrq + s * (vrp - tau * vrq);
  }
}

double off_diagonal_abs_sum(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (int p = 0; p < a.rows(); ++p) {
    for (int q = p + 1; q < a.cols(); ++q) sum += std::abs(a(p, q));
  }
  return sum;
}

}  // namespace

SymmetricSpectrum sym_eig(const SymMatrix& m) {
  const int n = m.dim();
  if (!m.matrix().allFinite()) {
    throw InvalidInput("sym_eig: matrix of dimension " + std::to_string(n) +
                       " has non-finite entries");
  }
  Eigen::MatrixXd a = m.matrix();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  bool converged = n == 1;
  for (int sweep = 0; sweep < tol::kJacobiMaxSweeps && !converged; ++sweep) {
    const double off = off_diagonal_abs_sum(a);
    if (off == 0.0) {
      converged = true;
      break;
    }
    // Early sweeps only rotate sizable entries.
    const double threshold = sweep < 3 ? 0.2 * off / (n * n) : 0.0;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double g = 100.0 * std::abs(a(p, q));
        // Entry is below rounding relative to both diagonals: drop it.
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
        } else if (std::abs(a(p, q)) > threshold) {
          jacobi_rotate(a, v, p, q);
        }
      }
    }
  }
  if (!converged && off_diagonal_abs_sum(a) != 0.0) {
    throw NumericalFailure("sym_eig: Jacobi iteration did not converge for dimension " +
                           std::to_string(n));
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) > a(j, j); });

  SymmetricSpectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.eigenvalues(i) = a(order[i], order[i]);
    out.eigenvectors.col(i) = v.col(order[i]);
  }
  return out;
}

Eigen::VectorXd sym_eigenvalues(const SymMatrix& m) { return sym_eig(m).eigenvalues; }

Eigen::MatrixXd orthonormalize_columns(const Eigen::MatrixXd& a, double drop_tol) {
  Eigen::MatrixXd q(a.rows(), a.cols());
  int accepted = 0;
  for (int j = 0; j < a.cols(); ++j) {
    Eigen::VectorXd col = a.col(j);
    const double original = col.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < accepted; ++i) col -= q.col(i).dot(col) * q.col(i);
    }
    const double norm = col.norm();
    if (norm <= drop_tol * std::max(1.0, original)) continue;
    q.col(accepted++) = col / norm;
  }
  return q.leftCols(accepted);
}

Eigen::MatrixXd random_orthonormal(int dim, SeededRng& rng) {
  if (dim < 1) throw InvalidInput("random_orthonormal: dim must be >= 1");
  Eigen::MatrixXd g(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) g(i, j) = rng.gaussian();
  }
  Eigen::MatrixXd q = orthonormalize_columns(g, 0.0);
  if (q.cols() != dim) {
    throw NumericalFailure("random_orthonormal: rank-deficient Gaussian draw for dimension " +
                           std::to_string(dim));
  }
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      if (q(i, j) != 0.0) {
        if (q(i, j) < 0.0) q.col(j) = -q.col(j);
        break;
      }
    }
  }
  return q;
}

}  // namespace simmatch
