#pragma once

// Numeric tolerances shared across the library. Tests assert against these.

namespace simmatch::tol {

// Column Gram of a computed eigenbasis must equal I to this (max-abs).
inline constexpr double kEigenbasisOrthonormality = 1e-10;
// ||V diag(l) V^T - M||_F / max(1, ||M||_F).
inline constexpr double kEigenReconstruction = 1e-8;
// ||Q^T Q - I||_F for sampled orthonormal matrices.
inline constexpr double kOrthonormalSample = 1e-12;
// Upper bound on Jacobi sweeps before sym_eig reports non-convergence.
inline constexpr int kJacobiMaxSweeps = 100;

// Neural dynamics defaults (infinity-norm of the per-iteration change).
inline constexpr double kDynamicsTolerance = 1e-6;
inline constexpr int kDynamicsMaxIterations = 500;
inline constexpr double kJacobiWeight = 0.1;

// An output eigenvalue above this counts as a transmitted mode when reading
// rank off an online network's windowed spectrum.
inline constexpr double kTransmitThreshold = 0.1;

// nnls_bruteforce refuses problems above this size (2^n supports).
inline constexpr int kBruteforceMaxSize = 12;

}  // namespace simmatch::tol
