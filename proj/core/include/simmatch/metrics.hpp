#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "simmatch/datagen.hpp"
#include "simmatch/offline.hpp"
#include "simmatch/spectral.hpp"

namespace simmatch {

// Sum of squared differences after sorting both spectra descending and
// zero-padding the shorter one.
double eigenvalue_error(const Eigen::VectorXd& output_spectrum, const Eigen::VectorXd& optimal_spectrum);

// ||B1 B1^T - B2 B2^T||_F^2 for column-orthonormal bases of equal shape.
// Lies in [0, 2k] and is invariant to right-rotation of either basis.
double subspace_error(const Eigen::MatrixXd& learned_basis, const Eigen::MatrixXd& true_basis);

struct WindowedSpectrum {
  Eigen::VectorXd eigenvalues;  // descending
  std::int64_t count = 0;       // vectors that went into the estimate
  bool partial = false;         // fewer than the requested window
};

// Eigenvalues of (1/T0) sum v v^T over the last T0 vectors (all of them when
// window == 0). A short history is normalized by its own length and flagged.
WindowedSpectrum windowed_spectrum(std::span<const Eigen::VectorXd> vectors, std::int64_t window);

// Incremental version: push vectors one at a time, query any time.
class SlidingGram {
 public:
  SlidingGram(int dim, std::int64_t window);

  void push(const Eigen::VectorXd& v);
  WindowedSpectrum spectrum() const;
  Eigen::MatrixXd gram() const;  // normalized second-moment matrix
  std::int64_t count() const { return window_ == 0 ? total_ : static_cast<std::int64_t>(buffer_.size()); }

 private:
  int dim_;
  std::int64_t window_;
  std::int64_t total_ = 0;
  Eigen::MatrixXd cumulative_;        // window == 0
  std::deque<Eigen::VectorXd> buffer_;  // window > 0
};

// Ground truth for scoring an online run: the generating spectrum and
// eigenbasis, plus the piecewise eigenvalue scaling in force at each t.
class StreamReference {
 public:
  StreamReference(SymmetricSpectrum truth, std::vector<Segment> segments);
  static StreamReference from(const StreamGenerator& gen);

  // Offline optimum on the per-sample spectrum scaled for sample index t.
  Eigen::VectorXd optimal_spectrum(RegularizerKind kind, double alpha, int k, std::int64_t t) const;
  Eigen::MatrixXd true_basis(int rank) const { return truth_.top_vectors(rank); }
  const SymmetricSpectrum& truth() const { return truth_; }
  double scale_at(std::int64_t t) const;

 private:
  SymmetricSpectrum truth_;
  std::vector<Segment> segments_;
};

inline constexpr int kInputSpectrumColumns = 4;

struct MetricsRecord {
  std::int64_t t = 0;               // samples processed so far
  Eigen::VectorXd output_spectrum;  // windowed Y-gram, descending, length k
  Eigen::VectorXd input_spectrum;   // top eigenvalues of the windowed X-gram
  double eigenvalue_error = 0.0;
  double subspace_error = 0.0;
  int rank = 0;                     // output eigenvalues above tol::kTransmitThreshold
  bool partial_window = false;
};

struct MetricsLog {
  std::vector<MetricsRecord> records;
  std::int64_t window = 0;  // 0 = cumulative

  // Enforces strictly increasing t and finite, non-negative errors.
  void append(MetricsRecord record);
  bool empty() const { return records.empty(); }
  const MetricsRecord* at(std::int64_t t) const;
};

// CSV: t,y1..yk,x1..x4,eigenvalue_error,subspace_error,rank,partial
void write_metrics_csv(std::ostream& out, const MetricsLog& log);

}  // namespace simmatch
