#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "simmatch/rng.hpp"
#include "simmatch/spectral.hpp"

namespace simmatch {

// Covariance eigenvalues: an explicit descending head followed by
// `tail_count` values drawn uniformly from [tail_low, tail_high].
struct SpectrumSpec {
  std::vector<double> head;
  int tail_count = 0;
  double tail_low = 0.0;
  double tail_high = 0.0;

  int size() const { return static_cast<int>(head.size()) + tail_count; }
  void validate() const;
};

// Piecewise-constant eigenvalue scaling of the base covariance, active from
// `start` (inclusive) until the next segment starts.
struct Segment {
  std::int64_t start = 0;
  double scale = 1.0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct StreamSchedule {
  int dim = 0;
  SpectrumSpec base;
  std::vector<Segment> segments{Segment{0, 1.0}};
  std::uint64_t seed = 0;

  void validate() const;
  double scale_at(std::int64_t t) const;
};

struct Sample {
  std::int64_t t = 0;
  Eigen::VectorXd x;
};

struct Covariance {
  SymMatrix matrix;
  SymmetricSpectrum spectrum;  // ground truth: Lambda (descending) and Q
};

// C = Q diag(lambda) Q^T. Draw order: tail values, then Q.
Covariance realize_covariance(const SpectrumSpec& spec, int dim, SeededRng& rng);

// Sequential sampler for a schedule: x_t ~ N(0, s(t) C) with the eigenbasis
// of C fixed for the whole stream. Samples must be consumed in order.
class StreamGenerator {
 public:
  explicit StreamGenerator(const StreamSchedule& schedule);

  const StreamSchedule& schedule() const { return schedule_; }
  const Covariance& covariance() const { return covariance_; }
  std::int64_t position() const { return next_t_; }

  Sample next();
  std::vector<Sample> take(std::int64_t count);

 private:
  StreamSchedule schedule_;
  SeededRng rng_;
  Covariance covariance_;
  Eigen::VectorXd sqrt_eigenvalues_;
  std::int64_t next_t_ = 0;
};

// Draws the sample at index t; t must equal generator.position().
Sample next_sample(StreamGenerator& generator, std::int64_t t);

// Stream CSV: header "t,x1,...,xn", then one row per sample.
void write_stream_csv(std::ostream& out, const std::vector<Sample>& samples);
std::vector<Sample> read_stream_csv(std::istream& in);

}  // namespace simmatch
