#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "simmatch/regularizer.hpp"

namespace simmatch {

// Per-sample input spectrum with n1 signal eigenvalues a and n2 noise
// eigenvalues b, a > b >= 0.
struct DegenerateCase {
  double a = 1.0;
  double b = 0.0;
  int n1 = 1;
  int n2 = 1;

  void validate() const;
  Eigen::VectorXd spectrum() const;
};

// Regularization coefficients that transmit every signal mode with a
// positive output eigenvalue and no noise mode: low <= alpha < high. At
// alpha == high the signal output eigenvalue is exactly zero. high may be
// +inf.
struct AlphaRange {
  double low = 0.0;
  double high = std::numeric_limits<double>::infinity();

  bool unbounded() const { return high == std::numeric_limits<double>::infinity(); }
  bool contains(double alpha) const { return alpha >= low && alpha < high; }
  bool empty() const { return !(low < high); }
};

// Closed forms:
//   scale-dependent  [b, a)
//   input-output     [b / (n1 a + n2 b), a / (n1 a + n2 b))
//   squared-output   [b / ((a - b) n1), inf)
AlphaRange alpha_range(const DegenerateCase& c, RegularizerKind kind);

// a - alpha, a - alpha (n1 a + n2 b), a / (1 + alpha n1). DomainError when
// alpha is outside alpha_range.
double top_output_eigenvalue(const DegenerateCase& c, RegularizerKind kind, double alpha);

// What the offline solver (k = n1 + n2) does with the case at alpha.
struct Transmission {
  bool all_signal = false;  // every signal output eigenvalue > 0
  bool any_noise = false;   // some noise output eigenvalue > 0
  bool all_noise = false;   // every noise output eigenvalue > 0
  double top_eigenvalue = 0.0;
};
Transmission transmission(const DegenerateCase& c, RegularizerKind kind, double alpha);

struct SignalNoisePair {
  double a;
  double b;
};

// All (a, b) with a >= b on the grid {step, 2 step, ..., 1}; with step 0.01
// that is 5050 pairs. Values are i * step computed from integers.
std::vector<SignalNoisePair> signal_noise_grid(double step = 0.01);

// Pairs with a gap (a > b). Pairs with a == b have no signal/noise split, so
// "all signal and no noise" is unreachable for them under any regularizer.
std::vector<SignalNoisePair> gapped_pairs(const std::vector<SignalNoisePair>& grid);

struct FractionPoint {
  double alpha;
  double signal_fraction;  // pairs with all signal transmitted
  double noise_fraction;   // pairs with all noise transmitted
  bool separates() const { return signal_fraction == 1.0 && noise_fraction == 0.0; }
};

// Membership is decided by the offline solver's output eigenvalues.
std::vector<FractionPoint> fraction_curve(RegularizerKind kind, const std::vector<SignalNoisePair>& grid, int n1,
                                          int n2, const std::vector<double>& alphas);

// Candidate alphas for a sweep: `points_per_decade` log-spaced values over
// [low, high], every finite alpha_range endpoint over the grid, and the
// midpoint between consecutive sorted endpoints (so each interval on which
// the fractions are constant gets an interior sample). Sorted, unique.
std::vector<double> sweep_alphas(RegularizerKind kind, const std::vector<SignalNoisePair>& grid, int n1, int n2,
                                 double low = 1e-3, double high = 1e3, int points_per_decade = 50);

struct PhasePoint {
  double ratio;  // b / a with a = 1
  AlphaRange range;
};
std::vector<PhasePoint> phase_diagram(RegularizerKind kind, const std::vector<double>& noise_ratios, int n1, int n2);

}  // namespace simmatch
