#include "simmatch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "simmatch/errors.hpp"
#include "simmatch/offline.hpp"

namespace simmatch {

void DegenerateCase::validate() const {
  if (!(a > b) || !(b >= 0.0) || !std::isfinite(a)) {
    throw InvalidInput("degenerate case: need a > b >= 0 (a=" + std::to_string(a) + ", b=" + std::to_string(b) + ")");
  }
  if (n1 < 1 || n2 < 1) throw InvalidInput("degenerate case: multiplicities must be >= 1");
}

Eigen::VectorXd DegenerateCase::spectrum() const {
  Eigen::VectorXd s(n1 + n2);
  s.head(n1).setConstant(a);
  s.tail(n2).setConstant(b);
  return s;
}

AlphaRange alpha_range(const DegenerateCase& c, RegularizerKind kind) {
  c.validate();
  const double total = c.n1 * c.a + c.n2 * c.b;
  switch (kind) {
    case RegularizerKind::ScaleDependent: return {c.b, c.a};
    case RegularizerKind::InputOutput: return {c.b / total, c.a / total};
    case RegularizerKind::SquaredOutput:
      return {c.b / ((c.a - c.b) * c.n1), std::numeric_limits<double>::infinity()};
  }
  throw InvalidInput("alpha_range: unknown regularizer");
}

double top_output_eigenvalue(const DegenerateCase& c, RegularizerKind kind, double alpha) {
  const AlphaRange range = alpha_range(c, kind);
  if (!range.contains(alpha)) {
    throw DomainError("top_output_eigenvalue: alpha " + std::to_string(alpha) + " outside [" +
                      std::to_string(range.low) + ", " + std::to_string(range.high) + ")");
  }
  switch (kind) {
    case RegularizerKind::ScaleDependent: return c.a - alpha;
    case RegularizerKind::InputOutput: return c.a - alpha * (c.n1 * c.a + c.n2 * c.b);
    case RegularizerKind::SquaredOutput: return c.a / (1.0 + alpha * c.n1);
  }
  return 0.0;
}

Transmission transmission(const DegenerateCase& c, RegularizerKind kind, double alpha) {
  OfflineProblem p;
  p.input_eigenvalues = c.spectrum();
  p.k = c.n1 + c.n2;
  p.alpha = alpha;
  p.kind = kind;
  p.samples = 1;
  const OfflineSolution s = solve(p);
  const auto& d = s.output_eigenvalues;
  Transmission t;
  t.all_signal = (d.head(c.n1).array() > 0.0).all();
  t.any_noise = (d.tail(c.n2).array() > 0.0).any();
  t.all_noise = (d.tail(c.n2).array() > 0.0).all();
  t.top_eigenvalue = d(0);
  return t;
}

std::vector<SignalNoisePair> signal_noise_grid(double step) {
  if (!(step > 0.0) || step > 1.0) throw InvalidInput("signal_noise_grid: step must lie in (0, 1]");
  const long count = std::lround(1.0 / step);
  if (std::abs(count * step - 1.0) > 1e-9) throw InvalidInput("signal_noise_grid: step must divide 1");
  std::vector<SignalNoisePair> grid;
  grid.reserve(static_cast<std::size_t>(count * (count + 1) / 2));
  for (long i = 1; i <= count; ++i) {
    for (long j = 1; j <= i; ++j) {
      grid.push_back({static_cast<double>(i) / count, static_cast<double>(j) / count});
    }
  }
  return grid;
}

std::vector<SignalNoisePair> gapped_pairs(const std::vector<SignalNoisePair>& grid) {
  std::vector<SignalNoisePair> out;
  std::copy_if(grid.begin(), grid.end(), std::back_inserter(out), [](const auto& p) { return p.a > p.b; });
  return out;
}

std::vector<FractionPoint> fraction_curve(RegularizerKind kind, const std::vector<SignalNoisePair>& grid, int n1,
                                          int n2, const std::vector<double>& alphas) {
  if (grid.empty()) throw InvalidInput("fraction_curve: empty grid");
  if (n1 < 1 || n2 < 1) throw InvalidInput("fraction_curve: multiplicities must be >= 1");
  std::vector<FractionPoint> curve;
  curve.reserve(alphas.size());
  const double total = static_cast<double>(grid.size());
  const int dim = n1 + n2;
  std::vector<double> input(dim);
  std::vector<double> output(dim);
  for (double alpha : alphas) {
    if (!(alpha > 0.0)) throw InvalidInput("fraction_curve: alphas must be positive");
    std::size_t signal = 0;
    std::size_t noise = 0;
    for (const auto& pair : grid) {
      std::fill(input.begin(), input.begin() + n1, pair.a);
      std::fill(input.begin() + n1, input.end(), pair.b);
      solve_output_spectrum(kind, alpha, 1, input, output);
      signal += std::all_of(output.begin(), output.begin() + n1, [](double d) { return d > 0.0; });
      noise += std::all_of(output.begin() + n1, output.end(), [](double d) { return d > 0.0; });
    }
    curve.push_back({alpha, signal / total, noise / total});
  }
  return curve;
}

std::vector<double> sweep_alphas(RegularizerKind kind, const std::vector<SignalNoisePair>& grid, int n1, int n2,
                                 double low, double high, int points_per_decade) {
  if (!(low > 0.0) || !(high > low) || points_per_decade < 1) {
    throw InvalidInput("sweep_alphas: need 0 < low < high and points_per_decade >= 1");
  }
  std::vector<double> endpoints;
  for (const auto& pair : grid) {
    if (!(pair.a > pair.b)) continue;
    const AlphaRange r = alpha_range(DegenerateCase{pair.a, pair.b, n1, n2}, kind);
    if (r.low > 0.0) endpoints.push_back(r.low);
    if (std::isfinite(r.high)) endpoints.push_back(r.high);
  }
  std::sort(endpoints.begin(), endpoints.end());
  endpoints.erase(std::unique(endpoints.begin(), endpoints.end()), endpoints.end());

  std::vector<double> alphas = endpoints;
  for (std::size_t i = 0; i + 1 < endpoints.size(); ++i) {
    alphas.push_back(0.5 * (endpoints[i] + endpoints[i + 1]));
  }
  const double decades = std::log10(high / low);
  const int steps = static_cast<int>(std::ceil(decades * points_per_decade));
  for (int i = 0; i <= steps; ++i) {
    alphas.push_back(low * std::pow(10.0, decades * i / steps));
  }
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  return alphas;
}

std::vector<PhasePoint> phase_diagram(RegularizerKind kind, const std::vector<double>& noise_ratios, int n1, int n2) {
  std::vector<PhasePoint> out;
  out.reserve(noise_ratios.size());
  for (double ratio : noise_ratios) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidInput("phase_diagram: ratios must lie in (0, 1)");
    out.push_back({ratio, alpha_range(DegenerateCase{1.0, ratio, n1, n2}, kind)});
  }
  return out;
}

}  // namespace simmatch
