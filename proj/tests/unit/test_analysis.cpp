#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "simmatch/analysis.hpp"
#include "simmatch/errors.hpp"
#include "simmatch/offline.hpp"

using namespace simmatch;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

OfflineSolution solve_case(const DegenerateCase& c, RegularizerKind kind, double alpha) {
  OfflineProblem p;
  p.input_eigenvalues = c.spectrum();
  p.k = c.n1 + c.n2;
  p.alpha = alpha;
  p.kind = kind;
  return solve(p);
}

}  // namespace

TEST(DegenerateCase, SpectrumAndValidation) {
  const DegenerateCase c{1.0, 0.5, 2, 3};
  const Eigen::VectorXd s = c.spectrum();
  ASSERT_EQ(s.size(), 5);
  EXPECT_EQ(s(0), 1.0);
  EXPECT_EQ(s(1), 1.0);
  EXPECT_EQ(s(4), 0.5);
  EXPECT_THROW((DegenerateCase{0.5, 0.5, 1, 1}.validate()), InvalidInput);
  EXPECT_THROW((DegenerateCase{1.0, -0.1, 1, 1}.validate()), InvalidInput);
  EXPECT_THROW((DegenerateCase{1.0, 0.5, 0, 1}.validate()), InvalidInput);
}

TEST(AlphaRange, MixedMultiplicityExample) {
  const DegenerateCase c{1.0, 0.5, 2, 3};
  const auto sd = alpha_range(c, RegularizerKind::ScaleDependent);
  EXPECT_EQ(sd.low, 0.5);
  EXPECT_EQ(sd.high, 1.0);
  const auto io = alpha_range(c, RegularizerKind::InputOutput);
  EXPECT_NEAR(io.low, 1.0 / 7.0, 1e-15);
  EXPECT_NEAR(io.high, 2.0 / 7.0, 1e-15);
  const auto so = alpha_range(c, RegularizerKind::SquaredOutput);
  EXPECT_EQ(so.low, 0.5);
  EXPECT_TRUE(so.unbounded());
}

TEST(AlphaRange, Noiseless) {
  const DegenerateCase c{0.8, 0.0, 2, 2};
  EXPECT_EQ(alpha_range(c, RegularizerKind::ScaleDependent).low, 0.0);
  EXPECT_EQ(alpha_range(c, RegularizerKind::ScaleDependent).high, 0.8);
  EXPECT_EQ(alpha_range(c, RegularizerKind::InputOutput).low, 0.0);
  EXPECT_NEAR(alpha_range(c, RegularizerKind::InputOutput).high, 0.8 / 1.6, 1e-15);
  EXPECT_EQ(alpha_range(c, RegularizerKind::SquaredOutput).low, 0.0);
  EXPECT_EQ(alpha_range(c, RegularizerKind::SquaredOutput).high, kInf);
}

TEST(AlphaRange, HalfOpenMembership) {
  AlphaRange r{0.5, 1.0};
  EXPECT_TRUE(r.contains(0.5));
  EXPECT_TRUE(r.contains(0.99));
  EXPECT_FALSE(r.contains(1.0));
  EXPECT_FALSE(r.empty());
  EXPECT_TRUE((AlphaRange{1.0, 1.0}.empty()));
}

TEST(TopOutputEigenvalue, Examples) {
  EXPECT_NEAR(top_output_eigenvalue({1.0, 0.5, 1, 1}, RegularizerKind::ScaleDependent, 0.7), 0.3, 1e-15);
  EXPECT_NEAR(top_output_eigenvalue({1.0, 0.1, 2, 1}, RegularizerKind::SquaredOutput, 0.5), 0.5, 1e-15);
  EXPECT_NEAR(top_output_eigenvalue({0.6, 0.2, 1, 1}, RegularizerKind::InputOutput, 0.5), 0.2, 1e-15);
  EXPECT_THROW(top_output_eigenvalue({1.0, 0.5, 1, 1}, RegularizerKind::ScaleDependent, 0.2), DomainError);
  EXPECT_THROW(top_output_eigenvalue({1.0, 0.5, 1, 1}, RegularizerKind::ScaleDependent, 1.0), DomainError);
  EXPECT_THROW(top_output_eigenvalue({1.0, 0.5, 1, 1}, RegularizerKind::SquaredOutput, 0.1), DomainError);
}

TEST(Analysis, ClosedFormsAgreeWithOfflineSolver) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> m(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = 0.05 + u(gen), b = a * u(gen) * 0.95;
    const DegenerateCase c{a, b, m(gen), m(gen)};
    for (RegularizerKind kind : kAllRegularizers) {
      const AlphaRange r = alpha_range(c, kind);
      const double span = r.unbounded() ? 4.0 * (r.low + 1.0) : r.high;
      for (int j = 0; j < 10; ++j) {
        const double alpha = u(gen) * span * 1.2;
        const auto sol = solve_case(c, kind, alpha);
        const bool separates = sol.rank == c.n1 && (sol.output_eigenvalues.head(c.n1).array() > 0.0).all();
        // alphas within 1e-12 of an endpoint are ties decided by rounding
        const bool near_edge = std::abs(alpha - r.low) < 1e-12 || std::abs(alpha - r.high) < 1e-12;
        if (!near_edge) EXPECT_EQ(separates, r.contains(alpha)) << to_string(kind) << " a=" << a << " b=" << b;
        if (r.contains(alpha) && !near_edge) {
          EXPECT_NEAR(sol.output_eigenvalues(0), top_output_eigenvalue(c, kind, alpha), 1e-10);
        }
        const Transmission t = transmission(c, kind, alpha);
        EXPECT_EQ(t.top_eigenvalue, sol.output_eigenvalues(0));
        EXPECT_EQ(t.all_signal, (sol.output_eigenvalues.head(c.n1).array() > 0.0).all());
        EXPECT_EQ(t.any_noise, (sol.output_eigenvalues.tail(c.n2).array() > 0.0).any());
      }
    }
  }
}

TEST(Grid, FullGridSize) {
  const auto grid = signal_noise_grid();
  EXPECT_EQ(grid.size(), 5050u);
  for (const auto& p : grid) {
    EXPECT_GE(p.a, p.b);
    EXPECT_GE(p.b, 0.01 - 1e-15);
    EXPECT_LE(p.a, 1.0);
  }
  EXPECT_EQ(gapped_pairs(grid).size(), 4950u);
  EXPECT_EQ(signal_noise_grid(0.5).size(), 3u);
}

TEST(FractionCurve, Limits) {
  const auto pairs = gapped_pairs(signal_noise_grid(0.05));
  for (RegularizerKind kind : kAllRegularizers) {
    const auto zero = fraction_curve(kind, pairs, 1, 1, {1e-12});
    EXPECT_EQ(zero[0].signal_fraction, 1.0);
    EXPECT_EQ(zero[0].noise_fraction, 1.0);
  }
  const auto inf = fraction_curve(RegularizerKind::ScaleDependent, pairs, 1, 1, {1e6});
  EXPECT_EQ(inf[0].signal_fraction, 0.0);
  EXPECT_EQ(inf[0].noise_fraction, 0.0);
}

TEST(FractionCurve, SquaredOutputAtUnitAlphaCountsPairsWithAGeTwoB) {
  const auto grid = signal_noise_grid();
  const auto pairs = gapped_pairs(grid);
  std::size_t strict = 0, loose = 0;
  for (int i = 1; i <= 100; ++i) {
    for (int j = 1; j < i; ++j) {
      strict += (i > 2 * j);
      loose += (i >= 2 * j);
    }
  }
  const auto pt = fraction_curve(RegularizerKind::SquaredOutput, pairs, 1, 1, {1.0})[0];
  EXPECT_EQ(pt.signal_fraction, 1.0);
  const double rejected = (1.0 - pt.noise_fraction) * static_cast<double>(pairs.size());
  EXPECT_GE(rejected, static_cast<double>(strict) - 1e-9);
  EXPECT_LE(rejected, static_cast<double>(loose) + 1e-9);
}

TEST(FractionCurve, RejectsBadMultiplicities) {
  const auto pairs = gapped_pairs(signal_noise_grid(0.5));
  EXPECT_THROW(fraction_curve(RegularizerKind::ScaleDependent, pairs, 0, 1, {1.0}), InvalidInput);
}

TEST(SweepAlphas, IncludesEndpointsSortedUnique) {
  const auto pairs = gapped_pairs(signal_noise_grid(0.25));
  const auto alphas = sweep_alphas(RegularizerKind::InputOutput, pairs, 1, 1);
  EXPECT_TRUE(std::is_sorted(alphas.begin(), alphas.end()));
  EXPECT_EQ(std::adjacent_find(alphas.begin(), alphas.end()), alphas.end());
  EXPECT_DOUBLE_EQ(alphas.front(), 1e-3);
  for (const auto& p : pairs) {
    const auto r = alpha_range({p.a, p.b, 1, 1}, RegularizerKind::InputOutput);
    EXPECT_TRUE(std::binary_search(alphas.begin(), alphas.end(), r.low));
  }
}

TEST(Separation, OnlyTheNewRegularizersSeparateACoarseGrid) {
  const auto pairs = gapped_pairs(signal_noise_grid(0.05));
  for (RegularizerKind kind : kAllRegularizers) {
    const auto curve = fraction_curve(kind, pairs, 1, 1, sweep_alphas(kind, pairs, 1, 1));
    const bool any = std::any_of(curve.begin(), curve.end(), [](const FractionPoint& p) { return p.separates(); });
    EXPECT_EQ(any, kind != RegularizerKind::ScaleDependent) << to_string(kind);
  }
}

TEST(PhaseDiagram, RatioHalf) {
  const auto so = phase_diagram(RegularizerKind::SquaredOutput, {0.5}, 1, 1);
  EXPECT_NEAR(so[0].range.low, 1.0, 1e-15);
  EXPECT_TRUE(so[0].range.unbounded());
  const auto io = phase_diagram(RegularizerKind::InputOutput, {0.5}, 1, 1);
  EXPECT_NEAR(io[0].range.low, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(io[0].range.high, 2.0 / 3.0, 1e-15);
}

TEST(PhaseDiagram, SquaredOutputLowerBoundMonotoneAndVanishes) {
  std::vector<double> ratios;
  for (int i = 1; i < 100; ++i) ratios.push_back(i / 100.0);
  const auto so = phase_diagram(RegularizerKind::SquaredOutput, ratios, 1, 1);
  for (std::size_t i = 1; i < so.size(); ++i) EXPECT_GT(so[i].range.low, so[i - 1].range.low);
  EXPECT_LT(phase_diagram(RegularizerKind::SquaredOutput, {1e-9}, 1, 1)[0].range.low, 1e-8);
  EXPECT_THROW(phase_diagram(RegularizerKind::SquaredOutput, {1.0}, 1, 1), InvalidInput);
}
