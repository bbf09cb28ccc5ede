#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "simmatch/errors.hpp"
#include "simmatch/offline.hpp"

using namespace simmatch;

namespace {

OfflineProblem problem(std::vector<double> spectrum, int k, double alpha, RegularizerKind kind,
                       std::int64_t samples = 1) {
  OfflineProblem p;
  p.input_eigenvalues = Eigen::Map<Eigen::VectorXd>(spectrum.data(), static_cast<Eigen::Index>(spectrum.size()));
  p.k = k;
  p.alpha = alpha;
  p.kind = kind;
  p.samples = samples;
  return p;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> random_spectrum(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::vector<double> s(n);
  for (double& v : s) v = u(gen);
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

double oracle_objective(const OfflineProblem& p, const std::vector<double>& ly) {
  const auto lx = to_vec(p.input_eigenvalues);
  switch (p.kind) {
    case RegularizerKind::ScaleDependent: return oracle::objective_scale(lx, ly, p.alpha, static_cast<double>(p.samples));
    case RegularizerKind::InputOutput: return oracle::objective_io(lx, ly, p.alpha);
    case RegularizerKind::SquaredOutput: return oracle::objective_squared(lx, ly, p.alpha);
  }
  return 0.0;
}

}  // namespace

TEST(ScaleDependent, Examples) {
  auto s = solve_scale_dependent(problem({5, 1}, 2, 2, RegularizerKind::ScaleDependent));
  EXPECT_EQ(s.output_eigenvalues(0), 3.0);
  EXPECT_EQ(s.output_eigenvalues(1), 0.0);
  EXPECT_EQ(s.rank, 1);

  s = solve_scale_dependent(problem({0.8, 0.3}, 2, 0.5, RegularizerKind::ScaleDependent));
  EXPECT_NEAR(s.output_eigenvalues(0), 0.3, 1e-15);
  EXPECT_EQ(s.output_eigenvalues(1), 0.0);

  s = solve_scale_dependent(problem({5, 4, 3}, 2, 0, RegularizerKind::ScaleDependent));
  EXPECT_EQ(s.output_eigenvalues(0), 5.0);
  EXPECT_EQ(s.output_eigenvalues(1), 4.0);
}

TEST(ScaleDependent, ThresholdCarriesSampleCount) {
  const auto s = solve_scale_dependent(problem({50, 10}, 2, 0.2, RegularizerKind::ScaleDependent, 100));
  EXPECT_EQ(s.output_eigenvalues(0), 30.0);
  EXPECT_EQ(s.rank, 1);
}

TEST(ScaleDependent, BoundaryTieIsRankExcluded) {
  const auto s = solve_scale_dependent(problem({3, 2}, 2, 2, RegularizerKind::ScaleDependent));
  EXPECT_EQ(s.output_eigenvalues(1), 0.0);
  EXPECT_EQ(s.rank, 1);
}

TEST(InputOutput, Examples) {
  auto s = solve_input_output(problem({0.6, 0.2}, 2, 0.5, RegularizerKind::InputOutput));
  EXPECT_NEAR(s.output_eigenvalues(0), 0.2, 1e-15);
  EXPECT_EQ(s.output_eigenvalues(1), 0.0);
  EXPECT_EQ(s.rank, 1);
  EXPECT_NEAR(s.output_eigenvalues(0), 0.6 - 0.5 * (0.6 + 0.2), 1e-15);

  s = solve_input_output(problem({3, 2, 1}, 3, 0, RegularizerKind::InputOutput));
  EXPECT_EQ(to_vec(s.output_eigenvalues), (std::vector<double>{3, 2, 1}));
}

TEST(InputOutput, MatchesScaleDependentWithTraceScaledAlpha) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = random_spectrum(gen, 6);
    const std::int64_t t = 1 + trial;
    const auto io = solve_input_output(problem(spec, 6, 0.1, RegularizerKind::InputOutput, t));
    double tr = 0.0;
    for (double v : spec) tr += v;
    const auto sd = solve_scale_dependent(problem(spec, 6, 0.1 * tr / static_cast<double>(t),
                                                  RegularizerKind::ScaleDependent, t));
    EXPECT_LT((io.output_eigenvalues - sd.output_eigenvalues).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SquaredOutput, Examples) {
  auto s = solve_squared_output(problem({6, 5, 4}, 3, 1, RegularizerKind::SquaredOutput));
  EXPECT_NEAR(s.output_eigenvalues(0), 2.25, 1e-14);
  EXPECT_NEAR(s.output_eigenvalues(1), 1.25, 1e-14);
  EXPECT_NEAR(s.output_eigenvalues(2), 0.25, 1e-14);
  EXPECT_EQ(s.rank, 3);

  s = solve_squared_output(problem({1, 0.5}, 2, 2, RegularizerKind::SquaredOutput));
  EXPECT_EQ(s.rank, 1);
  EXPECT_NEAR(s.output_eigenvalues(0), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(s.output_eigenvalues(1), 0.0);

  s = solve_squared_output(problem({4, 3, 1}, 2, 0, RegularizerKind::SquaredOutput));
  EXPECT_EQ(to_vec(s.output_eigenvalues), (std::vector<double>{4, 3}));
}

TEST(SquaredOutput, AgreesWithBruteForce) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> ua(0.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 12;
    const auto spec = random_spectrum(gen, n);
    const double alpha = ua(gen);
    const auto s = solve_squared_output(problem(spec, n, alpha, RegularizerKind::SquaredOutput));
    const Eigen::VectorXd brute = nnls_bruteforce(Eigen::Map<const Eigen::VectorXd>(spec.data(), n), alpha);
    EXPECT_LT((s.output_eigenvalues - brute).cwiseAbs().maxCoeff(), 1e-10) << trial;
  }
}

TEST(Nnls, Examples) {
  Eigen::Vector3d a(6, 5, 4);
  const Eigen::VectorXd d = nnls_bruteforce(a, 1.0);
  EXPECT_NEAR(d(0), 2.25, 1e-14);
  EXPECT_NEAR(d(1), 1.25, 1e-14);
  EXPECT_NEAR(d(2), 0.25, 1e-14);

  Eigen::Vector3d mixed(2, -1, 0.5);
  const Eigen::VectorXd z = nnls_bruteforce(mixed, 0.0);
  EXPECT_EQ(z(0), 2.0);
  EXPECT_EQ(z(1), 0.0);
  EXPECT_EQ(z(2), 0.5);

  Eigen::Vector2d b(1, 0.5);
  const Eigen::VectorXd e = nnls_bruteforce(b, 2.0);
  EXPECT_NEAR(e(0), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(e(1), 0.0);
}

TEST(Nnls, SizeLimit) {
  EXPECT_THROW(nnls_bruteforce(Eigen::VectorXd::Ones(13), 1.0), InvalidInput);
  EXPECT_NO_THROW(nnls_bruteforce(Eigen::VectorXd::Ones(12), 1.0));
}

TEST(Offline, PerturbationNeverImprovesObjective) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> ua(0.0, 0.5);
  const double eps = 1e-4;
  for (RegularizerKind kind : kAllRegularizers) {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + trial % 7;
      const int k = 1 + trial % n;
      const auto spec = random_spectrum(gen, n);
      const auto p = problem(spec, k, ua(gen), kind, 1 + trial % 3);
      const auto s = solve(p);
      const auto best = to_vec(s.output_eigenvalues);
      const double f0 = oracle_objective(p, best);
      EXPECT_NEAR(f0, objective_value(p, s.output_eigenvalues), 1e-9 * (1 + std::abs(f0)));
      for (int i = 0; i < k; ++i) {
        for (double delta : {eps, -eps}) {
          auto trial_point = best;
          trial_point[i] += delta;
          if (trial_point[i] < 0.0) continue;
          EXPECT_GE(oracle_objective(p, trial_point), f0 - 1e-12) << to_string(kind) << " " << trial;
        }
      }
    }
  }
}

TEST(Offline, OutputsDescendingAndBounded) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> ua(0.0, 2.0);
  for (RegularizerKind kind : kAllRegularizers) {
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + trial % 10;
      const int k = 1 + trial % n;
      const auto s = solve(problem(random_spectrum(gen, n), k, ua(gen), kind));
      ASSERT_EQ(s.output_eigenvalues.size(), k);
      for (int i = 0; i < k; ++i) EXPECT_GE(s.output_eigenvalues(i), 0.0);
      for (int i = 1; i < k; ++i) EXPECT_GE(s.output_eigenvalues(i - 1), s.output_eigenvalues(i));
      EXPECT_LE(s.rank, k);
      EXPECT_EQ(s.rank, (s.output_eigenvalues.array() > 0.0).count());
    }
  }
}

TEST(Offline, ShortSpectrumIsZeroPadded) {
  const auto s = solve(problem({4}, 3, 1, RegularizerKind::ScaleDependent));
  ASSERT_EQ(s.output_eigenvalues.size(), 3);
  EXPECT_EQ(s.output_eigenvalues(0), 3.0);
  EXPECT_EQ(s.output_eigenvalues(2), 0.0);
}

TEST(Offline, ValidationErrors) {
  EXPECT_THROW(solve(problem({1, 2}, 2, 1, RegularizerKind::ScaleDependent)), InvalidInput);
  EXPECT_THROW(solve(problem({2, 1}, 0, 1, RegularizerKind::ScaleDependent)), InvalidInput);
  EXPECT_THROW(solve(problem({2, 1}, 1, -1, RegularizerKind::ScaleDependent)), InvalidInput);
  EXPECT_THROW(solve(problem({2, 1}, 1, 1, RegularizerKind::ScaleDependent, 0)), InvalidInput);
  EXPECT_THROW(solve_input_output(problem({2, 1}, 1, 1, RegularizerKind::ScaleDependent)), InvalidInput);
}

TEST(Offline, FromGramSharesNonzeroSpectrumWithCovariance) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> g;
  const int n = 4, t = 7;
  Eigen::MatrixXd x(n, t);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < t; ++j) x(i, j) = g(gen);
  const auto from_tt = OfflineProblem::from_gram(SymMatrix(x.transpose() * x), 3, 0.1, RegularizerKind::InputOutput, t);
  const auto from_nn = OfflineProblem::from_gram(SymMatrix(x * x.transpose()), 3, 0.1, RegularizerKind::InputOutput, t);
  const auto a = solve(from_tt), b = solve(from_nn);
  EXPECT_LT((a.output_eigenvalues - b.output_eigenvalues).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(b.principal_basis.cols(), 3);
  EXPECT_LT((b.principal_basis.transpose() * b.principal_basis - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-10);
}

TEST(Offline, OutputGramInvariantUnderRotation) {
  std::mt19937_64 gen(13);
  const Eigen::MatrixXd q = oracle::random_orthogonal(5, gen);
  Eigen::VectorXd lam(5);
  lam << 5, 4, 3, 2, 1;
  const SymMatrix gram(q * lam.asDiagonal() * q.transpose());
  const auto s = solve(OfflineProblem::from_gram(gram, 3, 1.5, RegularizerKind::ScaleDependent, 1));
  const Eigen::MatrixXd y0 = explicit_output(s);
  const Eigen::MatrixXd g0 = y0.transpose() * y0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd u = oracle::random_orthogonal(3, gen);
    const Eigen::MatrixXd y = explicit_output(s, u);
    EXPECT_LT((y.transpose() * y - g0).norm(), 1e-12);
  }
  const Eigen::VectorXd yy = sym_eigenvalues(SymMatrix(g0));
  EXPECT_NEAR(yy(0), 3.5, 1e-12);
  EXPECT_NEAR(yy(1), 2.5, 1e-12);
  EXPECT_NEAR(yy(2), 1.5, 1e-12);
}

TEST(DiagonalAlignment, IdentityIsOptimal) {
  std::mt19937_64 gen(14);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5;
    Eigen::VectorXd a(n), b(n);
    for (int i = 0; i < n; ++i) a(i) = u(gen), b(i) = u(gen);
    std::sort(a.data(), a.data() + n, std::greater<>());
    std::sort(b.data(), b.data() + n, std::greater<>());
    const double identity = diagonal_alignment(a, b, Eigen::MatrixXd::Identity(n, n));
    EXPECT_NEAR(identity, a.dot(b), 1e-12);
    const Eigen::MatrixXd o = oracle::random_orthogonal(n, gen);
    EXPECT_LE(diagonal_alignment(a, b, o), identity + 1e-10);
  }
}

TEST(RegularizerKind, ParseAndPrint) {
  for (RegularizerKind k : kAllRegularizers) EXPECT_EQ(parse_regularizer(to_string(k)), k);
  EXPECT_EQ(parse_regularizer("squared"), RegularizerKind::SquaredOutput);
  EXPECT_EQ(parse_regularizer("io"), RegularizerKind::InputOutput);
  EXPECT_EQ(parse_regularizer("sd"), RegularizerKind::ScaleDependent);
  EXPECT_THROW(parse_regularizer("bogus"), InvalidInput);
}
