#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "nsbf/oracle.hpp"
#include "nsbf/pipeline.hpp"
#include "nsbf/spectrum.hpp"
#include "support.hpp"

using namespace nsbf;

namespace {

constexpr double kPi = std::numbers::pi;

Problem make(double ell, Potential q) {
  Problem p;
  p.ell = ell;
  p.q = std::move(q);
  return p;
}

const Pipeline& example1() {
  static const Pipeline p = build_pipeline(make(1.5, Potential::ex1()));
  return p;
}

Spectrum scan(const Pipeline& p, const BoundaryCondition& bc, double omega_max, std::size_t count = 0) {
  ScanOptions opt;
  opt.omega_max = omega_max;
  opt.count = count;
  return find_eigenvalues(p.coefficients, bc, p.n1, p.n2, opt);
}

}  // namespace

TEST(Characteristic, FreeDirichletIsSine) {
  const Pipeline p = build_pipeline(make(0.0, Potential::zero()));
  const SeriesEvaluator ev = p.evaluator_at_b();
  for (double w = 0.1; w < 50.0; w += 0.37) {
    EXPECT_NEAR(characteristic(ev, BoundaryCondition::dirichlet(), w), std::sin(w * kPi), 1e-12);
  }
}

TEST(Characteristic, QuadraticPotentialSignChange) {
  const SeriesEvaluator ev = example1().evaluator_at_b();
  const auto bc = BoundaryCondition::dirichlet();
  EXPECT_LT(characteristic(ev, bc, 2.4) * characteristic(ev, bc, 2.5), 0.0);
}

TEST(Characteristic, RobinCombination) {
  const SeriesEvaluator ev = example1().evaluator_at_b();
  const auto s = ev(3.3);
  EXPECT_DOUBLE_EQ(characteristic(ev, BoundaryCondition::robin(2.0, -0.5), 3.3), 2.0 * s.u - 0.5 * s.du);
  EXPECT_DOUBLE_EQ(characteristic(ev, BoundaryCondition::neumann(), 3.3), s.du);
  EXPECT_THROW(BoundaryCondition::robin(0.0, 0.0), ConfigError);
}

TEST(FindEigenvalues, FreeDirichletIntegers) {
  const Pipeline p = build_pipeline(make(0.0, Potential::zero()));
  const Spectrum sp = scan(p, BoundaryCondition::dirichlet(), 10.5);
  ASSERT_EQ(sp.eigenvalues.size(), 10u);
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(sp.eigenvalues[static_cast<std::size_t>(k)], k + 1.0, 1e-12);
}

TEST(FindEigenvalues, FreeDirichletOrderOne) {
  const Pipeline p = build_pipeline(make(1.0, Potential::zero()));
  const Spectrum sp = scan(p, BoundaryCondition::dirichlet(), 30.0);
  ASSERT_GE(sp.eigenvalues.size(), 25u);
  for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k) {
    EXPECT_NEAR(sp.eigenvalues[k], nsbf::testing::tan_root(static_cast<int>(k) + 1) / kPi, 1e-12) << k;
  }
  EXPECT_NEAR(sp.eigenvalues[0] * kPi, 4.493409457909064, 1e-12);
}

TEST(FindEigenvalues, QuadraticPotentialTable) {
  const Spectrum sp = scan(example1(), BoundaryCondition::dirichlet(), 101.0);
  ASSERT_EQ(sp.eigenvalues.size(), 100u);
  const std::vector<std::pair<int, double>> table{{1, 2.46294997397397},  {2, 3.28835292994256},
                                                  {3, 4.14986421874478},  {5, 6.00758145811600},
                                                  {7, 7.93973737689930},  {10, 10.8861250916173},
                                                  {20, 20.8202301908124}, {50, 50.7786768095149},
                                                  {100, 100.764442245651}};
  for (const auto& [n, w] : table) EXPECT_NEAR(sp.eigenvalues[static_cast<std::size_t>(n) - 1], w, 1e-12) << n;
}

TEST(FindEigenvalues, ResidualsAndSpacing) {
  const Spectrum sp = scan(example1(), BoundaryCondition::dirichlet(), 101.0);
  const double b = example1().problem.b;
  for (double r : sp.residuals) EXPECT_LE(r, 1e-9);
  for (std::size_t k = 1; k < sp.eigenvalues.size(); ++k) {
    const double gap = sp.eigenvalues[k] - sp.eigenvalues[k - 1];
    EXPECT_GE(gap, 0.5 * kPi / b);
    EXPECT_LE(gap, 2.0 * kPi / b);
  }
  EXPECT_TRUE(sp.warnings.empty());
  EXPECT_GT(sp.evaluations, 800);
}

TEST(FindEigenvalues, NeumannAgainstOracle) {
  const Problem prob = make(1.5, Potential::ex1());
  const Pipeline p = build_pipeline(prob);
  const Spectrum sp = scan(p, BoundaryCondition::neumann(), std::numeric_limits<double>::infinity(), 50);
  ASSERT_EQ(sp.eigenvalues.size(), 50u);
  const auto ref = oracle_eigenvalues(prob, BoundaryCondition::neumann(), sp.eigenvalues.back() + 0.1,
                                      kPi / (8 * prob.b), 1e-13);
  ASSERT_EQ(ref.size(), 50u);
  for (std::size_t k = 0; k < 50; ++k) EXPECT_NEAR(sp.eigenvalues[k], ref[k], 1e-9) << k + 1;
}

TEST(FindEigenvalues, RobinMatchesOracle) {
  const Problem prob = make(0.5, Potential::power(1.0, 1.0));
  const Pipeline p = build_pipeline(prob);
  const auto bc = BoundaryCondition::robin(1.0, 0.5);
  const Spectrum sp = scan(p, bc, 30.0);
  const auto ref = oracle_eigenvalues(prob, bc, 30.0, 1.0 / 8.0, 1e-13);
  ASSERT_EQ(sp.eigenvalues.size(), ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(sp.eigenvalues[k], ref[k], 1e-8) << k + 1;
}

TEST(FindEigenvalues, KinkedPotentialCountMatchesOracle) {
  // q' jumps at pi/2; truncation limits the higher eigenvalues, the low ones stay sharp.
  const Problem prob = make(0.5, Potential::qm(1));
  const Pipeline p = build_pipeline(prob);
  const auto bc = BoundaryCondition::robin(1.0, 0.5);
  const Spectrum sp = scan(p, bc, 30.0);
  const auto ref = oracle_eigenvalues(prob, bc, 30.0, 1.0 / 8.0, 1e-13);
  ASSERT_EQ(sp.eigenvalues.size(), ref.size());
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(sp.eigenvalues[k], ref[k], 1e-9) << k + 1;
}

TEST(FindEigenvalues, CoarseStepWarns) {
  const Pipeline p = build_pipeline(make(0.0, Potential::zero()));
  ScanOptions opt;
  opt.omega_max = 5.0;
  opt.step = 0.4;
  const Spectrum sp = find_eigenvalues(p.coefficients, BoundaryCondition::dirichlet(), p.n1, p.n2, opt);
  EXPECT_FALSE(sp.warnings.empty());
}

TEST(FindEigenvalues, StrictlyIncreasingWithoutDuplicates) {
  const Pipeline p = build_pipeline(make(2.0, Potential::qm(4)));
  const Spectrum sp = scan(p, BoundaryCondition::dirichlet(), 60.0);
  for (std::size_t k = 1; k < sp.eigenvalues.size(); ++k) {
    EXPECT_GT(sp.eigenvalues[k] - sp.eigenvalues[k - 1], sp.step / 2);
  }
}

TEST(FindEigenvalues, RejectsBadOptions) {
  const Pipeline p = build_pipeline(make(0.0, Potential::zero()));
  ScanOptions opt;
  EXPECT_THROW(find_eigenvalues(p.coefficients, BoundaryCondition::dirichlet(), p.n1, p.n2, opt), ConfigError);
  opt.omega_max = 5.0;
  opt.omega_min = 0.0;
  EXPECT_THROW(find_eigenvalues(p.coefficients, BoundaryCondition::dirichlet(), p.n1, p.n2, opt), ConfigError);
  opt.omega_min = 1e-3;
  EXPECT_THROW(find_eigenvalues(p.coefficients, BoundaryCondition::neumann(), p.n1, -1, opt), ConfigError);
}
