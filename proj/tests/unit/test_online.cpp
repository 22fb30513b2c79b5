#include "relmd/errors.hpp"
#include "relmd/online.hpp"
#include "relmd/problems.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace {

using namespace relmd;

const Geometry kEuclid = Geometry::euclidean();

FeasibleSet interval(double lo, double hi) {
  return FeasibleSet::box(Vector::Constant(1, lo), Vector::Constant(1, hi));
}

SolverConfig online_config(double eps, double theta0_sq) {
  SolverConfig cfg;
  cfg.epsilon = eps;
  cfg.theta0_sq = theta0_sq;
  cfg.dimension = 1;
  return cfg;
}

OnlineStream shifted_abs_stream(std::vector<double> centers) {
  OnlineStream s;
  s.rounds = centers.size();
  s.M = 1.0;
  s.next_objective = [centers](std::size_t round, std::span<const Vector>) {
    return shifted_abs(centers[round]);
  };
  return s;
}

TEST(OnlineAccuracy, FormulaValues) {
  EXPECT_NEAR(online_accuracy(0.1, 0.0, 1.0, 2.0, 100, 50), 0.225, 1e-15);
  EXPECT_NEAR(online_accuracy(0.1, 0.0, 1.0, 2.0, 100, 0), 0.05 + 2.0 / 10.0, 1e-15);
  EXPECT_THROW(online_accuracy(0.0, 0.0, 1.0, 2.0, 100, 0), ConfigError);
}

TEST(OnlineAccuracy, DecreasesInNonproductiveCount) {
  double previous = INFINITY;
  for (std::size_t j = 0; j < 500; j += 7) {
    const double k = online_accuracy(0.1, 0.02, 1.5, 2.0, 100, j);
    EXPECT_LT(k, previous);
    previous = k;
  }
}

TEST(NonproductiveBound, FormulaValue) {
  EXPECT_DOUBLE_EQ(nonproductive_bound(0.1, 0.0, 1.0, 2.0, 100), 500.0);
  EXPECT_DOUBLE_EQ(nonproductive_bound(0.1, 0.05, 1.0, 2.0, 100), 200.0 + 400.0);
}

TEST(SolveOnline, IdenticalObjectivesAndInactiveConstraint) {
  const OnlineStream stream = shifted_abs_stream(std::vector<double>(100, 0.3));
  const ConvexFunction g = affine_function(Vector::Zero(1), -1.0, kEuclid);
  const SolverConfig cfg = online_config(0.1, 2.0);
  const OnlineReport r = solve_online(stream, g, kEuclid, interval(-1, 1), cfg);
  EXPECT_EQ(r.played.size(), 100u);
  EXPECT_EQ(r.nonproductive, 0u);
  EXPECT_DOUBLE_EQ(r.kappa, online_accuracy(0.1, 0.0, 1.0, 2.0, 100, 0));
  // Comparator x = 0.3 is known exactly.
  EXPECT_LE(average_regret(r, 0.0), r.kappa + 1e-9);
  for (const StepRecord& rec : r.ledger.steps) EXPECT_DOUBLE_EQ(rec.step_size, 0.1);
}

TEST(SolveOnline, ExactlyNProductiveStepsAndOneSubgradientEach) {
  std::vector<double> centers;
  for (int i = 0; i < 60; ++i) centers.push_back(std::sin(0.3 * i));
  const OnlineStream stream = shifted_abs_stream(centers);
  const ConvexFunction g = affine_function(Vector::Ones(1), -0.2, kEuclid);
  const OnlineReport r = solve_online(stream, g, kEuclid, interval(-1, 1), online_config(0.1, 0.5));
  EXPECT_EQ(r.played.size(), 60u);
  EXPECT_EQ(r.ledger.productive.size(), 60u);
  EXPECT_EQ(r.ledger.objective_subgradient_calls, 60u);
  EXPECT_EQ(r.ledger.constraint_subgradient_calls, r.nonproductive);
  EXPECT_EQ(r.iterates.size(), r.ledger.total());
  for (std::size_t i = 0; i < r.played.size(); ++i) {
    EXPECT_DOUBLE_EQ(r.round_values[i], std::abs(r.played[i][0] - centers[i]));
    EXPECT_LE(r.round_constraint_values[i], 0.1 + 1e-15);
  }
}

TEST(SolveOnline, AdaptiveAdversarySeesPlayedIterates) {
  OnlineStream stream;
  stream.rounds = 30;
  stream.M = 1.0;
  std::vector<std::size_t> seen;
  stream.next_objective = [&seen](std::size_t round, std::span<const Vector> played) {
    seen.push_back(played.size());
    EXPECT_EQ(played.size(), round);
    return shifted_abs(played.empty() ? 0.5 : -played.back()[0]);
  };
  const ConvexFunction g = affine_function(Vector::Zero(1), -1.0, kEuclid);
  solve_online(stream, g, kEuclid, interval(-1, 1), online_config(0.1, 0.5));
  ASSERT_EQ(seen.size(), 30u);
}

TEST(SolveOnline, RegretBelowKappaWithComparator) {
  std::vector<double> centers;
  for (int i = 0; i < 80; ++i) centers.push_back(0.8 * std::cos(1.7 * i));
  const OnlineStream stream = shifted_abs_stream(centers);
  const ConvexFunction g = affine_function(Vector::Ones(1), -0.2, kEuclid);
  const FeasibleSet q = interval(-1, 1);
  const SolverConfig cfg = online_config(0.1, 0.5);
  const OnlineReport r = solve_online(stream, g, kEuclid, q, cfg);
  const Comparator c = offline_comparator(r, g, kEuclid, q, cfg, cfg.epsilon / 100.0);
  // Independent check of the comparator value.
  const ReferenceSolution ref = reference_optimum(
      [&](const Vector& x) {
        double s = 0.0;
        for (double ci : centers) s += std::abs(x[0] - ci);
        return s / static_cast<double>(centers.size());
      },
      g.value, q, 1, 1e-9);
  EXPECT_NEAR(c.value, ref.f_star, cfg.epsilon / 100.0 + 1e-9);
  EXPECT_LE(average_regret(r, ref.f_star), r.kappa + 1e-9);
  if (average_regret(r, ref.f_star) >= 0.0) {
    EXPECT_LE(static_cast<double>(r.nonproductive),
              nonproductive_bound(cfg.epsilon, cfg.delta, r.M, cfg.theta0_sq, 80));
  }
}

TEST(SolveOnline, MisspecifiedConstantsHitBudget) {
  const OnlineStream stream = shifted_abs_stream(std::vector<double>(5, 0.0));
  // g never satisfied inside Q: every step is non-productive.
  const ConvexFunction g = affine_function(Vector::Zero(1), 1.0, kEuclid);
  EXPECT_THROW(solve_online(stream, g, kEuclid, interval(-1, 1), online_config(0.5, 0.1)),
               BudgetExceeded);
}

TEST(SolveOnline, TraceHasOneLinePerStep) {
  const OnlineStream stream = shifted_abs_stream(std::vector<double>(20, 0.9));
  const ConvexFunction g = affine_function(Vector::Ones(1), -0.2, kEuclid);
  const OnlineReport r = solve_online(stream, g, kEuclid, interval(-1, 1), online_config(0.1, 0.5));
  std::ostringstream os;
  write_online_trace(os, r);
  std::istringstream in(os.str());
  std::string line;
  std::size_t lines = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++lines;
    last = line;
  }
  EXPECT_EQ(lines, r.ledger.total());
  EXPECT_EQ(last.rfind("20,", 0), 0u);
}

}  // namespace
