#include "relmd/errors.hpp"
#include "relmd/problems.hpp"
#include "relmd/solvers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace {

using namespace relmd;

const Geometry kEuclid = Geometry::euclidean();

FeasibleSet interval(double lo, double hi) {
  return FeasibleSet::box(Vector::Constant(1, lo), Vector::Constant(1, hi));
}

ConvexFunction constant(double c) { return affine_function(Vector::Zero(1), c, kEuclid); }

ConvexFunction shifted_line(double slope, double offset) {
  return affine_function(Vector::Constant(1, slope), offset, kEuclid);
}

SolverConfig base_config(double eps, double theta0_sq) {
  SolverConfig cfg;
  cfg.epsilon = eps;
  cfg.theta0_sq = theta0_sq;
  cfg.dimension = 1;
  return cfg;
}

void expect_partition(const StepLedger& ledger) {
  std::vector<std::size_t> all = ledger.productive;
  all.insert(all.end(), ledger.nonproductive.begin(), ledger.nonproductive.end());
  std::sort(all.begin(), all.end());
  ASSERT_EQ(all.size(), ledger.total());
  for (std::size_t k = 0; k < all.size(); ++k) EXPECT_EQ(all[k], k);
  for (std::size_t k = 0; k < ledger.steps.size(); ++k) EXPECT_EQ(ledger.steps[k].index, k);
}

Vector mean_of_productive(const FeasibleSet& set, const SolverConfig& cfg, const ConvexFunction& f,
                          const ConvexFunction& g, const StepLedger& ledger) {
  // Replays the iteration to recover iterates independently of the solver's sum.
  Vector x = cfg.x0 ? *cfg.x0 : argmin_reference(kEuclid, set, 1);
  Vector sum = Vector::Zero(x.size());
  for (const StepRecord& rec : ledger.steps) {
    const bool productive = rec.kind == StepKind::productive;
    if (productive) sum += x;
    const LinearizedModel lin = productive ? f.model.linearize(x) : g.model.linearize(x);
    x = mirror_step(kEuclid, set, x, rec.step_size, lin);
  }
  return sum / static_cast<double>(ledger.productive.size());
}

TEST(ModelGeneral, OneDimensionalInstanceMeetsBounds) {
  const ConvexFunction f = shifted_abs(0.0);
  const ConvexFunction g = shifted_line(1.0, -0.5);
  SolverConfig cfg = base_config(0.1, 0.5);
  cfg.h_f = 0.1;
  cfg.h_g = 0.1;
  const FeasibleSet q = interval(-1, 1);
  const RunReport r = solve_model_general(f, g, kEuclid, q, cfg);
  EXPECT_LE(f.value(r.x_hat) - 0.0, 0.1 + 1e-9);
  EXPECT_LE(g.value(r.x_hat), 0.1 + 1e-9);
  EXPECT_DOUBLE_EQ(r.guarantee.objective_gap, 0.1);
  EXPECT_DOUBLE_EQ(r.guarantee.constraint, 0.1);
  expect_partition(r.ledger);
  EXPECT_TRUE(r.x_hat.isApprox(mean_of_productive(q, cfg, f, g, r.ledger), 1e-14));
}

TEST(ModelGeneral, NeverViolatedConstraintStopsAtPredictedCount) {
  const ConvexFunction f = shifted_abs(0.3);
  const ConvexFunction g = constant(-1.0);
  SolverConfig cfg = base_config(0.1, 0.5);
  cfg.h_f = 0.1;
  cfg.h_g = 0.1;
  const RunReport r = solve_model_general(f, g, kEuclid, FeasibleSet::unit_ball(1), cfg);
  const double gain = 0.1 * 0.1 - 0.1 * 0.1 * 1.0 / 2.0;
  std::size_t expected = 0;
  while (!(0.5 <= static_cast<double>(expected) * gain)) ++expected;
  EXPECT_TRUE(r.ledger.nonproductive.empty());
  EXPECT_EQ(r.ledger.productive.size(), expected);
  EXPECT_EQ(r.iterations, expected);
}

TEST(ModelGeneral, UnreachableStoppingRuleHitsBudget) {
  const ConvexFunction f = shifted_abs(0.3);
  const ConvexFunction g = shifted_line(1.0, -0.5);
  SolverConfig cfg = base_config(0.1, 0.5);
  cfg.h_f = 0.2;  // eps h = phi^*(h) = 0.02
  cfg.h_g = 0.2;
  cfg.max_iterations = 500;
  try {
    solve_model_general(f, g, kEuclid, interval(-1, 1), cfg);
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.ledger().total(), 500u);
  }
}

TEST(ModelGeneral, RequiresStepSizes) {
  const SolverConfig cfg = base_config(0.1, 0.5);
  EXPECT_THROW(solve_model_general(shifted_abs(0), constant(-1), kEuclid, interval(-1, 1), cfg),
               ConfigError);
}

TEST(RelativeV1, IterationCountMatchesFormula) {
  EXPECT_EQ(relative_v1_iterations(2.0, 0.5), 16u);
  EXPECT_EQ(relative_v1_iterations(2.0, 1.0 / 32.0), 4096u);
  const ConvexFunction f = shifted_abs(0.3);
  const ConvexFunction g = shifted_line(1.0, -0.5);
  std::size_t previous = 0;
  for (double eps : {0.5, 0.25, 0.125, 0.0625, 0.03125}) {
    const RunReport r = solve_relative_v1(f, g, kEuclid, interval(-1, 1), base_config(eps, 2.0));
    EXPECT_EQ(r.iterations, static_cast<std::size_t>(std::ceil(2.0 * 2.0 / (eps * eps))));
    if (previous) EXPECT_EQ(r.iterations, 4 * previous);
    previous = r.iterations;
    expect_partition(r.ledger);
  }
}

TEST(RelativeV1, GuaranteeUsesConstants) {
  SolverConfig cfg = base_config(0.1, 0.5);
  cfg.M_f = 2.0;
  cfg.M_g = 3.0;
  cfg.delta = 0.01;
  const ConvexFunction f = affine_function(Vector::Constant(1, 2.0), 0.0, kEuclid);
  const ConvexFunction g = affine_function(Vector::Constant(1, 3.0), -0.5, kEuclid);
  const RunReport r = solve_relative_v1(f, g, kEuclid, interval(-1, 1), cfg);
  EXPECT_DOUBLE_EQ(r.guarantee.objective_gap, 2.0 * 0.1 + 0.01);
  EXPECT_DOUBLE_EQ(r.guarantee.constraint, 3.0 * 0.1 + 0.01);
  for (const StepRecord& rec : r.ledger.steps) {
    EXPECT_DOUBLE_EQ(rec.step_size, rec.kind == StepKind::productive ? 0.1 / 2.0 : 0.1 / 3.0);
  }
}

TEST(RelativeV2, EqualConstantsGiveClassicCount) {
  const RunReport r = solve_relative_v2(shifted_abs(0.3), shifted_line(1.0, -0.5), kEuclid,
                                        interval(-1, 1), base_config(0.5, 2.0));
  EXPECT_EQ(r.iterations, 16u);
}

TEST(RelativeV2, AllProductiveStopsAtWeightedCount) {
  SolverConfig cfg = base_config(0.5, 2.0);
  cfg.M_g = 2.0;
  const RunReport r = solve_relative_v2(shifted_abs(0.3), constant(-1.0), kEuclid,
                                        interval(-1, 1), cfg);
  EXPECT_EQ(r.ledger.productive.size(), 16u);
  EXPECT_TRUE(r.ledger.nonproductive.empty());
  EXPECT_LE(r.iterations, relative_v2_iteration_bound(2.0, 0.5, 2.0));
}

TEST(RelativeV2, AllNonproductiveRaisesAfterWeightedCount) {
  SolverConfig cfg = base_config(0.5, 2.0);
  cfg.M_g = 2.0;
  try {
    solve_relative_v2(shifted_abs(0.3), constant(1.0), kEuclid, interval(-1, 1), cfg);
    FAIL() << "expected NoProductiveSteps";
  } catch (const NoProductiveSteps& e) {
    EXPECT_EQ(e.ledger().nonproductive.size(), 64u);
    EXPECT_TRUE(e.ledger().productive.empty());
  }
}

TEST(RelativeV2, BoundFormula) {
  EXPECT_EQ(relative_v2_iteration_bound(2.0, 0.5, 1.0), 16u);
  EXPECT_EQ(relative_v2_iteration_bound(2.0, 0.5, 2.0), 64u);
}

TEST(Multi, SingleConstraintMatchesSingleSolver) {
  const ConvexFunction f = shifted_abs(0.3);
  const ConvexFunction g = shifted_line(1.0, -0.1);
  const ConvexFunction gs[] = {g};
  const FeasibleSet q = interval(-1, 1);
  for (double eps : {0.5, 0.1}) {
    SolverConfig cfg = base_config(eps, 0.5);
    const RunReport a = solve_relative_v1(f, g, kEuclid, q, cfg);
    const RunReport b = solve_multi_v1(f, gs, kEuclid, q, cfg);
    EXPECT_EQ(a.x_hat, b.x_hat);
    EXPECT_EQ(a.ledger.productive, b.ledger.productive);
    const RunReport c = solve_relative_v2(f, g, kEuclid, q, cfg);
    const RunReport d = solve_multi_v2(f, gs, kEuclid, q, cfg);
    EXPECT_EQ(c.x_hat, d.x_hat);
    EXPECT_EQ(c.ledger.nonproductive, d.ledger.nonproductive);
  }
}

TEST(Multi, OnlyViolatedConstraintDrivesStep) {
  const ConvexFunction f = shifted_abs(0.9);
  std::vector<ConvexFunction> gs = {constant(-1.0), shifted_line(3.0, -1.5)};
  SolverConfig cfg = base_config(0.1, 0.5);
  cfg.M_g_pieces = {1.0, 3.0};
  cfg.M_g = 3.0;
  const RunReport r = solve_multi_v1(f, gs, kEuclid, interval(0, 1), cfg);
  ASSERT_FALSE(r.ledger.nonproductive.empty());
  for (std::size_t k : r.ledger.nonproductive) {
    EXPECT_EQ(r.ledger.steps[k].constraint_index, 1);
    EXPECT_DOUBLE_EQ(r.ledger.steps[k].step_size, 0.1 / 3.0);
  }
  EXPECT_EQ(r.ledger.constraint_subgradient_calls, r.ledger.nonproductive.size());
}

TEST(Multi, OneDimensionalBoundV1) {
  const ConvexFunction f = shifted_abs(0.9);
  const std::vector<ConvexFunction> gs = {shifted_line(1.0, -0.95), shifted_line(2.0, -1.9)};
  SolverConfig cfg = base_config(0.05, 0.5);
  cfg.M_g_pieces = {1.0, 2.0};
  cfg.M_g = 2.0;
  const FeasibleSet q = interval(0, 1);
  const RunReport r = solve_multi_v1(f, gs, kEuclid, q, cfg);
  const double g = std::max(gs[0].value(r.x_hat), gs[1].value(r.x_hat));
  EXPECT_LE(g, 2.0 * 0.05 + 1e-9);
  EXPECT_LE(f.value(r.x_hat) - 0.0, r.guarantee.objective_gap + 1e-9);
  EXPECT_TRUE(q.contains(r.x_hat, 1e-12));

  const RunReport v2 = solve_multi_v2(f, gs, kEuclid, q, cfg);
  EXPECT_LE(std::max(gs[0].value(v2.x_hat), gs[1].value(v2.x_hat)), 0.05 + 1e-9);
  EXPECT_LE(f.value(v2.x_hat), 0.05 + 1e-9);
}

TEST(Multi, EqualConstantsReduceToSingleV2) {
  const ConvexFunction f = shifted_abs(0.9);
  const ConvexFunction g = shifted_line(2.0, -1.0);
  const std::vector<ConvexFunction> gs = {g, g, g};
  SolverConfig cfg = base_config(0.1, 0.5);
  cfg.M_g = 2.0;
  cfg.M_g_pieces = {2.0, 2.0, 2.0};
  const RunReport a = solve_multi_v2(f, gs, kEuclid, interval(0, 1), cfg);
  const RunReport b = solve_relative_v2(f, g, kEuclid, interval(0, 1), cfg);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.x_hat, b.x_hat);
}

TEST(Multi, PiecesDefaultToModelConstants) {
  const ConvexFunction f = shifted_abs(0.9);
  const std::vector<ConvexFunction> gs = {shifted_line(1.0, -0.95), shifted_line(2.0, -1.9)};
  SolverConfig implicit = base_config(0.1, 0.5);
  implicit.M_g = 2.0;
  SolverConfig explicit_cfg = implicit;
  explicit_cfg.M_g_pieces = {1.0, 2.0};
  const RunReport a = solve_multi_v2(f, gs, kEuclid, interval(0, 1), implicit);
  const RunReport b = solve_multi_v2(f, gs, kEuclid, interval(0, 1), explicit_cfg);
  EXPECT_EQ(a.x_hat, b.x_hat);
}

TEST(LemmaAudit, NoViolationsWithOptimumAsReference) {
  const ConvexFunction f = shifted_abs(0.0);
  const ConvexFunction g = shifted_line(1.0, -0.5);
  SolverConfig cfg = base_config(0.05, 0.5);
  cfg.reference_point = Vector::Zero(1);
  for (const RunReport& r : {solve_relative_v1(f, g, kEuclid, interval(-1, 1), cfg),
                             solve_relative_v2(f, g, kEuclid, interval(-1, 1), cfg)}) {
    EXPECT_EQ(r.lemma.checked, r.iterations);
    EXPECT_EQ(r.lemma.violations, 0u);
    EXPECT_GE(r.lemma.worst_slack, -1e-9);
    for (const StepRecord& rec : r.ledger.steps) EXPECT_TRUE(rec.divergence_to_reference);
  }
}

TEST(FTS, GuaranteedBoundsOnSmallInstance) {
  const FTSInstance inst = generate_fts(2, 5, 3, 17);
  const FeasibleSet ball = FeasibleSet::unit_ball(2);
  const ConvexFunction f = fts_function(inst);
  const ConvexFunction g = max_linear_function(inst, kEuclid);
  const ReferenceSolution ref = reference_optimum(inst, ball, 1e-7);
  SolverConfig cfg;
  cfg.epsilon = 0.05;
  cfg.M_f = 1.0;
  cfg.M_g = max_row_dual_norm(inst, kEuclid);
  cfg.theta0_sq = 0.5;
  cfg.record_objective = true;

  const RunReport v1 = solve_relative_v1(f, g, kEuclid, ball, cfg);
  EXPECT_LE(f.value(v1.x_hat) - ref.f_star, cfg.M_f * cfg.epsilon + 1e-9);
  EXPECT_LE(g.value(v1.x_hat), cfg.M_g * cfg.epsilon + 1e-9);
  EXPECT_TRUE(ball.contains(v1.x_hat, 1e-12));

  const RunReport v2 = solve_relative_v2(f, g, kEuclid, ball, cfg);
  EXPECT_LE(f.value(v2.x_hat) - ref.f_star, cfg.epsilon + 1e-9);
  EXPECT_LE(g.value(v2.x_hat), cfg.epsilon + 1e-9);
  EXPECT_LE(v2.iterations,
            relative_v2_iteration_bound(cfg.theta0_sq, cfg.epsilon, std::max(cfg.M_f, cfg.M_g)));
  for (std::size_t k : v2.ledger.productive) EXPECT_TRUE(v2.ledger.steps[k].objective_value);
  for (std::size_t k : v2.ledger.nonproductive) EXPECT_FALSE(v2.ledger.steps[k].objective_value);
}

TEST(Solvers, DeterministicAcrossRuns) {
  const FTSInstance inst = generate_fts(10, 5, 4, 3);
  const FeasibleSet ball = FeasibleSet::unit_ball(10);
  const ConvexFunction f = fts_function(inst);
  const ConvexFunction g = max_linear_function(inst, kEuclid);
  SolverConfig cfg;
  cfg.epsilon = 0.2;
  cfg.M_g = max_row_dual_norm(inst, kEuclid);
  cfg.theta0_sq = 0.5;
  const RunReport a = solve_relative_v2(f, g, kEuclid, ball, cfg);
  const RunReport b = solve_relative_v2(f, g, kEuclid, ball, cfg);
  EXPECT_EQ(a.x_hat, b.x_hat);
  EXPECT_EQ(a.ledger.productive, b.ledger.productive);
  EXPECT_EQ(a.ledger.nonproductive, b.ledger.nonproductive);
}

TEST(Solvers, EntropyGeometryOnSimplex) {
  const Geometry ent = Geometry::entropy();
  const FeasibleSet simplex = FeasibleSet::simplex(3);
  Vector target(3);
  target << 0.6, 0.3, 0.1;
  ConvexFunction f;
  f.value = [target](const Vector& x) { return (x - target).lpNorm<1>(); };
  f.model = linear_model(
      [target](const Vector& x) { return Vector((x - target).array().sign().matrix()); }, 1.0);
  Vector a(3);
  a << 1.0, 0.0, 0.0;
  const ConvexFunction g = affine_function(a, -0.5, ent);
  SolverConfig cfg;
  cfg.epsilon = 0.05;
  cfg.theta0_sq = std::log(3.0);
  const RunReport r = solve_relative_v2(f, g, ent, simplex, cfg);
  EXPECT_TRUE(simplex.contains(r.x_hat, 1e-12));
  EXPECT_LE(g.value(r.x_hat), 0.05 + 1e-9);
  // f* = 0.2 at (0.5, 0.3 + t, 0.2 - t) family; any point with x_0 = 0.5 and x_2 <= 0.1.
  EXPECT_LE(f.value(r.x_hat) - 0.2, 0.05 + 1e-9);
}

TEST(Solvers, ConfigValidation) {
  const ConvexFunction f = shifted_abs(0);
  const ConvexFunction g = constant(-1);
  const FeasibleSet q = interval(-1, 1);
  SolverConfig cfg = base_config(0.0, 1.0);
  EXPECT_THROW(solve_relative_v1(f, g, kEuclid, q, cfg), ConfigError);
  cfg = base_config(0.1, 0.0);
  EXPECT_THROW(solve_relative_v2(f, g, kEuclid, q, cfg), ConfigError);
  cfg = base_config(0.1, 1.0);
  cfg.M_f = -1.0;
  EXPECT_THROW(solve_relative_v2(f, g, kEuclid, q, cfg), ConfigError);
  cfg = base_config(0.1, 1.0);
  cfg.x0 = Vector::Constant(1, 5.0);
  EXPECT_THROW(solve_relative_v2(f, g, kEuclid, q, cfg), ConfigError);
  cfg = base_config(0.1, 1.0);
  cfg.dimension = -1;
  EXPECT_THROW(solve_relative_v2(f, g, kEuclid, FeasibleSet::whole_space(), cfg), ConfigError);
}

TEST(Trace, OneLinePerStep) {
  const RunReport r = solve_relative_v1(shifted_abs(0.3), shifted_line(1.0, -0.1), kEuclid,
                                        interval(-1, 1), base_config(0.25, 2.0));
  std::ostringstream os;
  write_trace(os, r.ledger);
  std::istringstream in(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    EXPECT_TRUE(line.find(",P,") != std::string::npos || line.find(",N,") != std::string::npos);
  }
  EXPECT_EQ(lines, r.iterations);
}

}  // namespace
