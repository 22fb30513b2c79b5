#pragma once

// Shared loop behind every switching scheme: productivity test on
// g = max_p g_p, Mirror step on f or on the lowest-index violated g_p,
// post-iteration stopping test, uniform averaging of productive iterates.

#include "relmd/solvers.hpp"

#include <functional>
#include <span>
#include <vector>

namespace relmd::detail {

struct StepCounts {
  std::size_t productive = 0;
  std::size_t nonproductive = 0;
  /// Non-productive steps per constraint.
  const std::vector<std::size_t>* per_constraint = nullptr;
};

struct SwitchingRule {
  double threshold = 0.0;
  double objective_step = 0.0;
  std::vector<double> constraint_steps;
  std::function<bool(const StepCounts&)> stop;
  Guarantee guarantee;
  std::size_t max_iterations = 0;
  /// Overrides f.model.linearize (stochastic oracles); receives the step index.
  std::function<LinearizedModel(const Vector&, std::size_t)> linearize_objective;
  std::function<LinearizedModel(std::size_t, const Vector&, std::size_t)> linearize_constraint;
};

Vector starting_point(const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg);

/// 10 * ceil(2 M^2 theta0_sq / eps^2) unless cfg.max_iterations is set.
std::size_t iteration_cap(const SolverConfig& cfg, double lipschitz);

void validate(const SolverConfig& cfg);

RunReport run_switching(const ConvexFunction& f, std::span<const ConvexFunction> constraints,
                        const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg,
                        const SwitchingRule& rule);

}  // namespace relmd::detail
