#pragma once

#include "relmd/geometry.hpp"
#include "relmd/model.hpp"
#include "relmd/solvers.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace relmd {

/// A sequence of N objectives revealed one per productive step. The
/// objective for round i may depend on every iterate played so far.
struct OnlineStream {
  std::function<ConvexFunction(std::size_t round, std::span<const Vector> played)> next_objective;
  std::size_t rounds = 0;
  /// max_i M_i over the stream.
  double M = 1.0;
};

struct OnlineReport {
  /// x^k at the k-th productive step; the iterate at which f_i was evaluated.
  std::vector<Vector> played;
  /// f_i(played[i]).
  std::vector<double> round_values;
  /// g(played[i]).
  std::vector<double> round_constraint_values;
  /// The objectives as revealed, kept for the offline comparator.
  std::vector<ConvexFunction> objectives;
  std::size_t nonproductive = 0;
  /// max{M_i, M_g}, the constant behind h = eps / M^2.
  double M = 0.0;
  double kappa = 0.0;
  StepLedger ledger;
  /// x^k for every step k, parallel to ledger.steps.
  std::vector<Vector> iterates;
  double wall_time_seconds = 0.0;
};

/// kappa = (|J| / N)(-eps / 2) + eps / 2 + delta + M^2 theta0_sq / (N eps).
double online_accuracy(double epsilon, double delta, double M, double theta0_sq, std::size_t N,
                       std::size_t nonproductive);

/// N (1 + 2 delta / eps) + 2 M^2 theta0_sq / eps^2; valid whenever the realised
/// regret is nonnegative.
double nonproductive_bound(double epsilon, double delta, double M, double theta0_sq,
                           std::size_t N);

/// Online switching scheme with one step size h = eps / M^2, M = max{stream.M, cfg.M_g}.
/// Runs until exactly N productive steps. Throws BudgetExceeded once |J|
/// passes 2 * nonproductive_bound + 100, which means M or theta0_sq was
/// misspecified.
OnlineReport solve_online(const OnlineStream& stream, const ConvexFunction& g,
                          const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg);

struct Comparator {
  Vector x;
  /// (1/N) sum_i f_i(x).
  double value = 0.0;
};

/// min of the average revealed objective over {x in Q : g(x) <= 0}, solved by
/// the version-2 scheme at accuracy `accuracy`. Objectives must have plain
/// linear models (no composite term).
Comparator offline_comparator(const OnlineReport& report, const ConvexFunction& g,
                              const Geometry& geom, const FeasibleSet& set,
                              const SolverConfig& cfg, double accuracy);

/// (1/N) sum_i f_i(x^{k_i}) - comparator_value.
double average_regret(const OnlineReport& report, double comparator_value);

/// One line per step: `round,kind,g,f,J,x_1 x_2 ...` where round counts
/// productive steps taken so far and f is empty on non-productive steps.
void write_online_trace(std::ostream& os, const OnlineReport& report);

}  // namespace relmd
