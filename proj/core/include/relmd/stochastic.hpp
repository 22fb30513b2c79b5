#pragma once

#include "relmd/geometry.hpp"
#include "relmd/model.hpp"
#include "relmd/random.hpp"
#include "relmd/solvers.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace relmd {

/// First-order unbiased oracle: E[sample_subgradient(x, .)] is a subgradient
/// at x, and <sample, x - y> <= M sqrt(2 V_d(y, x)) for every draw.
struct StochasticOracle {
  std::function<Vector(const Vector& x, KeyedStream& rng)> sample_subgradient;
  /// Exact function value; the productivity test never samples.
  ScalarFunction exact_value;
  double M = 1.0;
  std::uint64_t seed = 0;
};

/// Exact subgradient plus amplitude * sigma / |sigma|_*, sigma a Rademacher
/// vector. The perturbation has mean zero and dual norm `amplitude`, so the
/// oracle's constant is exact_lipschitz + amplitude. amplitude = 0 returns the
/// exact subgradient untouched.
StochasticOracle rademacher_noise_oracle(ScalarFunction value, SubgradientOracle exact,
                                         double exact_lipschitz, double amplitude,
                                         const Geometry& geom, std::uint64_t seed = 0);

/// Stochastic switching scheme with caller-supplied h_f, h_g and the
/// model-general stopping rule (phi^*(h) = h^2 M^2 / 2 from each oracle).
/// Productive steps draw from stream (seed, trial, k, 0), non-productive
/// steps from (seed, trial, k, 1).
RunReport solve_stochastic(const StochasticOracle& f, const StochasticOracle& g,
                           const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg,
                           std::uint64_t trial = 0);

struct StochasticProblem {
  StochasticOracle objective;
  StochasticOracle constraint;
  Geometry geometry = Geometry::euclidean();
  FeasibleSet set = FeasibleSet::whole_space();
  /// Reference optimal value f*.
  double f_star = 0.0;
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::size_t productive = 0;
  std::size_t nonproductive = 0;
  double f_value = 0.0;
  double g_value = 0.0;
  double wall_time_seconds = 0.0;
  /// Set when the trial failed (e.g. NoProductiveSteps); values are then NaN.
  std::optional<std::string> error;
};

struct ExpectedGapEstimate {
  /// Monte-Carlo estimate of E[f(x_hat)] - f* over successful trials.
  double mean_gap = 0.0;
  double standard_error = 0.0;
  /// g(x_hat) per successful trial.
  std::vector<double> constraint_values;
  std::vector<TrialResult> trials;
  std::size_t failures = 0;
};

/// Runs `trials` independent trials (trial index t uses the stream key
/// (seed, t, step, oracle)) and summarises f(x_hat) - f*. Failed trials are
/// listed in the result with their error; ConfigError if trials < 2 or fewer
/// than two trials succeed.
ExpectedGapEstimate estimate_expected_gap(const StochasticProblem& problem,
                                          const SolverConfig& cfg, std::size_t trials,
                                          std::uint64_t seed, unsigned workers = 1);

/// CSV with header `trial,seed,N,I,J,f,g`.
void write_trials_csv(std::ostream& os, std::span<const TrialResult> trials);

}  // namespace relmd
