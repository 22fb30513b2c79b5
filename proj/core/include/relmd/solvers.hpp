#pragma once

#include "relmd/errors.hpp"
#include "relmd/geometry.hpp"
#include "relmd/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace relmd {

enum class StepKind { productive, nonproductive };

struct StepRecord {
  std::size_t index = 0;
  StepKind kind = StepKind::productive;
  double step_size = 0.0;
  /// g(x^k), the value the productivity test used.
  double constraint_value = 0.0;
  /// f(x^k); only filled on productive steps when SolverConfig::record_objective is set.
  std::optional<double> objective_value;
  /// Constraint whose model drove a non-productive step (multi-constraint
  /// solvers), otherwise -1.
  int constraint_index = -1;
  /// V_d(reference, x^k) when SolverConfig::reference_point is set.
  std::optional<double> divergence_to_reference;
};

/// Partition of the iteration indices into productive (I) and
/// non-productive (J) steps, plus oracle-call accounting.
struct StepLedger {
  std::vector<std::size_t> productive;
  std::vector<std::size_t> nonproductive;
  std::vector<StepRecord> steps;
  std::size_t objective_subgradient_calls = 0;
  std::size_t constraint_subgradient_calls = 0;

  std::size_t total() const noexcept { return steps.size(); }
};

/// The bounds promised by the theorem matching the solver that ran.
struct Guarantee {
  double objective_gap = 0.0;
  double constraint = 0.0;
};

/// Outcome of the per-step Main Lemma check (only run with a reference point):
///   h (v(x) - v(y)) <= phi^*(h) + V_d(y, x) - V_d(y, x+) + h delta.
struct LemmaAudit {
  std::size_t checked = 0;
  std::size_t violations = 0;
  /// min over steps of (rhs - lhs); negative means a violation.
  double worst_slack = 0.0;
};

struct RunReport {
  /// Uniform average of the productive iterates.
  Vector x_hat;
  StepLedger ledger;
  std::size_t iterations = 0;
  Guarantee guarantee;
  double wall_time_seconds = 0.0;
  LemmaAudit lemma;
};

struct SolverConfig {
  double epsilon = 0.0;
  double delta = 0.0;
  double M_f = 1.0;
  double M_g = 1.0;
  /// Per-constraint constants for the multi-constraint solvers; taken from
  /// each constraint's quadratic phi when empty.
  std::vector<double> M_g_pieces;
  /// Upper bound on d(x*).
  double theta0_sq = 0.0;
  /// Safety cap; defaults to 10 * ceil(2 M^2 theta0_sq / epsilon^2), M = max of all constants.
  std::optional<std::size_t> max_iterations;
  /// Starting point; argmin of d over Q when unset.
  std::optional<Vector> x0;
  /// Needed only when neither x0 nor the feasible set fixes the dimension.
  Eigen::Index dimension = -1;
  /// Fixed step sizes for the model-general and stochastic solvers.
  std::optional<double> h_f;
  std::optional<double> h_g;
  bool record_objective = false;
  /// Enables the per-step Main Lemma audit and V_d-to-reference tracing.
  std::optional<Vector> reference_point;
};

/// Base for solver failures that still have a meaningful ledger.
class RunError : public Error {
 public:
  RunError(const std::string& what, StepLedger ledger)
      : Error(what), ledger_(std::make_shared<const StepLedger>(std::move(ledger))) {}

  const StepLedger& ledger() const noexcept { return *ledger_; }

 private:
  std::shared_ptr<const StepLedger> ledger_;
};

/// The stopping rule fired before any productive step; x_hat is undefined.
class NoProductiveSteps : public RunError {
 public:
  using RunError::RunError;
};

/// max_iterations reached before the stopping rule fired.
class BudgetExceeded : public RunError {
 public:
  using RunError::RunError;
};

/// ceil(2 theta0_sq / eps^2), the exact step count of the version-1 schemes.
std::size_t relative_v1_iterations(double theta0_sq, double epsilon);

/// ceil(2 M^2 theta0_sq / eps^2), the step bound of the version-2 schemes.
std::size_t relative_v2_iteration_bound(double theta0_sq, double epsilon, double lipschitz);

/// Model-general switching scheme with caller-supplied h_f, h_g.
/// Productive iff g(x) <= eps + delta; stops once
///   theta0_sq <= eps (|J| h_g + |I| h_f) - |J| phi_g^*(h_g) - |I| phi_f^*(h_f).
RunReport solve_model_general(const ConvexFunction& f, const ConvexFunction& g,
                              const Geometry& geom, const FeasibleSet& set,
                              const SolverConfig& cfg);

/// Relative-Lipschitz version 1: h_f = eps / M_f, h_g = eps / M_g,
/// productive iff g(x) <= M_g eps + delta, exactly ceil(2 theta0_sq / eps^2)
/// iterations.
RunReport solve_relative_v1(const ConvexFunction& f, const ConvexFunction& g,
                            const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg);

/// Relative-Lipschitz version 2: h_f = eps / M_f^2, h_g = eps / M_g^2,
/// productive iff g(x) <= eps + delta, stops once
///   2 theta0_sq / eps^2 <= |I| / M_f^2 + |J| / M_g^2.
RunReport solve_relative_v2(const ConvexFunction& f, const ConvexFunction& g,
                            const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg);

/// Version 1 with constraints g_1..g_m and g = max_p g_p. A non-productive
/// step linearises only the lowest-index violated constraint, with step
/// eps / M_{g_p}. The productivity threshold uses M_g = max_p M_{g_p}.
RunReport solve_multi_v1(const ConvexFunction& f, std::span<const ConvexFunction> constraints,
                         const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg);

/// Version 2 with several constraints: steps eps / M_{g_p}^2 and stopping rule
///   2 theta0_sq / eps^2 <= |I| / M_f^2 + sum_{k in J} 1 / M_{g_p(k)}^2.
RunReport solve_multi_v2(const ConvexFunction& f, std::span<const ConvexFunction> constraints,
                         const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg);

/// One line per step: `k,P|N,h,g` plus `,V` when the divergence to a
/// reference point was recorded.
void write_trace(std::ostream& os, const StepLedger& ledger);

}  // namespace relmd
