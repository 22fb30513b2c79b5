#pragma once

#include "relmd/geometry.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace relmd {

/// Returns a (stochastic or exact) subgradient at x.
using SubgradientOracle = std::function<Vector(const Vector&)>;

/// A strictly increasing phi with phi(0) = 0, stored as the triple
/// (phi, phi^{-1}, phi^*) that the inexact-model inequalities need.
class PhiFunction {
 public:
  using Scalar = std::function<double(double)>;

  /// phi(t) = t^2 / (2 M^2), so phi^{-1}(v) = M sqrt(2 v) and
  /// phi^*(h) = h^2 M^2 / 2: the relative Lipschitz case.
  static PhiFunction quadratic(double lipschitz);
  static PhiFunction custom(Scalar phi, Scalar inverse, Scalar conjugate);

  double operator()(double t) const;
  double inverse(double v) const;
  double conjugate(double h) const;

  /// M for the quadratic instance.
  std::optional<double> lipschitz() const noexcept { return lipschitz_; }

 private:
  PhiFunction() = default;

  std::optional<double> lipschitz_;
  Scalar phi_;
  Scalar inverse_;
  Scalar conjugate_;
};

/// A (delta, phi, V)-model of a convex function:
///   f(x) + psi(y, x) <= f(y),   -psi(y, x) <= phi^{-1}(V_d(y, x)) + delta,
/// with psi(x, x) = 0 and psi(., x) convex.
struct InexactModel {
  std::function<double(const Vector& y, const Vector& x)> psi;
  /// Freezes psi(., x) for a Mirror step. One call is one subgradient
  /// evaluation.
  std::function<LinearizedModel(const Vector& x)> linearize;
  PhiFunction phi = PhiFunction::quadratic(1.0);
  double delta = 0.0;

  double phi_conjugate(double h) const { return phi.conjugate(h); }
  double phi_inverse(double v) const { return phi.inverse(v); }
};

/// A convex function paired with its model; what the solvers consume.
struct ConvexFunction {
  ScalarFunction value;
  InexactModel model;
};

/// psi(y, x) = <oracle(x), y - x> with the quadratic phi for constant M.
/// Throws ConfigError for M <= 0 or delta < 0.
InexactModel linear_model(SubgradientOracle oracle, double lipschitz, double delta = 0.0);

/// psi(y, x) = <oracle(x), y - x> + r(y) - r(x).
InexactModel composite_model(SubgradientOracle oracle, SimpleTerm r, double lipschitz,
                             double delta = 0.0);

/// Pointwise maximum of `pieces`; the subgradient is that of the active
/// piece with the lowest index.
ConvexFunction pointwise_max(std::vector<ConvexFunction> pieces, double lipschitz,
                             double delta = 0.0);

struct ModelViolation {
  enum class Kind { nonzero_at_diagonal, lower_bound, upper_bound };
  Kind kind;
  std::size_t pair_index;
  /// Amount by which the inequality fails.
  double excess;
};

struct ModelCheckReport {
  std::size_t pairs_checked = 0;
  std::vector<ModelViolation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(ModelViolation::Kind kind) const;
};

/// Checks both model inequalities and psi(x, x) = 0 on every (x, y) pair.
ModelCheckReport check_model(const InexactModel& model, const ScalarFunction& f,
                             const Geometry& geom,
                             std::span<const std::pair<Vector, Vector>> sample,
                             double tolerance = 1e-9);

}  // namespace relmd
