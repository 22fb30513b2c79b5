#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <variant>

namespace relmd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using ScalarFunction = std::function<double(const Vector&)>;
using VectorFunction = std::function<Vector(const Vector&)>;

/// Throws DomainError unless every entry of `v` is finite.
void require_finite(const Vector& v, const char* what);

/// Throws DomainError unless `a` and `b` have the same dimension.
void require_same_dimension(const Vector& a, const Vector& b, const char* what);

/// A convex differentiable reference (distance-generating) function together
/// with the primal norm used to state relative Lipschitz constants.
///
/// Two geometries have closed-form Mirror steps:
///   - euclidean: d(x) = 0.5 * |x|_2^2, primal/dual norms l2/l2;
///   - entropy:   d(x) = sum x_i ln x_i on the nonnegative orthant,
///                primal/dual norms l1/l-inf. Its Bregman divergence is the
///                generalised Kullback-Leibler divergence.
/// A custom geometry supplies d and grad d; its Mirror steps go through the
/// numeric inner solver.
///
/// Strong convexity of d is never assumed.
class Geometry {
 public:
  enum class Kind { euclidean, entropy, custom };

  static Geometry euclidean();
  static Geometry entropy();
  /// Empty `norm` / `dual_norm` default to the Euclidean norm.
  static Geometry custom(std::string name, ScalarFunction d, VectorFunction grad_d,
                         ScalarFunction norm = {}, ScalarFunction dual_norm = {});

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  /// d(x).
  double reference(const Vector& x) const;
  /// grad d(x). For entropy, entries are clamped to 1e-300 before the log.
  Vector reference_gradient(const Vector& x) const;

  double norm(const Vector& x) const;
  double dual_norm(const Vector& y) const;

 private:
  Geometry(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  ScalarFunction d_;
  VectorFunction grad_d_;
  ScalarFunction norm_;
  ScalarFunction dual_norm_;
};

/// Closed convex feasible set Q.
class FeasibleSet {
 public:
  struct WholeSpace {};
  struct Ball {
    Vector center;
    double radius;
  };
  struct Box {
    Vector lower;
    Vector upper;
  };
  /// Probability simplex {x >= 0, sum x = 1} in R^dimension.
  struct Simplex {
    Eigen::Index dimension;
  };
  using Variant = std::variant<WholeSpace, Ball, Box, Simplex>;

  static FeasibleSet whole_space();
  static FeasibleSet ball(Vector center, double radius);
  static FeasibleSet unit_ball(Eigen::Index dimension);
  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet uniform_box(Eigen::Index dimension, double lower, double upper);
  static FeasibleSet simplex(Eigen::Index dimension);

  const Variant& variant() const noexcept { return variant_; }
  std::string describe() const;

  /// Dimension fixed by the set, or -1 for the whole space.
  Eigen::Index dimension() const noexcept;

  bool contains(const Vector& x, double tolerance = 0.0) const;

  /// Euclidean projection onto the set. A point already in a ball (including
  /// its boundary) is returned unchanged.
  Vector project(const Vector& v) const;

 private:
  explicit FeasibleSet(Variant v) : variant_(std::move(v)) {}

  Variant variant_;
};

/// A "simple" convex term r(x) folded into a model and handled inside the
/// prox subproblem.
class SimpleTerm {
 public:
  enum class Kind { constant, l1, smooth };

  static SimpleTerm constant(double c);
  /// r(x) = weight * |x|_1.
  static SimpleTerm l1(double weight);
  /// Differentiable r; Mirror steps with it use the numeric inner solver.
  static SimpleTerm smooth(ScalarFunction value, VectorFunction gradient);

  Kind kind() const noexcept { return kind_; }
  double weight() const noexcept { return scalar_; }

  double value(const Vector& x) const;
  /// Only available for smooth terms.
  Vector gradient(const Vector& x) const;

 private:
  SimpleTerm(Kind kind, double scalar) : kind_(kind), scalar_(scalar) {}

  Kind kind_;
  double scalar_;
  ScalarFunction value_;
  VectorFunction gradient_;
};

/// psi(y, x) = <slope, y - x> + r(y) - r(x): the model term a Mirror step
/// minimises, frozen at the linearisation point x.
struct LinearizedModel {
  Vector slope;
  std::shared_ptr<const SimpleTerm> composite;

  double value(const Vector& y, const Vector& x) const;
};

/// Stopping rule of the numeric inner solver used when no closed-form Mirror
/// step exists.
struct InnerSolverOptions {
  double step_tolerance = 1e-12;
  int max_iterations = 10'000;
};

/// Bregman divergence V_d(y, x) = d(y) - d(x) - <grad d(x), y - x>.
/// Throws DomainError on dimension mismatch, non-finite input, or when x is
/// outside the domain of grad d (a zero or negative entry for entropy).
double bregman_divergence(const Geometry& geom, const Vector& y, const Vector& x);

/// Mirror (proximal) step:
///   argmin_{y in Q} { psi(y, x) + V_d(y, x) / h }.
/// Uses a closed form whenever the geometry/set/composite combination has
/// one and falls back to mirror_step_numeric otherwise. Throws ConfigError
/// if the composite term is nonsmooth and no closed form applies, and
/// SolverError if the numeric fallback does not converge.
Vector mirror_step(const Geometry& geom, const FeasibleSet& set, const Vector& x, double h,
                   const LinearizedModel& model);

/// The same subproblem solved by spectral projected gradient, never by a
/// closed form. Exposed so closed forms can be cross-checked.
Vector mirror_step_numeric(const Geometry& geom, const FeasibleSet& set, const Vector& x,
                           double h, const LinearizedModel& model,
                           const InnerSolverOptions& options = {});

/// True when mirror_step would use a closed form for this combination.
bool has_closed_form(const Geometry& geom, const FeasibleSet& set, const LinearizedModel& model);

/// A minimiser of d over Q in R^dimension (the starting point of every
/// switching scheme).
Vector argmin_reference(const Geometry& geom, const FeasibleSet& set, Eigen::Index dimension);

/// Throws ConfigError unless `set` lies inside the domain of `geom`.
void require_compatible(const Geometry& geom, const FeasibleSet& set);

}  // namespace relmd
