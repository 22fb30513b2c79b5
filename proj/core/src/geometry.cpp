#include "relmd/geometry.hpp"

#include "relmd/errors.hpp"
#include "spg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace relmd {

namespace {

// Entropy iterates are clamped to this floor before any log.
constexpr double kEntropyFloor = 1e-300;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

Vector project_simplex(const Vector& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumsum += u[static_cast<std::size_t>(j)];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

Vector soft_threshold(const Vector& v, double tau) {
  return v.array().sign() * (v.array().abs() - tau).max(0.0);
}

bool inside_nonnegative_orthant(const Geometry& geom, const FeasibleSet& set) {
  if (geom.kind() == Geometry::Kind::entropy) return true;
  return std::visit(Overloaded{
                        [](const FeasibleSet::WholeSpace&) { return false; },
                        [](const FeasibleSet::Ball& b) {
                          return (b.center.array() - b.radius).minCoeff() >= 0.0;
                        },
                        [](const FeasibleSet::Box& b) { return b.lower.minCoeff() >= 0.0; },
                        [](const FeasibleSet::Simplex&) { return true; },
                    },
                    set.variant());
}

// Projection onto Q intersected with the domain of d.
Vector project_into_domain(const Geometry& geom, const FeasibleSet& set, const Vector& v) {
  if (geom.kind() == Geometry::Kind::entropy &&
      std::holds_alternative<FeasibleSet::WholeSpace>(set.variant())) {
    return v.cwiseMax(0.0);
  }
  return set.project(v);
}

void check_set_dimension(const FeasibleSet& set, Eigen::Index n) {
  const Eigen::Index d = set.dimension();
  if (d >= 0 && d != n) {
    throw DomainError("feasible set " + set.describe() + " has dimension " + std::to_string(d) +
                      ", point has dimension " + std::to_string(n));
  }
}

// Folds an l1 composite term into the slope when it is linear on Q, and
// reports whether any composite term remains.
struct ReducedModel {
  Vector slope;
  const SimpleTerm* smooth = nullptr;
  double l1_weight = 0.0;
};

ReducedModel reduce(const Geometry& geom, const FeasibleSet& set, const LinearizedModel& model) {
  ReducedModel out{model.slope, nullptr, 0.0};
  if (!model.composite) return out;
  switch (model.composite->kind()) {
    case SimpleTerm::Kind::constant:
      break;
    case SimpleTerm::Kind::l1:
      if (inside_nonnegative_orthant(geom, set)) {
        out.slope.array() += model.composite->weight();
      } else {
        out.l1_weight = model.composite->weight();
      }
      break;
    case SimpleTerm::Kind::smooth:
      out.smooth = model.composite.get();
      break;
  }
  return out;
}

bool closed_form_available(const Geometry& geom, const FeasibleSet& set,
                           const ReducedModel& reduced) {
  if (reduced.smooth != nullptr) return false;
  switch (geom.kind()) {
    case Geometry::Kind::custom:
      return false;
    case Geometry::Kind::entropy:
      return !std::holds_alternative<FeasibleSet::Ball>(set.variant());
    case Geometry::Kind::euclidean:
      if (reduced.l1_weight == 0.0) return true;
      return std::holds_alternative<FeasibleSet::WholeSpace>(set.variant()) ||
             std::holds_alternative<FeasibleSet::Box>(set.variant());
  }
  return false;
}

Vector closed_form_step(const Geometry& geom, const FeasibleSet& set, const Vector& x, double h,
                        const ReducedModel& reduced) {
  if (geom.kind() == Geometry::Kind::euclidean) {
    Vector v = x - h * reduced.slope;
    if (reduced.l1_weight != 0.0) v = soft_threshold(v, h * reduced.l1_weight);
    return set.project(v);
  }

  // Entropy: multiplicative-weights update computed in log space.
  const Eigen::ArrayXd logs = x.array().max(kEntropyFloor).log() - h * reduced.slope.array();
  return std::visit(
      Overloaded{
          [&](const FeasibleSet::Simplex&) -> Vector {
            const Eigen::ArrayXd w = (logs - logs.maxCoeff()).exp();
            return (w / w.sum()).max(kEntropyFloor).matrix();
          },
          [&](const FeasibleSet::Box& b) -> Vector {
            return logs.exp().max(b.lower.array()).min(b.upper.array()).max(kEntropyFloor).matrix();
          },
          [&](const auto&) -> Vector { return logs.exp().max(kEntropyFloor).matrix(); },
      },
      set.variant());
}

}  // namespace

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw DomainError(std::string(what) + " has non-finite entries");
}

void require_same_dimension(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw DomainError(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()) + ")");
  }
}

// ---- Geometry ---------------------------------------------------------------

Geometry Geometry::euclidean() { return Geometry(Kind::euclidean, "euclidean"); }

Geometry Geometry::entropy() { return Geometry(Kind::entropy, "entropy"); }

Geometry Geometry::custom(std::string name, ScalarFunction d, VectorFunction grad_d,
                          ScalarFunction norm, ScalarFunction dual_norm) {
  if (!d || !grad_d) throw ConfigError("custom geometry needs d and grad d");
  Geometry g(Kind::custom, std::move(name));
  g.d_ = std::move(d);
  g.grad_d_ = std::move(grad_d);
  g.norm_ = std::move(norm);
  g.dual_norm_ = std::move(dual_norm);
  return g;
}

double Geometry::reference(const Vector& x) const {
  switch (kind_) {
    case Kind::euclidean:
      return 0.5 * x.squaredNorm();
    case Kind::entropy: {
      if ((x.array() < 0.0).any()) throw DomainError("entropy reference: negative entry");
      double s = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) s += xlogx(x[i]);
      return s;
    }
    case Kind::custom:
      return d_(x);
  }
  return 0.0;
}

Vector Geometry::reference_gradient(const Vector& x) const {
  switch (kind_) {
    case Kind::euclidean:
      return x;
    case Kind::entropy:
      if ((x.array() < 0.0).any()) throw DomainError("entropy gradient: negative entry");
      return (1.0 + x.array().max(kEntropyFloor).log()).matrix();
    case Kind::custom:
      return grad_d_(x);
  }
  return x;
}

double Geometry::norm(const Vector& x) const {
  switch (kind_) {
    case Kind::entropy:
      return x.lpNorm<1>();
    case Kind::custom:
      if (norm_) return norm_(x);
      [[fallthrough]];
    case Kind::euclidean:
      return x.norm();
  }
  return x.norm();
}

double Geometry::dual_norm(const Vector& y) const {
  switch (kind_) {
    case Kind::entropy:
      return y.lpNorm<Eigen::Infinity>();
    case Kind::custom:
      if (dual_norm_) return dual_norm_(y);
      [[fallthrough]];
    case Kind::euclidean:
      return y.norm();
  }
  return y.norm();
}

// ---- FeasibleSet ------------------------------------------------------------

FeasibleSet FeasibleSet::whole_space() { return FeasibleSet(WholeSpace{}); }

FeasibleSet FeasibleSet::ball(Vector center, double radius) {
  require_finite(center, "ball center");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("ball radius must be positive and finite");
  }
  return FeasibleSet(Ball{std::move(center), radius});
}

FeasibleSet FeasibleSet::unit_ball(Eigen::Index dimension) {
  if (dimension < 1) throw ConfigError("unit ball dimension must be >= 1");
  return ball(Vector::Zero(dimension), 1.0);
}

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  require_same_dimension(lower, upper, "box bounds");
  if (lower.size() < 1) throw ConfigError("box dimension must be >= 1");
  if ((lower.array() > upper.array()).any()) throw ConfigError("box has lower > upper");
  if (!lower.allFinite() || !upper.allFinite()) throw ConfigError("box bounds must be finite");
  return FeasibleSet(Box{std::move(lower), std::move(upper)});
}

FeasibleSet FeasibleSet::uniform_box(Eigen::Index dimension, double lower, double upper) {
  if (dimension < 1) throw ConfigError("box dimension must be >= 1");
  return box(Vector::Constant(dimension, lower), Vector::Constant(dimension, upper));
}

FeasibleSet FeasibleSet::simplex(Eigen::Index dimension) {
  if (dimension < 1) throw ConfigError("simplex dimension must be >= 1");
  return FeasibleSet(Simplex{dimension});
}

std::string FeasibleSet::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const WholeSpace&) { os << "whole-space"; },
                 [&](const Ball& b) { os << "ball(n=" << b.center.size() << ", r=" << b.radius << ")"; },
                 [&](const Box& b) { os << "box(n=" << b.lower.size() << ")"; },
                 [&](const Simplex& s) { os << "simplex(n=" << s.dimension << ")"; },
             },
             variant_);
  return os.str();
}

Eigen::Index FeasibleSet::dimension() const noexcept {
  return std::visit(Overloaded{
                        [](const WholeSpace&) -> Eigen::Index { return -1; },
                        [](const Ball& b) { return b.center.size(); },
                        [](const Box& b) { return b.lower.size(); },
                        [](const Simplex& s) { return s.dimension; },
                    },
                    variant_);
}

bool FeasibleSet::contains(const Vector& x, double tolerance) const {
  const Eigen::Index d = dimension();
  if (d >= 0 && d != x.size()) return false;
  return std::visit(
      Overloaded{
          [&](const WholeSpace&) { return true; },
          [&](const Ball& b) { return (x - b.center).norm() <= b.radius + tolerance; },
          [&](const Box& b) {
            return ((x.array() >= b.lower.array() - tolerance) &&
                    (x.array() <= b.upper.array() + tolerance))
                .all();
          },
          [&](const Simplex&) {
            return (x.array() >= -tolerance).all() && std::abs(x.sum() - 1.0) <= tolerance;
          },
      },
      variant_);
}

Vector FeasibleSet::project(const Vector& v) const {
  check_set_dimension(*this, v.size());
  return std::visit(Overloaded{
                        [&](const WholeSpace&) -> Vector { return v; },
                        [&](const Ball& b) -> Vector {
                          const Vector offset = v - b.center;
                          const double dist = offset.norm();
                          if (dist <= b.radius) return v;
                          return b.center + offset * (b.radius / dist);
                        },
                        [&](const Box& b) -> Vector {
                          return v.cwiseMax(b.lower).cwiseMin(b.upper);
                        },
                        [&](const Simplex&) -> Vector { return project_simplex(v); },
                    },
                    variant_);
}

// ---- SimpleTerm / LinearizedModel --------------------------------------------

SimpleTerm SimpleTerm::constant(double c) { return SimpleTerm(Kind::constant, c); }

SimpleTerm SimpleTerm::l1(double weight) {
  if (!(weight >= 0.0)) throw ConfigError("l1 weight must be nonnegative");
  return SimpleTerm(Kind::l1, weight);
}

SimpleTerm SimpleTerm::smooth(ScalarFunction value, VectorFunction gradient) {
  if (!value || !gradient) throw ConfigError("smooth simple term needs value and gradient");
  SimpleTerm t(Kind::smooth, 0.0);
  t.value_ = std::move(value);
  t.gradient_ = std::move(gradient);
  return t;
}

double SimpleTerm::value(const Vector& x) const {
  switch (kind_) {
    case Kind::constant:
      return scalar_;
    case Kind::l1:
      return scalar_ * x.lpNorm<1>();
    case Kind::smooth:
      return value_(x);
  }
  return 0.0;
}

Vector SimpleTerm::gradient(const Vector& x) const {
  if (kind_ == Kind::constant) return Vector::Zero(x.size());
  if (kind_ != Kind::smooth) throw ConfigError("l1 term has no gradient");
  return gradient_(x);
}

double LinearizedModel::value(const Vector& y, const Vector& x) const {
  double v = slope.dot(y - x);
  if (composite) v += composite->value(y) - composite->value(x);
  return v;
}

// ---- Operations ----------------------------------------------------------------

void require_compatible(const Geometry& geom, const FeasibleSet& set) {
  if (geom.kind() != Geometry::Kind::entropy) return;
  const bool ok = std::visit(Overloaded{
                                 [](const FeasibleSet::WholeSpace&) { return true; },
                                 [](const FeasibleSet::Ball& b) {
                                   return (b.center.array() - b.radius).minCoeff() >= 0.0;
                                 },
                                 [](const FeasibleSet::Box& b) { return b.lower.minCoeff() >= 0.0; },
                                 [](const FeasibleSet::Simplex&) { return true; },
                             },
                             set.variant());
  if (!ok) {
    throw ConfigError("feasible set " + set.describe() +
                      " leaves the nonnegative orthant (domain of the entropy geometry)");
  }
}

double bregman_divergence(const Geometry& geom, const Vector& y, const Vector& x) {
  require_same_dimension(y, x, "bregman_divergence");
  require_finite(y, "bregman_divergence: y");
  require_finite(x, "bregman_divergence: x");
  switch (geom.kind()) {
    case Geometry::Kind::euclidean:
      return 0.5 * (y - x).squaredNorm();
    case Geometry::Kind::entropy: {
      if ((x.array() <= 0.0).any()) {
        throw DomainError("bregman_divergence: x must be strictly positive for entropy");
      }
      if ((y.array() < 0.0).any()) throw DomainError("bregman_divergence: y has a negative entry");
      double v = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        v += (y[i] > 0.0 ? y[i] * std::log(y[i] / x[i]) : 0.0) - y[i] + x[i];
      }
      return std::max(v, 0.0);
    }
    case Geometry::Kind::custom:
      return geom.reference(y) - geom.reference(x) - geom.reference_gradient(x).dot(y - x);
  }
  return 0.0;
}

bool has_closed_form(const Geometry& geom, const FeasibleSet& set, const LinearizedModel& model) {
  return closed_form_available(geom, set, reduce(geom, set, model));
}

Vector mirror_step(const Geometry& geom, const FeasibleSet& set, const Vector& x, double h,
                   const LinearizedModel& model) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("mirror_step: h must be positive");
  require_same_dimension(x, model.slope, "mirror_step");
  require_finite(x, "mirror_step: x");
  require_finite(model.slope, "mirror_step: slope");
  check_set_dimension(set, x.size());
  require_compatible(geom, set);

  const ReducedModel reduced = reduce(geom, set, model);
  if (closed_form_available(geom, set, reduced)) return closed_form_step(geom, set, x, h, reduced);
  if (reduced.l1_weight != 0.0) {
    throw ConfigError("mirror_step: l1 composite term has no prox for " + geom.name() + " on " +
                      set.describe());
  }
  return mirror_step_numeric(geom, set, x, h, model);
}

Vector mirror_step_numeric(const Geometry& geom, const FeasibleSet& set, const Vector& x,
                           double h, const LinearizedModel& model,
                           const InnerSolverOptions& options) {
  if (!(h > 0.0)) throw ConfigError("mirror_step_numeric: h must be positive");
  require_same_dimension(x, model.slope, "mirror_step_numeric");
  check_set_dimension(set, x.size());
  const ReducedModel reduced = reduce(geom, set, model);
  if (reduced.l1_weight != 0.0) {
    throw ConfigError("mirror_step_numeric: l1 term is nonsmooth on " + set.describe());
  }

  // h * psi(y, x) + V_d(y, x) up to terms constant in y.
  const Vector grad_at_x = geom.reference_gradient(x);
  const Vector& s = reduced.slope;
  const SimpleTerm* r = reduced.smooth;
  auto value = [&](const Vector& y) {
    double v = h * s.dot(y) + geom.reference(y) - grad_at_x.dot(y);
    if (r != nullptr) v += h * r->value(y);
    return v;
  };
  auto gradient = [&](const Vector& y) -> Vector {
    Vector g = h * s + geom.reference_gradient(y) - grad_at_x;
    if (r != nullptr) g += h * r->gradient(y);
    return g;
  };
  auto project = [&](const Vector& v) { return project_into_domain(geom, set, v); };

  const detail::SpgResult res = detail::spg_minimize(value, gradient, project, x, options);
  if (!res.converged) {
    throw SolverError("mirror_step_numeric: inner solver did not converge after " +
                          std::to_string(res.iterations) + " iterations",
                      res.last_step);
  }
  if (geom.kind() == Geometry::Kind::entropy) return res.point.cwiseMax(kEntropyFloor);
  return res.point;
}

Vector argmin_reference(const Geometry& geom, const FeasibleSet& set, Eigen::Index dimension) {
  if (dimension < 1) throw ConfigError("argmin_reference: dimension must be >= 1");
  check_set_dimension(set, dimension);
  require_compatible(geom, set);

  const bool is_simplex = std::holds_alternative<FeasibleSet::Simplex>(set.variant());
  if (is_simplex && geom.kind() != Geometry::Kind::custom) {
    return Vector::Constant(dimension, 1.0 / static_cast<double>(dimension));
  }
  if (geom.kind() == Geometry::Kind::euclidean) return set.project(Vector::Zero(dimension));
  if (geom.kind() == Geometry::Kind::entropy) {
    const Vector unconstrained = Vector::Constant(dimension, std::exp(-1.0));
    if (std::holds_alternative<FeasibleSet::WholeSpace>(set.variant()) ||
        std::holds_alternative<FeasibleSet::Box>(set.variant())) {
      return set.project(unconstrained).cwiseMax(kEntropyFloor);
    }
  }

  // Numeric fallback: minimise d over Q directly.
  Vector start = is_simplex ? Vector::Constant(dimension, 1.0 / static_cast<double>(dimension))
                            : Vector::Zero(dimension);
  if (const auto* b = std::get_if<FeasibleSet::Ball>(&set.variant())) start = b->center;
  auto value = [&](const Vector& y) { return geom.reference(y); };
  auto gradient = [&](const Vector& y) { return geom.reference_gradient(y); };
  auto project = [&](const Vector& v) { return project_into_domain(geom, set, v); };
  const detail::SpgResult res = detail::spg_minimize(value, gradient, project, start, {});
  if (!res.converged) {
    throw SolverError("argmin_reference: inner solver did not converge", res.last_step);
  }
  return res.point;
}

}  // namespace relmd
