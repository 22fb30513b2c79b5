#include "relmd/model.hpp"

#include "relmd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace relmd {

namespace {

void check_constants(double lipschitz, double delta) {
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    throw ConfigError("model: Lipschitz constant must be positive and finite");
  }
  if (!(delta >= 0.0)) throw ConfigError("model: delta must be nonnegative");
}

}  // namespace

PhiFunction PhiFunction::quadratic(double lipschitz) {
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    throw ConfigError("phi: Lipschitz constant must be positive and finite");
  }
  PhiFunction p;
  p.lipschitz_ = lipschitz;
  return p;
}

PhiFunction PhiFunction::custom(Scalar phi, Scalar inverse, Scalar conjugate) {
  if (!phi || !inverse || !conjugate) throw ConfigError("phi: all three functions required");
  PhiFunction p;
  p.phi_ = std::move(phi);
  p.inverse_ = std::move(inverse);
  p.conjugate_ = std::move(conjugate);
  return p;
}

double PhiFunction::operator()(double t) const {
  if (lipschitz_) return t * t / (2.0 * *lipschitz_ * *lipschitz_);
  return phi_(t);
}

double PhiFunction::inverse(double v) const {
  if (lipschitz_) return *lipschitz_ * std::sqrt(2.0 * std::max(v, 0.0));
  return inverse_(v);
}

double PhiFunction::conjugate(double h) const {
  if (lipschitz_) return h * h * *lipschitz_ * *lipschitz_ / 2.0;
  return conjugate_(h);
}

InexactModel linear_model(SubgradientOracle oracle, double lipschitz, double delta) {
  check_constants(lipschitz, delta);
  if (!oracle) throw ConfigError("linear_model: empty oracle");
  InexactModel m;
  m.psi = [oracle](const Vector& y, const Vector& x) { return oracle(x).dot(y - x); };
  m.linearize = [oracle](const Vector& x) { return LinearizedModel{oracle(x), nullptr}; };
  m.phi = PhiFunction::quadratic(lipschitz);
  m.delta = delta;
  return m;
}

InexactModel composite_model(SubgradientOracle oracle, SimpleTerm r, double lipschitz,
                             double delta) {
  check_constants(lipschitz, delta);
  if (!oracle) throw ConfigError("composite_model: empty oracle");
  auto term = std::make_shared<const SimpleTerm>(std::move(r));
  InexactModel m;
  m.psi = [oracle, term](const Vector& y, const Vector& x) {
    return oracle(x).dot(y - x) + term->value(y) - term->value(x);
  };
  m.linearize = [oracle, term](const Vector& x) { return LinearizedModel{oracle(x), term}; };
  m.phi = PhiFunction::quadratic(lipschitz);
  m.delta = delta;
  return m;
}

ConvexFunction pointwise_max(std::vector<ConvexFunction> pieces, double lipschitz, double delta) {
  if (pieces.empty()) throw ConfigError("pointwise_max: no pieces");
  auto shared = std::make_shared<const std::vector<ConvexFunction>>(std::move(pieces));
  auto active = [shared](const Vector& x) {
    std::size_t best = 0;
    double best_value = (*shared)[0].value(x);
    for (std::size_t p = 1; p < shared->size(); ++p) {
      const double v = (*shared)[p].value(x);
      if (v > best_value) {
        best = p;
        best_value = v;
      }
    }
    return best;
  };
  ConvexFunction out;
  out.value = [shared, active](const Vector& x) { return (*shared)[active(x)].value(x); };
  out.model = linear_model(
      [shared, active](const Vector& x) {
        return (*shared)[active(x)].model.linearize(x).slope;
      },
      lipschitz, delta);
  return out;
}

std::size_t ModelCheckReport::count(ModelViolation::Kind kind) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [kind](const ModelViolation& v) { return v.kind == kind; }));
}

ModelCheckReport check_model(const InexactModel& model, const ScalarFunction& f,
                             const Geometry& geom,
                             std::span<const std::pair<Vector, Vector>> sample, double tolerance) {
  ModelCheckReport report;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& [x, y] = sample[i];
    ++report.pairs_checked;

    const double diag = model.psi(x, x);
    if (std::abs(diag) > tolerance) {
      report.violations.push_back({ModelViolation::Kind::nonzero_at_diagonal, i, std::abs(diag)});
    }

    const double psi = model.psi(y, x);
    const double lower_excess = f(x) + psi - f(y);
    if (lower_excess > tolerance) {
      report.violations.push_back({ModelViolation::Kind::lower_bound, i, lower_excess});
    }

    const double upper_excess =
        -psi - model.phi_inverse(bregman_divergence(geom, y, x)) - model.delta;
    if (upper_excess > tolerance) {
      report.violations.push_back({ModelViolation::Kind::upper_bound, i, upper_excess});
    }
  }
  return report;
}

}  // namespace relmd
