#include "relmd/errors.hpp"
#include "relmd/problems.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <variant>

namespace relmd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvPhi = 0.6180339887498949;

struct Bounds {
  Vector lower;
  Vector upper;
};

Bounds bounding_box(const FeasibleSet& set, Eigen::Index n) {
  return std::visit(
      [n](const auto& s) -> Bounds {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FeasibleSet::WholeSpace>) {
          throw ConfigError("reference_optimum: Q must be bounded for n <= 3");
        } else if constexpr (std::is_same_v<T, FeasibleSet::Ball>) {
          return {s.center.array() - s.radius, s.center.array() + s.radius};
        } else if constexpr (std::is_same_v<T, FeasibleSet::Box>) {
          return {s.lower, s.upper};
        } else {
          return {Vector::Zero(n), Vector::Ones(n)};
        }
      },
      set.variant());
}

// Minimiser of a convex function on [a, b]; returns the final bracket.
std::pair<double, double> golden(const std::function<double(double)>& fn, double a, double b) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int it = 0; it < 400 && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  return {a, b};
}

// Boundary of {g <= 0} between an infeasible `out` and a feasible `in`.
double bisect_boundary(const std::function<double(double)>& g, double out, double in) {
  for (int it = 0; it < 200 && std::abs(out - in) > 1e-15 * (1.0 + std::abs(in)); ++it) {
    const double mid = 0.5 * (out + in);
    if (g(mid) <= 0.0) {
      in = mid;
    } else {
      out = mid;
    }
  }
  return in;
}

ReferenceSolution golden_section(const ScalarFunction& f, const ScalarFunction& g, double a,
                                 double b) {
  Vector x1(1);
  const auto f1 = [&](double t) {
    x1[0] = t;
    return f(x1);
  };
  const auto g1 = [&](double t) {
    x1[0] = t;
    return g(x1);
  };

  double lo = a;
  double hi = b;
  if (g1(a) > 0.0 || g1(b) > 0.0) {
    const auto [ga, gb] = golden(g1, a, b);
    const double xg = 0.5 * (ga + gb);
    double inside = xg;
    if (g1(inside) > 0.0) {
      if (g1(ga) <= 0.0) {
        inside = ga;
      } else if (g1(gb) <= 0.0) {
        inside = gb;
      } else {
        throw InfeasibleError("reference_optimum: g > 0 on the whole interval");
      }
    }
    lo = g1(a) <= 0.0 ? a : bisect_boundary(g1, a, inside);
    hi = g1(b) <= 0.0 ? b : bisect_boundary(g1, b, inside);
  }

  const auto [c, d] = lo < hi ? golden(f1, lo, hi) : std::pair<double, double>{lo, lo};
  double best = 0.5 * (c + d);
  double fbest = f1(best);
  for (double t : {c, d, lo, hi}) {
    const double v = f1(t);
    if (v < fbest) {
      fbest = v;
      best = t;
    }
  }

  // Convexity bounds |f'| on [c, d] by the outer secant slopes.
  double slope = 0.0;
  if (c > lo) slope = std::max(slope, std::abs((f1(c) - f1(lo)) / (c - lo)));
  if (hi > d) slope = std::max(slope, std::abs((f1(hi) - f1(d)) / (hi - d)));
  if (d > c) slope = std::max(slope, std::abs((f1(d) - f1(c)) / (d - c)));

  ReferenceSolution out;
  out.x_star = Vector::Constant(1, best);
  out.f_star = fbest;
  out.method = "golden-section";
  out.certified_accuracy = slope * (d - c) + 1e-15 * (1.0 + std::abs(fbest));
  return out;
}

ReferenceSolution grid_refinement(const ScalarFunction& f, const ScalarFunction& g,
                                  const FeasibleSet& set, Eigen::Index n, double accuracy) {
  Bounds box = bounding_box(set, n);
  const Bounds outer = box;
  const double target = 1e-3 * accuracy;

  Vector best;
  double fbest = kInf;
  double cell = kInf;
  double slope = 0.0;

  for (int level = 0; level < 60; ++level) {
    const int points = (level == 0) ? (n == 2 ? 201 : 61) : 41;
    Vector step = (box.upper - box.lower) / static_cast<double>(points - 1);
    cell = step.maxCoeff();

    long total = 1;
    for (Eigen::Index i = 0; i < n; ++i) total *= points;
    std::vector<double> values(static_cast<std::size_t>(total), kInf);
    Vector x(n);
    Vector level_best;
    double level_f = kInf;
    for (long idx = 0; idx < total; ++idx) {
      long rem = idx;
      for (Eigen::Index i = 0; i < n; ++i) {
        x[i] = box.lower[i] + step[i] * static_cast<double>(rem % points);
        rem /= points;
      }
      if (!set.contains(x, 1e-12) || g(x) > 0.0) continue;
      const double v = f(x);
      values[static_cast<std::size_t>(idx)] = v;
      if (v < level_f) {
        level_f = v;
        level_best = x;
      }
    }
    if (!std::isfinite(level_f)) {
      if (level == 0) throw InfeasibleError("reference_optimum: no feasible grid point found");
      break;
    }
    if (level_f <= fbest) {
      fbest = level_f;
      best = level_best;
    }

    // Largest difference between neighbouring feasible grid values.
    slope = 0.0;
    long stride = 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (long idx = 0; idx < total; ++idx) {
        if ((idx / stride) % points == points - 1) continue;
        const double a = values[static_cast<std::size_t>(idx)];
        const double b = values[static_cast<std::size_t>(idx + stride)];
        if (std::isfinite(a) && std::isfinite(b) && step[i] > 0.0) {
          slope = std::max(slope, std::abs(a - b) / step[i]);
        }
      }
      stride *= points;
    }

    if (cell * std::sqrt(static_cast<double>(n)) * std::max(slope, 1.0) < target) break;
    const Vector half = 3.0 * step;
    box.lower = (best - half).cwiseMax(outer.lower);
    box.upper = (best + half).cwiseMin(outer.upper);
  }

  ReferenceSolution out;
  out.x_star = best;
  out.f_star = fbest;
  out.method = "grid-refinement";
  out.certified_accuracy = slope * cell * std::sqrt(static_cast<double>(n));
  return out;
}

// Value, gradient and Hessian of a self-concordant barrier objective; value
// is +inf outside its domain.
struct Local {
  double value = 0.0;
  Vector grad;
  Matrix hess;
};
using Objective = std::function<Local(const Vector&)>;

// Inequalities q(x) <= 0 describing Q; added as -log(-q) terms.
bool add_set_barrier(const FeasibleSet& set, const Vector& x, Eigen::Index offset, Local& out) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        const Eigen::Index n = x.size();
        if constexpr (std::is_same_v<T, FeasibleSet::WholeSpace>) {
          return true;
        } else if constexpr (std::is_same_v<T, FeasibleSet::Ball>) {
          const Vector d = x - s.center;
          const double slack = s.radius * s.radius - d.squaredNorm();
          if (!(slack > 0.0)) return false;
          out.value -= std::log(slack);
          const Vector gq = 2.0 * d;
          out.grad.segment(offset, n) += gq / slack;
          out.hess.block(offset, offset, n, n) += gq * gq.transpose() / (slack * slack);
          out.hess.block(offset, offset, n, n).diagonal().array() += 2.0 / slack;
          return true;
        } else if constexpr (std::is_same_v<T, FeasibleSet::Box>) {
          for (Eigen::Index i = 0; i < n; ++i) {
            const double a = x[i] - s.lower[i];
            const double b = s.upper[i] - x[i];
            if (!(a > 0.0) || !(b > 0.0)) return false;
            out.value -= std::log(a) + std::log(b);
            out.grad[offset + i] += -1.0 / a + 1.0 / b;
            out.hess(offset + i, offset + i) += 1.0 / (a * a) + 1.0 / (b * b);
          }
          return true;
        } else {
          throw ConfigError("reference_optimum: the barrier method supports ball, box or whole space");
        }
      },
      set.variant());
}

Eigen::Index set_constraint_count(const FeasibleSet& set, Eigen::Index n) {
  if (std::holds_alternative<FeasibleSet::Ball>(set.variant())) return 1;
  if (std::holds_alternative<FeasibleSet::Box>(set.variant())) return 2 * n;
  return 0;
}

// Damped Newton to the minimiser of a strictly convex barrier objective.
// The stopping test is relative to the objective's magnitude, since at large
// t the decrement bottoms out at rounding level. `gap` receives the final
// decrement lambda^2, which bounds the centering suboptimality.
Vector center(const Objective& phi, Vector z, double* gap = nullptr) {
  for (int it = 0; it < 500; ++it) {
    const Local loc = phi(z);
    const Eigen::LDLT<Matrix> ldlt(loc.hess);
    const Vector dz = ldlt.solve(-loc.grad);
    const double decrement = -loc.grad.dot(dz);
    if (!dz.allFinite()) throw SolverError("reference_optimum: singular Newton system", decrement);
    if (gap) *gap = std::max(0.0, decrement);
    if (decrement / 2.0 <= 1e-12 * std::max(1.0, std::abs(loc.value))) return z;
    double step = 1.0;
    while (true) {
      const Vector trial = z + step * dz;
      const double v = phi(trial).value;
      if (std::isfinite(v) && v <= loc.value - 0.25 * step * decrement) {
        z = trial;
        break;
      }
      step *= 0.5;
      if (step < 1e-20) return z;
    }
  }
  throw SolverError("reference_optimum: Newton centering did not converge", kInf);
}

// Strictly feasible x for max_i <alpha_i, x> < 0 inside Q.
Vector phase_one(const FTSInstance& inst, const FeasibleSet& set) {
  const Eigen::Index n = inst.n();
  FeasibleSet bounded = set;
  Vector x0 = Vector::Zero(n);
  if (const auto* b = std::get_if<FeasibleSet::Ball>(&set.variant())) {
    x0 = b->center;
  } else if (const auto* bx = std::get_if<FeasibleSet::Box>(&set.variant())) {
    x0 = 0.5 * (bx->lower + bx->upper);
  } else {
    bounded = FeasibleSet::ball(Vector::Zero(n), 1.0);
  }
  const Vector ax0 = inst.rows * x0;
  if (ax0.maxCoeff() < 0.0) return x0;

  const Eigen::Index m = inst.m();
  const double scale = 1.0 + inst.rows.cwiseAbs().maxCoeff();
  const double count = static_cast<double>(m + set_constraint_count(bounded, n));
  Vector z(n + 1);
  z.head(n) = x0;
  z[n] = ax0.maxCoeff() + scale;

  for (double t = 1.0 / scale;; t *= 8.0) {
    const Objective phi = [&](const Vector& w) {
      Local out{t * w[n], Vector::Zero(n + 1), Matrix::Zero(n + 1, n + 1)};
      out.grad[n] = t;
      const Vector x = w.head(n);
      if (!add_set_barrier(bounded, x, 0, out)) return Local{kInf, {}, {}};
      const Vector ax = inst.rows * x;
      Vector row(n + 1);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double slack = w[n] - ax[i];
        if (!(slack > 0.0)) return Local{kInf, {}, {}};
        out.value -= std::log(slack);
        row.head(n) = inst.rows.row(i).transpose();
        row[n] = -1.0;
        out.grad += row / slack;
        out.hess += row * row.transpose() / (slack * slack);
      }
      return out;
    };
    z = center(phi, z);
    const Vector x = z.head(n);
    const double g = (inst.rows * x).maxCoeff();
    if (count / t < 1e-9 * scale) {
      if (g < 0.0) return x;
      if (z[n] - count / t > 0.0) {
        throw InfeasibleError("reference_optimum: no x in Q with max_i <alpha_i, x> <= 0");
      }
      throw SolverError("reference_optimum: feasible set has empty interior", z[n]);
    }
    if (g < -1e-3 * scale * std::max(1.0, x.norm())) return x;
  }
}

ReferenceSolution log_barrier(const FTSInstance& inst, const FeasibleSet& set, double accuracy) {
  const Eigen::Index n = inst.n();
  const Eigen::Index m = inst.m();
  const double mu = accuracy / 10.0;
  const double r = static_cast<double>(inst.r());
  const double count = static_cast<double>(m + set_constraint_count(set, n));

  const auto smoothed = [&](const Vector& x, Local* out) {
    double v = 0.0;
    for (Eigen::Index k = 0; k < inst.r(); ++k) {
      const Vector d = x - inst.points.col(k);
      const double s = std::sqrt(d.squaredNorm() + mu * mu);
      v += s;
      if (out) {
        out->grad += d / (r * s);
        out->hess -= d * d.transpose() / (r * s * s * s);
        out->hess.diagonal().array() += 1.0 / (r * s);
      }
    }
    return v / r;
  };

  Vector x = phase_one(inst, set);
  double t = 1.0;
  double gap = 0.0;
  for (;; t *= 8.0) {
    const Objective phi = [&](const Vector& w) {
      Local fpart{0.0, Vector::Zero(n), Matrix::Zero(n, n)};
      const double fv = smoothed(w, &fpart);
      Local out{t * fv, t * fpart.grad, t * fpart.hess};
      if (!add_set_barrier(set, w, 0, out)) return Local{kInf, {}, {}};
      const Vector aw = inst.rows * w;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double slack = -aw[i];
        if (!(slack > 0.0)) return Local{kInf, {}, {}};
        const auto row = inst.rows.row(i).transpose();
        out.value -= std::log(slack);
        out.grad += row / slack;
        out.hess += row * row.transpose() / (slack * slack);
      }
      return out;
    };
    x = center(phi, x, &gap);
    if (count / t < accuracy / 10.0) break;
  }

  const double f = fts_objective(inst, x).value;
  const double lower = smoothed(x, nullptr) - count / t - gap / t - mu;
  ReferenceSolution out;
  out.x_star = x;
  out.f_star = f;
  out.method = "log-barrier";
  out.certified_accuracy = std::max(0.0, f - lower);
  return out;
}

}  // namespace

ReferenceSolution reference_optimum(const ScalarFunction& f, const ScalarFunction& g,
                                    const FeasibleSet& set, Eigen::Index n, double accuracy) {
  if (!(accuracy > 0.0)) throw ConfigError("reference_optimum: accuracy must be positive");
  if (set.dimension() >= 0 && set.dimension() != n) {
    throw ConfigError("reference_optimum: dimension does not match Q");
  }
  if (n == 1) {
    const Bounds b = bounding_box(set, 1);
    return golden_section(f, g, b.lower[0], b.upper[0]);
  }
  if (n == 2 || n == 3) return grid_refinement(f, g, set, n, accuracy);
  throw ConfigError("reference_optimum: generic oracle supports n <= 3 only");
}

ReferenceSolution reference_optimum(const FTSInstance& inst, const FeasibleSet& set,
                                    double accuracy) {
  validate(inst);
  if (!(accuracy > 0.0)) throw ConfigError("reference_optimum: accuracy must be positive");
  if (set.dimension() >= 0 && set.dimension() != inst.n()) {
    throw ConfigError("reference_optimum: dimension does not match Q");
  }
  if (inst.n() <= 3) {
    return reference_optimum([&inst](const Vector& x) { return fts_objective(inst, x).value; },
                             [&inst](const Vector& x) { return max_linear_constraint(inst, x).value; },
                             set, inst.n(), accuracy);
  }
  return log_barrier(inst, set, accuracy);
}

}  // namespace relmd
