#include "spg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace relmd::detail {

namespace {

constexpr int kHistory = 10;
constexpr double kArmijo = 1e-4;
constexpr double kMinSpectral = 1e-30;
constexpr double kMaxSpectral = 1e10;
constexpr int kMaxBacktracks = 60;

}  // namespace

SpgResult spg_minimize(const ScalarFunction& value, const VectorFunction& gradient,
                       const VectorFunction& project, Vector start,
                       const InnerSolverOptions& options) {
  SpgResult result;
  Vector y = project(start);
  double fy = value(y);
  Vector g = gradient(y);

  std::deque<double> history{fy};

  // Initial spectral step from the projected-gradient scale.
  double alpha = 1.0;
  {
    const double pg = (project(y - g) - y).lpNorm<Eigen::Infinity>();
    if (pg > 0.0) alpha = std::clamp(1.0 / pg, kMinSpectral, kMaxSpectral);
  }

  result.last_step = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    result.iterations = it;
    const Vector direction = project(y - alpha * g) - y;
    const double slope = g.dot(direction);
    const double reference = *std::max_element(history.begin(), history.end());

    double lambda = 1.0;
    Vector trial = y + direction;
    double ft = value(trial);
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      if (std::isfinite(ft) && ft <= reference + kArmijo * lambda * slope) break;
      // Safeguarded quadratic interpolation.
      const double denom = 2.0 * (ft - fy - lambda * slope);
      double next = (std::isfinite(ft) && denom > 0.0) ? -slope * lambda * lambda / denom
                                                       : 0.5 * lambda;
      if (next < 0.1 * lambda || next > 0.9 * lambda) next = 0.5 * lambda;
      lambda = next;
      trial = y + lambda * direction;
      ft = value(trial);
    }

    const Vector step = trial - y;
    const Vector g_new = gradient(trial);
    const Vector dg = g_new - g;
    y = trial;
    fy = ft;
    g = g_new;
    result.last_step = step.lpNorm<Eigen::Infinity>();

    if (result.last_step < options.step_tolerance) {
      result.converged = true;
      break;
    }

    const double sty = step.dot(dg);
    alpha = sty > 0.0 ? std::clamp(step.squaredNorm() / sty, kMinSpectral, kMaxSpectral)
                      : kMaxSpectral;

    history.push_back(fy);
    if (history.size() > kHistory) history.pop_front();
  }
  result.point = std::move(y);
  return result;
}

}  // namespace relmd::detail
