#pragma once

// Spectral projected gradient (Birgin, Martinez, Raydan) with a
// non-monotone Armijo line search. Internal helper behind the numeric
// Mirror step and argmin_reference fallbacks.

#include "relmd/geometry.hpp"

#include <functional>

namespace relmd::detail {

struct SpgResult {
  Vector point;
  int iterations = 0;
  double last_step = 0.0;
  bool converged = false;
};

SpgResult spg_minimize(const ScalarFunction& value, const VectorFunction& gradient,
                       const VectorFunction& project, Vector start,
                       const InnerSolverOptions& options);

}  // namespace relmd::detail
