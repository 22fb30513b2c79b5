#pragma once

#include "relmd/geometry.hpp"
#include "relmd/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace relmd {

/// Fermat-Torricelli-Steiner instance: r anchor points and m linear
/// constraint rows in R^n.
struct FTSInstance {
  /// n x r, column k is P_k.
  Matrix points;
  /// m x n, row i is alpha_i.
  Matrix rows;
  std::uint64_t seed = 0;

  Eigen::Index n() const noexcept { return points.rows(); }
  Eigen::Index r() const noexcept { return points.cols(); }
  Eigen::Index m() const noexcept { return rows.rows(); }
};

struct OracleValue {
  double value = 0.0;
  Vector subgradient;
};

struct MaxLinearValue {
  double value = 0.0;
  Vector subgradient;
  /// 0-based index of the lowest-index maximising row.
  Eigen::Index active_index = 0;
};

/// (1/r) sum_k |x - P_k|_2; the k-th subgradient term is zero when x = P_k.
OracleValue fts_objective(const FTSInstance& inst, const Vector& x);

/// max_i <alpha_i, x>; ties go to the lowest index.
MaxLinearValue max_linear_constraint(const FTSInstance& inst, const Vector& x);

/// Every coordinate of P_k (drawn first, column by column) and then of
/// alpha_i (row by row) is Normal(1, sd 2) from KeyedStream(seed).
FTSInstance generate_fts(Eigen::Index n, Eigen::Index r, Eigen::Index m, std::uint64_t seed);

/// Validates shapes and finiteness; throws DomainError.
void validate(const FTSInstance& inst);

/// Objective with its linear model, M_f = 1.
ConvexFunction fts_function(const FTSInstance& inst);

/// max_i <alpha_i, x> with M_g = max_i |alpha_i|_* in `geom`.
ConvexFunction max_linear_function(const FTSInstance& inst, const Geometry& geom);

/// The m constraints <alpha_i, x> separately, each with M = |alpha_i|_*.
std::vector<ConvexFunction> linear_pieces(const FTSInstance& inst, const Geometry& geom);

/// max_i |alpha_i|_*.
double max_row_dual_norm(const FTSInstance& inst, const Geometry& geom);

/// |x_0 - c| on R^1 with M = 1 (Euclidean).
ConvexFunction shifted_abs(double c);

/// <a, x> + b with M = |a|_* in `geom`.
ConvexFunction affine_function(Vector a, double b, const Geometry& geom);

/// JSON form {"n","r","m","seed","points":[[P_1],...],"rows":[[alpha_1],...]}.
std::string fts_to_json(const FTSInstance& inst);
FTSInstance fts_from_json(const std::string& text);

struct ReferenceSolution {
  double f_star = 0.0;
  Vector x_star;
  /// "golden-section", "grid-refinement" or "log-barrier".
  std::string method;
  /// Upper bound on f(x_star) - f* (estimated for grid refinement).
  double certified_accuracy = 0.0;
};

/// Minimum of f over {x in Q : g(x) <= 0} for n <= 3 by methods that share
/// nothing with the switching solvers: golden section on the feasible
/// interval for n = 1, grid refinement for n = 2, 3. Q must be bounded.
/// Throws InfeasibleError when no feasible point is found.
ReferenceSolution reference_optimum(const ScalarFunction& f, const ScalarFunction& g,
                                    const FeasibleSet& set, Eigen::Index n, double accuracy);

/// Reference optimum of an FTS instance over {x in Q : max_i <alpha_i, x> <= 0}.
/// n <= 3 uses the routine above; larger n runs a log-barrier Newton method
/// on the smoothed objective (1/r) sum_k sqrt(|x - P_k|^2 + mu^2), whose
/// duality gap certifies the accuracy. Q must be a ball, a box or the whole
/// space. f* does not depend on the geometry.
ReferenceSolution reference_optimum(const FTSInstance& inst, const FeasibleSet& set,
                                    double accuracy);

}  // namespace relmd
