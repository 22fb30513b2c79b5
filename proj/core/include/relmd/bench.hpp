#pragma once

#include "relmd/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relmd {

enum class Algorithm { alg1, alg2, alg2mod, multi_v1, multi_v2, stochastic, online };

/// Parses "alg1", "alg2", "alg2mod", "multi-v1", "multi-v2", "stochastic", "online".
Algorithm parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm a);

Geometry parse_geometry(std::string_view name);
/// "unit-ball", "whole", "box" ([-1, 1]^n) or "simplex".
FeasibleSet parse_set(std::string_view name, Eigen::Index n);

struct BenchConfig {
  Algorithm algorithm = Algorithm::alg2;
  std::vector<double> epsilons;
  double delta = 0.0;
  Eigen::Index n = 100;
  Eigen::Index r = 50;
  Eigen::Index m = 10;
  std::uint64_t seed = 0;
  double theta0_sq = 2.0;
  std::string geometry = "euclidean";
  std::string set = "unit-ball";
  /// Start from (1/sqrt(n), ..., 1/sqrt(n)) instead of argmin_Q d.
  bool uniform_start = false;
  /// Stochastic: independent trials per epsilon and the dual norm of the
  /// objective noise.
  std::size_t trials = 10;
  double noise = 1.0;
  /// Online: number of rounds N.
  std::size_t rounds = 200;
  /// When set, every step of every run is appended as `k,P|N,h,g`.
  std::ostream* trace = nullptr;
};

struct BenchRow {
  double inv_eps = 0.0;
  std::size_t iterations = 0;
  double wall_time_seconds = 0.0;
  double f_best = 0.0;
  double g_out = 0.0;
  std::size_t productive = 0;
  std::size_t nonproductive = 0;
  std::optional<std::string> error;

  bool operator==(const BenchRow&) const = default;
};

/// One row per epsilon on the seeded FTS instance (generated once). A solver
/// failure is stored in the row's `error` and the remaining epsilons still run.
///
/// Stochastic rows sum iterations and step counts over trials, report the mean
/// f(x_hat) and the largest g(x_hat). Online rows play rounds whose objective
/// is |x - P_(i mod r)|_2 and report f and g at the mean played iterate, with
/// iterations = N + |J|.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

enum class ReportFormat { csv, json };

ReportFormat parse_format(std::string_view name);

/// CSV: header `inv_eps,iter,time_sec,f_best,g_out,productive,nonproductive`,
/// 6 decimals for time, f_best and g_out; failed rows read
/// `inv_eps,ERROR,,,,,`. JSON: array of objects with the same keys at full
/// precision plus "error" on failed rows.
void emit_report(std::ostream& os, const std::vector<BenchRow>& rows, ReportFormat format);

std::vector<BenchRow> parse_report_json(const std::string& text);

}  // namespace relmd
