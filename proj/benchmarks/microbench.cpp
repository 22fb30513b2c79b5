#include "relmd/geometry.hpp"
#include "relmd/problems.hpp"
#include "relmd/solvers.hpp"

#include <benchmark/benchmark.h>

namespace {

using relmd::FeasibleSet;
using relmd::Geometry;
using relmd::LinearizedModel;
using relmd::Vector;

Vector positive_point(Eigen::Index n, double shift) {
  Vector x = Vector::LinSpaced(n, 1.0, 2.0).array() + shift;
  return x / x.sum();
}

void BM_BregmanEntropy(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Geometry geom = Geometry::entropy();
  const Vector x = positive_point(n, 0.0);
  const Vector y = positive_point(n, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(relmd::bregman_divergence(geom, y, x));
}
BENCHMARK(BM_BregmanEntropy)->Arg(10)->Arg(100)->Arg(1000);

void BM_MirrorStepEuclideanBall(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Geometry geom = Geometry::euclidean();
  const FeasibleSet set = FeasibleSet::unit_ball(n);
  const Vector x = Vector::Zero(n);
  const LinearizedModel model{Vector::Ones(n), nullptr};
  for (auto _ : state) benchmark::DoNotOptimize(relmd::mirror_step(geom, set, x, 0.5, model));
}
BENCHMARK(BM_MirrorStepEuclideanBall)->Arg(10)->Arg(100)->Arg(1000);

void BM_MirrorStepEuclideanSimplex(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Geometry geom = Geometry::euclidean();
  const FeasibleSet set = FeasibleSet::simplex(n);
  const Vector x = positive_point(n, 0.0);
  const LinearizedModel model{Vector::LinSpaced(n, -1.0, 1.0), nullptr};
  for (auto _ : state) benchmark::DoNotOptimize(relmd::mirror_step(geom, set, x, 0.5, model));
}
BENCHMARK(BM_MirrorStepEuclideanSimplex)->Arg(10)->Arg(100)->Arg(1000);

void BM_MirrorStepEntropySimplex(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Geometry geom = Geometry::entropy();
  const FeasibleSet set = FeasibleSet::simplex(n);
  const Vector x = positive_point(n, 0.0);
  const LinearizedModel model{Vector::LinSpaced(n, -1.0, 1.0), nullptr};
  for (auto _ : state) benchmark::DoNotOptimize(relmd::mirror_step(geom, set, x, 0.5, model));
}
BENCHMARK(BM_MirrorStepEntropySimplex)->Arg(10)->Arg(100)->Arg(1000);

void BM_MirrorStepNumeric(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Geometry geom = Geometry::entropy();
  const FeasibleSet set = FeasibleSet::simplex(n);
  const Vector x = positive_point(n, 0.0);
  const LinearizedModel model{Vector::LinSpaced(n, -1.0, 1.0), nullptr};
  for (auto _ : state) {
    benchmark::DoNotOptimize(relmd::mirror_step_numeric(geom, set, x, 0.5, model));
  }
}
BENCHMARK(BM_MirrorStepNumeric)->Arg(10)->Arg(100);

void BM_RelativeV2OnFTS(benchmark::State& state) {
  const double eps = 1.0 / static_cast<double>(state.range(0));
  const relmd::FTSInstance inst = relmd::generate_fts(100, 50, 10, 7);
  const Geometry geom = Geometry::euclidean();
  const FeasibleSet set = FeasibleSet::unit_ball(100);
  const relmd::ConvexFunction f = relmd::fts_function(inst);
  const relmd::ConvexFunction g = relmd::max_linear_function(inst, geom);
  relmd::SolverConfig cfg;
  cfg.epsilon = eps;
  cfg.M_f = 1.0;
  cfg.M_g = relmd::max_row_dual_norm(inst, geom);
  cfg.theta0_sq = 2.0;
  for (auto _ : state) {
    const relmd::RunReport r = relmd::solve_relative_v2(f, g, geom, set, cfg);
    benchmark::DoNotOptimize(r.x_hat.data());
    state.counters["iterations"] = static_cast<double>(r.iterations);
  }
}
BENCHMARK(BM_RelativeV2OnFTS)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
