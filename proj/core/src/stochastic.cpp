#include "relmd/stochastic.hpp"

#include "switching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <ostream>

namespace relmd {

namespace {

constexpr std::uint64_t kObjectiveStream = 0;
constexpr std::uint64_t kConstraintStream = 1;

ConvexFunction exact_view(const StochasticOracle& o) {
  // Only value and phi are consulted by the engine when sampling is overridden.
  ConvexFunction fn;
  fn.value = o.exact_value;
  fn.model.psi = [](const Vector&, const Vector&) { return 0.0; };
  fn.model.linearize = [](const Vector& x) { return LinearizedModel{Vector::Zero(x.size()), nullptr}; };
  fn.model.phi = PhiFunction::quadratic(o.M);
  return fn;
}

TrialResult run_trial(const StochasticProblem& problem, const SolverConfig& cfg,
                      std::size_t trial, std::uint64_t seed) {
  StochasticOracle f = problem.objective;
  StochasticOracle g = problem.constraint;
  f.seed = seed;
  g.seed = seed;

  TrialResult out;
  out.trial = trial;
  out.seed = seed;
  try {
    const RunReport r = solve_stochastic(f, g, problem.geometry, problem.set, cfg, trial);
    out.iterations = r.iterations;
    out.productive = r.ledger.productive.size();
    out.nonproductive = r.ledger.nonproductive.size();
    out.f_value = f.exact_value(r.x_hat);
    out.g_value = g.exact_value(r.x_hat);
    out.wall_time_seconds = r.wall_time_seconds;
  } catch (const RunError& e) {
    out.iterations = e.ledger().total();
    out.productive = e.ledger().productive.size();
    out.nonproductive = e.ledger().nonproductive.size();
    out.f_value = std::numeric_limits<double>::quiet_NaN();
    out.g_value = std::numeric_limits<double>::quiet_NaN();
    out.error = e.what();
  }
  return out;
}

}  // namespace

StochasticOracle rademacher_noise_oracle(ScalarFunction value, SubgradientOracle exact,
                                         double exact_lipschitz, double amplitude,
                                         const Geometry& geom, std::uint64_t seed) {
  if (!(exact_lipschitz > 0.0)) throw ConfigError("noise oracle: Lipschitz constant must be positive");
  if (!(amplitude >= 0.0)) throw ConfigError("noise oracle: amplitude must be nonnegative");
  StochasticOracle o;
  o.exact_value = std::move(value);
  o.M = exact_lipschitz + amplitude;
  o.seed = seed;
  if (amplitude == 0.0) {
    o.sample_subgradient = [exact](const Vector& x, KeyedStream&) { return exact(x); };
    return o;
  }
  o.sample_subgradient = [exact, amplitude, geom](const Vector& x, KeyedStream& rng) {
    Vector sigma(x.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) sigma[i] = rng.rademacher();
    return Vector(exact(x) + (amplitude / geom.dual_norm(sigma)) * sigma);
  };
  return o;
}

RunReport solve_stochastic(const StochasticOracle& f, const StochasticOracle& g,
                           const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg,
                           std::uint64_t trial) {
  detail::validate(cfg);
  if (!f.sample_subgradient || !g.sample_subgradient || !f.exact_value || !g.exact_value) {
    throw ConfigError("solve_stochastic: incomplete oracle");
  }
  if (!(f.M > 0.0) || !(g.M > 0.0)) throw ConfigError("solve_stochastic: oracle M must be positive");
  if (!cfg.h_f || !cfg.h_g || !(*cfg.h_f > 0.0) || !(*cfg.h_g > 0.0)) {
    throw ConfigError("solve_stochastic: h_f and h_g must be supplied and positive");
  }

  const ConvexFunction f_view = exact_view(f);
  const ConvexFunction g_view[] = {exact_view(g)};

  const double eps = cfg.epsilon;
  const double hf = *cfg.h_f;
  const double hg = *cfg.h_g;
  const double gain_f = eps * hf - f_view.model.phi_conjugate(hf);
  const double gain_g = eps * hg - g_view[0].model.phi_conjugate(hg);

  detail::SwitchingRule rule;
  rule.threshold = eps + cfg.delta;
  rule.objective_step = hf;
  rule.constraint_steps = {hg};
  rule.stop = [=, theta = cfg.theta0_sq](const detail::StepCounts& c) {
    return theta <= static_cast<double>(c.nonproductive) * gain_g +
                        static_cast<double>(c.productive) * gain_f;
  };
  rule.guarantee = {eps + cfg.delta, eps + cfg.delta};
  rule.max_iterations = detail::iteration_cap(cfg, std::max(f.M, g.M));
  rule.linearize_objective = [&f, trial](const Vector& x, std::size_t k) {
    KeyedStream rng(f.seed, trial, k, kObjectiveStream);
    return LinearizedModel{f.sample_subgradient(x, rng), nullptr};
  };
  rule.linearize_constraint = [&g, trial](std::size_t, const Vector& x, std::size_t k) {
    KeyedStream rng(g.seed, trial, k, kConstraintStream);
    return LinearizedModel{g.sample_subgradient(x, rng), nullptr};
  };
  return detail::run_switching(f_view, g_view, geom, set, cfg, rule);
}

ExpectedGapEstimate estimate_expected_gap(const StochasticProblem& problem,
                                          const SolverConfig& cfg, std::size_t trials,
                                          std::uint64_t seed, unsigned workers) {
  if (trials < 2) throw ConfigError("estimate_expected_gap: need at least two trials");
  detail::validate(cfg);

  ExpectedGapEstimate est;
  est.trials.resize(trials);
  workers = std::max(1u, workers);
  if (workers == 1) {
    for (std::size_t t = 0; t < trials; ++t) est.trials[t] = run_trial(problem, cfg, t, seed);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t t = w; t < trials; t += workers) {
          est.trials[t] = run_trial(problem, cfg, t, seed);
        }
      }));
    }
    for (auto& j : jobs) j.get();
  }

  std::vector<double> gaps;
  for (const TrialResult& r : est.trials) {
    if (r.error) {
      ++est.failures;
      continue;
    }
    gaps.push_back(r.f_value - problem.f_star);
    est.constraint_values.push_back(r.g_value);
  }
  if (gaps.size() < 2) {
    throw ConfigError("estimate_expected_gap: fewer than two trials succeeded (" +
                      std::to_string(est.failures) + " failed)");
  }

  const auto n = static_cast<double>(gaps.size());
  double mean = 0.0;
  for (double v : gaps) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : gaps) ss += (v - mean) * (v - mean);
  est.mean_gap = mean;
  est.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return est;
}

void write_trials_csv(std::ostream& os, std::span<const TrialResult> trials) {
  os << "trial,seed,N,I,J,f,g\n";
  char buf[256];
  for (const TrialResult& r : trials) {
    std::snprintf(buf, sizeof buf, "%zu,%llu,%zu,%zu,%zu,%.17g,%.17g\n", r.trial,
                  static_cast<unsigned long long>(r.seed), r.iterations, r.productive,
                  r.nonproductive, r.f_value, r.g_value);
    os << buf;
  }
}

}  // namespace relmd
