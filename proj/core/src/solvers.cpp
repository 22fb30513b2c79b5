#include "relmd/solvers.hpp"

#include "switching.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace relmd {

namespace detail {

void validate(const SolverConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    throw ConfigError("solver: epsilon must be positive");
  }
  if (!(cfg.delta >= 0.0)) throw ConfigError("solver: delta must be nonnegative");
  if (!(cfg.M_f > 0.0) || !(cfg.M_g > 0.0)) throw ConfigError("solver: M_f and M_g must be positive");
  for (double m : cfg.M_g_pieces) {
    if (!(m > 0.0)) throw ConfigError("solver: per-constraint constants must be positive");
  }
  if (!(cfg.theta0_sq > 0.0)) throw ConfigError("solver: theta0_sq must be positive");
  if (cfg.max_iterations && *cfg.max_iterations == 0) {
    throw ConfigError("solver: max_iterations must be positive");
  }
}

Vector starting_point(const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg) {
  if (cfg.x0) {
    require_finite(*cfg.x0, "x0");
    if (!set.contains(*cfg.x0, 1e-12)) throw ConfigError("solver: x0 lies outside Q");
    return *cfg.x0;
  }
  Eigen::Index n = set.dimension();
  if (n < 0) n = cfg.dimension;
  if (n < 1) throw ConfigError("solver: dimension unknown; set x0 or SolverConfig::dimension");
  return argmin_reference(geom, set, n);
}

std::size_t iteration_cap(const SolverConfig& cfg, double lipschitz) {
  if (cfg.max_iterations) return *cfg.max_iterations;
  return 10 * relative_v2_iteration_bound(cfg.theta0_sq, cfg.epsilon, lipschitz);
}

RunReport run_switching(const ConvexFunction& f, std::span<const ConvexFunction> constraints,
                        const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg,
                        const SwitchingRule& rule) {
  if (constraints.empty()) throw ConfigError("solver: at least one constraint required");
  const auto started = std::chrono::steady_clock::now();

  Vector x = starting_point(geom, set, cfg);
  if (cfg.reference_point) require_same_dimension(*cfg.reference_point, x, "reference point");

  RunReport report;
  StepLedger& ledger = report.ledger;
  LemmaAudit& audit = report.lemma;
  audit.worst_slack = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> per_constraint(constraints.size(), 0);
  std::vector<double> piece_values(constraints.size());
  Vector sum = Vector::Zero(x.size());

  for (std::size_t k = 0;; ++k) {
    if (k >= rule.max_iterations) {
      throw BudgetExceeded("solver: stopping rule not met after " + std::to_string(k) +
                               " iterations",
                           std::move(ledger));
    }

    double g_value = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < constraints.size(); ++p) {
      piece_values[p] = constraints[p].value(x);
      g_value = std::max(g_value, piece_values[p]);
    }

    StepRecord rec;
    rec.index = k;
    rec.constraint_value = g_value;
    if (cfg.reference_point) {
      rec.divergence_to_reference = bregman_divergence(geom, *cfg.reference_point, x);
    }

    const ConvexFunction* driver = &f;
    LinearizedModel lin;
    if (g_value <= rule.threshold) {
      rec.kind = StepKind::productive;
      rec.step_size = rule.objective_step;
      lin = rule.linearize_objective ? rule.linearize_objective(x, k) : f.model.linearize(x);
      ++ledger.objective_subgradient_calls;
      if (cfg.record_objective) rec.objective_value = f.value(x);
      ledger.productive.push_back(k);
      sum += x;
    } else {
      std::size_t p = 0;
      while (!(piece_values[p] > rule.threshold)) ++p;
      rec.kind = StepKind::nonproductive;
      rec.step_size = rule.constraint_steps[p];
      rec.constraint_index = constraints.size() > 1 ? static_cast<int>(p) : -1;
      driver = &constraints[p];
      lin = rule.linearize_constraint ? rule.linearize_constraint(p, x, k)
                                      : constraints[p].model.linearize(x);
      ++ledger.constraint_subgradient_calls;
      ++per_constraint[p];
      ledger.nonproductive.push_back(k);
    }

    Vector next = mirror_step(geom, set, x, rec.step_size, lin);

    if (cfg.reference_point) {
      const Vector& y = *cfg.reference_point;
      const InexactModel& model = driver->model;
      const double h = rec.step_size;
      const double lhs = h * (driver->value(x) - driver->value(y));
      const double rhs = model.phi_conjugate(h) + bregman_divergence(geom, y, x) -
                         bregman_divergence(geom, y, next) + h * model.delta;
      ++audit.checked;
      audit.worst_slack = std::min(audit.worst_slack, rhs - lhs);
      if (lhs > rhs + 1e-9) ++audit.violations;
    }

    ledger.steps.push_back(std::move(rec));
    x = std::move(next);

    const StepCounts counts{ledger.productive.size(), ledger.nonproductive.size(), &per_constraint};
    if (rule.stop(counts)) break;
  }

  if (ledger.productive.empty()) {
    throw NoProductiveSteps("solver: stopping rule met with no productive steps", std::move(ledger));
  }
  if (audit.checked == 0) audit.worst_slack = 0.0;

  report.x_hat = sum / static_cast<double>(ledger.productive.size());
  report.iterations = ledger.steps.size();
  report.guarantee = rule.guarantee;
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace detail

namespace {

std::vector<double> piece_constants(std::span<const ConvexFunction> constraints,
                                    const SolverConfig& cfg) {
  if (!cfg.M_g_pieces.empty()) {
    if (cfg.M_g_pieces.size() != constraints.size()) {
      throw ConfigError("solver: M_g_pieces size does not match number of constraints");
    }
    return cfg.M_g_pieces;
  }
  std::vector<double> out;
  out.reserve(constraints.size());
  for (const auto& c : constraints) {
    const auto m = c.model.phi.lipschitz();
    if (!m) throw ConfigError("solver: constraint model has no Lipschitz constant; set M_g_pieces");
    out.push_back(*m);
  }
  return out;
}

}  // namespace

std::size_t relative_v1_iterations(double theta0_sq, double epsilon) {
  return static_cast<std::size_t>(std::ceil(2.0 * theta0_sq / (epsilon * epsilon)));
}

std::size_t relative_v2_iteration_bound(double theta0_sq, double epsilon, double lipschitz) {
  return static_cast<std::size_t>(
      std::ceil(2.0 * lipschitz * lipschitz * theta0_sq / (epsilon * epsilon)));
}

RunReport solve_model_general(const ConvexFunction& f, const ConvexFunction& g,
                              const Geometry& geom, const FeasibleSet& set,
                              const SolverConfig& cfg) {
  detail::validate(cfg);
  if (!cfg.h_f || !cfg.h_g || !(*cfg.h_f > 0.0) || !(*cfg.h_g > 0.0)) {
    throw ConfigError("solve_model_general: h_f and h_g must be supplied and positive");
  }
  const double eps = cfg.epsilon;
  const double hf = *cfg.h_f;
  const double hg = *cfg.h_g;
  const double gain_f = eps * hf - f.model.phi_conjugate(hf);
  const double gain_g = eps * hg - g.model.phi_conjugate(hg);

  detail::SwitchingRule rule;
  rule.threshold = eps + cfg.delta;
  rule.objective_step = hf;
  rule.constraint_steps = {hg};
  rule.stop = [=, theta = cfg.theta0_sq](const detail::StepCounts& c) {
    const auto i = static_cast<double>(c.productive);
    const auto j = static_cast<double>(c.nonproductive);
    return theta <= j * gain_g + i * gain_f;
  };
  rule.guarantee = {eps + cfg.delta, eps + cfg.delta};
  rule.max_iterations = detail::iteration_cap(cfg, std::max(cfg.M_f, cfg.M_g));
  const ConvexFunction constraints[] = {g};
  return detail::run_switching(f, constraints, geom, set, cfg, rule);
}

RunReport solve_relative_v1(const ConvexFunction& f, const ConvexFunction& g,
                            const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg) {
  const ConvexFunction constraints[] = {g};
  SolverConfig single = cfg;
  single.M_g_pieces = {cfg.M_g};
  return solve_multi_v1(f, constraints, geom, set, single);
}

RunReport solve_relative_v2(const ConvexFunction& f, const ConvexFunction& g,
                            const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg) {
  const ConvexFunction constraints[] = {g};
  SolverConfig single = cfg;
  single.M_g_pieces = {cfg.M_g};
  return solve_multi_v2(f, constraints, geom, set, single);
}

RunReport solve_multi_v1(const ConvexFunction& f, std::span<const ConvexFunction> constraints,
                         const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg) {
  detail::validate(cfg);
  const std::vector<double> m_pieces = piece_constants(constraints, cfg);
  const double eps = cfg.epsilon;
  const double m_g = *std::max_element(m_pieces.begin(), m_pieces.end());

  detail::SwitchingRule rule;
  rule.threshold = m_g * eps + cfg.delta;
  rule.objective_step = eps / cfg.M_f;
  for (double m : m_pieces) rule.constraint_steps.push_back(eps / m);
  const double target = 2.0 * cfg.theta0_sq / (eps * eps);
  rule.stop = [target](const detail::StepCounts& c) {
    return static_cast<double>(c.productive + c.nonproductive) >= target;
  };
  rule.guarantee = {cfg.M_f * eps + cfg.delta, m_g * eps + cfg.delta};
  const std::size_t needed = relative_v1_iterations(cfg.theta0_sq, eps);
  rule.max_iterations = std::max(detail::iteration_cap(cfg, std::max(cfg.M_f, m_g)), needed);
  return detail::run_switching(f, constraints, geom, set, cfg, rule);
}

RunReport solve_multi_v2(const ConvexFunction& f, std::span<const ConvexFunction> constraints,
                         const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg) {
  detail::validate(cfg);
  const std::vector<double> m_pieces = piece_constants(constraints, cfg);
  const double eps = cfg.epsilon;
  const double m_f = cfg.M_f;

  detail::SwitchingRule rule;
  rule.threshold = eps + cfg.delta;
  rule.objective_step = eps / (m_f * m_f);
  std::vector<double> inv_sq;
  for (double m : m_pieces) {
    rule.constraint_steps.push_back(eps / (m * m));
    inv_sq.push_back(1.0 / (m * m));
  }
  const double target = 2.0 * cfg.theta0_sq / (eps * eps);
  rule.stop = [target, inv_sq, m_f](const detail::StepCounts& c) {
    double weight = static_cast<double>(c.productive) / (m_f * m_f);
    for (std::size_t p = 0; p < inv_sq.size(); ++p) {
      weight += static_cast<double>((*c.per_constraint)[p]) * inv_sq[p];
    }
    return target <= weight;
  };
  rule.guarantee = {eps + cfg.delta, eps + cfg.delta};
  const double m_max = std::max(m_f, *std::max_element(m_pieces.begin(), m_pieces.end()));
  rule.max_iterations = detail::iteration_cap(cfg, m_max);
  return detail::run_switching(f, constraints, geom, set, cfg, rule);
}

void write_trace(std::ostream& os, const StepLedger& ledger) {
  char buf[128];
  for (const StepRecord& s : ledger.steps) {
    std::snprintf(buf, sizeof buf, "%zu,%c,%.17g,%.17g", s.index,
                  s.kind == StepKind::productive ? 'P' : 'N', s.step_size, s.constraint_value);
    os << buf;
    if (s.divergence_to_reference) {
      std::snprintf(buf, sizeof buf, ",%.17g", *s.divergence_to_reference);
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace relmd
