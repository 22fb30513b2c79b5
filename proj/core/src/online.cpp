#include "relmd/online.hpp"

#include "switching.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace relmd {

double online_accuracy(double epsilon, double delta, double M, double theta0_sq, std::size_t N,
                       std::size_t nonproductive) {
  if (!(epsilon > 0.0) || N == 0) throw ConfigError("online_accuracy: need eps > 0 and N > 0");
  const double n = static_cast<double>(N);
  return static_cast<double>(nonproductive) / n * (-epsilon / 2.0) + (epsilon / 2.0 + delta) +
         M * M * theta0_sq / (n * epsilon);
}

double nonproductive_bound(double epsilon, double delta, double M, double theta0_sq,
                           std::size_t N) {
  if (!(epsilon > 0.0)) throw ConfigError("nonproductive_bound: eps must be positive");
  return static_cast<double>(N) * (1.0 + 2.0 * delta / epsilon) +
         2.0 * M * M * theta0_sq / (epsilon * epsilon);
}

OnlineReport solve_online(const OnlineStream& stream, const ConvexFunction& g,
                          const Geometry& geom, const FeasibleSet& set, const SolverConfig& cfg) {
  detail::validate(cfg);
  if (stream.rounds == 0) throw ConfigError("solve_online: N must be positive");
  if (!stream.next_objective) throw ConfigError("solve_online: stream has no objectives");
  if (!(stream.M > 0.0)) throw ConfigError("solve_online: stream M must be positive");
  const auto started = std::chrono::steady_clock::now();

  const double eps = cfg.epsilon;
  const double M = std::max(stream.M, cfg.M_g);
  const double h = eps / (M * M);
  const double cap =
      2.0 * nonproductive_bound(eps, cfg.delta, M, cfg.theta0_sq, stream.rounds) + 100.0;

  OnlineReport report;
  report.M = M;
  StepLedger& ledger = report.ledger;
  Vector x = detail::starting_point(geom, set, cfg);

  for (std::size_t k = 0; report.played.size() < stream.rounds; ++k) {
    StepRecord rec;
    rec.index = k;
    rec.step_size = h;
    rec.constraint_value = g.value(x);

    LinearizedModel lin;
    if (rec.constraint_value <= eps + cfg.delta) {
      const std::size_t round = report.played.size();
      ConvexFunction fi = stream.next_objective(round, report.played);
      rec.kind = StepKind::productive;
      rec.objective_value = fi.value(x);
      lin = fi.model.linearize(x);
      ++ledger.objective_subgradient_calls;
      ledger.productive.push_back(k);
      report.played.push_back(x);
      report.round_values.push_back(*rec.objective_value);
      report.round_constraint_values.push_back(rec.constraint_value);
      report.objectives.push_back(std::move(fi));
    } else {
      if (static_cast<double>(ledger.nonproductive.size()) >= cap) {
        throw BudgetExceeded("solve_online: " + std::to_string(ledger.nonproductive.size()) +
                                 " non-productive steps; M or theta0_sq is misspecified",
                             std::move(ledger));
      }
      rec.kind = StepKind::nonproductive;
      lin = g.model.linearize(x);
      ++ledger.constraint_subgradient_calls;
      ledger.nonproductive.push_back(k);
    }

    Vector next = mirror_step(geom, set, x, h, lin);
    report.iterates.push_back(std::move(x));
    ledger.steps.push_back(std::move(rec));
    x = std::move(next);
  }

  report.nonproductive = ledger.nonproductive.size();
  report.kappa =
      online_accuracy(eps, cfg.delta, M, cfg.theta0_sq, stream.rounds, report.nonproductive);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

Comparator offline_comparator(const OnlineReport& report, const ConvexFunction& g,
                              const Geometry& geom, const FeasibleSet& set,
                              const SolverConfig& cfg, double accuracy) {
  if (report.objectives.empty()) throw ConfigError("offline_comparator: empty report");
  if (!(accuracy > 0.0)) throw ConfigError("offline_comparator: accuracy must be positive");

  const auto& fs = report.objectives;
  const double n = static_cast<double>(fs.size());
  ConvexFunction avg;
  avg.value = [&fs, n](const Vector& x) {
    double s = 0.0;
    for (const ConvexFunction& f : fs) s += f.value(x);
    return s / n;
  };
  avg.model = linear_model(
      [&fs, n](const Vector& x) {
        Vector s = Vector::Zero(x.size());
        for (const ConvexFunction& f : fs) {
          const LinearizedModel lin = f.model.linearize(x);
          if (lin.composite) throw ConfigError("offline_comparator: composite objectives unsupported");
          s += lin.slope;
        }
        return Vector(s / n);
      },
      report.M);

  SolverConfig inner = cfg;
  inner.epsilon = accuracy;
  inner.delta = 0.0;
  inner.M_f = report.M;
  inner.M_g = std::max(cfg.M_g, 1e-300);
  inner.M_g_pieces.clear();
  inner.reference_point.reset();
  inner.record_objective = false;
  inner.max_iterations.reset();

  const RunReport run = solve_relative_v2(avg, g, geom, set, inner);
  return Comparator{run.x_hat, avg.value(run.x_hat)};
}

double average_regret(const OnlineReport& report, double comparator_value) {
  if (report.round_values.empty()) throw ConfigError("average_regret: empty report");
  double s = 0.0;
  for (double v : report.round_values) s += v;
  return s / static_cast<double>(report.round_values.size()) - comparator_value;
}

void write_online_trace(std::ostream& os, const OnlineReport& report) {
  char buf[64];
  std::size_t rounds = 0;
  std::size_t j = 0;
  for (std::size_t k = 0; k < report.ledger.steps.size(); ++k) {
    const StepRecord& rec = report.ledger.steps[k];
    const bool productive = rec.kind == StepKind::productive;
    if (productive) {
      ++rounds;
    } else {
      ++j;
    }
    std::snprintf(buf, sizeof buf, "%zu,%c,%.17g,", rounds, productive ? 'P' : 'N',
                  rec.constraint_value);
    os << buf;
    if (rec.objective_value) {
      std::snprintf(buf, sizeof buf, "%.17g", *rec.objective_value);
      os << buf;
    }
    os << ',' << j << ',';
    const Vector& x = report.iterates[k];
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.17g", i ? " " : "", x[i]);
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace relmd
