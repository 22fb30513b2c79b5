#include "relmd/bench.hpp"

#include "relmd/errors.hpp"
#include "relmd/online.hpp"
#include "relmd/problems.hpp"
#include "relmd/solvers.hpp"
#include "relmd/stochastic.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace relmd {

namespace {

struct Setup {
  FTSInstance instance;
  Geometry geometry = Geometry::euclidean();
  FeasibleSet set = FeasibleSet::whole_space();
  ConvexFunction f;
  ConvexFunction g;
  double M_g = 1.0;
};

SolverConfig solver_config(const BenchConfig& bc, const Setup& s, double eps) {
  SolverConfig cfg;
  cfg.epsilon = eps;
  cfg.delta = bc.delta;
  cfg.M_f = 1.0;
  cfg.M_g = s.M_g;
  cfg.theta0_sq = bc.theta0_sq;
  cfg.dimension = bc.n;
  if (bc.uniform_start) cfg.x0 = Vector::Constant(bc.n, 1.0 / std::sqrt(static_cast<double>(bc.n)));
  return cfg;
}

BenchRow row_from_report(const Setup& s, const RunReport& r) {
  BenchRow row;
  row.iterations = r.iterations;
  row.wall_time_seconds = r.wall_time_seconds;
  row.f_best = s.f.value(r.x_hat);
  row.g_out = s.g.value(r.x_hat);
  row.productive = r.ledger.productive.size();
  row.nonproductive = r.ledger.nonproductive.size();
  return row;
}

BenchRow run_one(const BenchConfig& bc, const Setup& s, double eps) {
  const SolverConfig cfg = solver_config(bc, s, eps);
  const auto traced = [&](const RunReport& r) {
    if (bc.trace) write_trace(*bc.trace, r.ledger);
    return row_from_report(s, r);
  };

  switch (bc.algorithm) {
    case Algorithm::alg1: {
      SolverConfig c = cfg;
      const double M = std::max(c.M_f, c.M_g);
      c.h_f = eps / (M * M);
      c.h_g = eps / (M * M);
      return traced(solve_model_general(s.f, s.g, s.geometry, s.set, c));
    }
    case Algorithm::alg2:
      return traced(solve_relative_v1(s.f, s.g, s.geometry, s.set, cfg));
    case Algorithm::alg2mod:
      return traced(solve_relative_v2(s.f, s.g, s.geometry, s.set, cfg));
    case Algorithm::multi_v1:
    case Algorithm::multi_v2: {
      const std::vector<ConvexFunction> pieces = linear_pieces(s.instance, s.geometry);
      return traced(bc.algorithm == Algorithm::multi_v1
                        ? solve_multi_v1(s.f, pieces, s.geometry, s.set, cfg)
                        : solve_multi_v2(s.f, pieces, s.geometry, s.set, cfg));
    }
    case Algorithm::stochastic: {
      if (bc.trials == 0) throw ConfigError("bench: trials must be positive");
      const auto inst = std::make_shared<const FTSInstance>(s.instance);
      StochasticOracle fo = rademacher_noise_oracle(
          s.f.value, [inst](const Vector& x) { return fts_objective(*inst, x).subgradient; }, 1.0,
          bc.noise, s.geometry, bc.seed);
      StochasticOracle go = rademacher_noise_oracle(
          s.g.value,
          [inst](const Vector& x) { return max_linear_constraint(*inst, x).subgradient; }, s.M_g,
          0.0, s.geometry, bc.seed);
      SolverConfig c = cfg;
      c.h_f = eps / (fo.M * fo.M);
      c.h_g = eps / (go.M * go.M);
      BenchRow row;
      row.g_out = -std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < bc.trials; ++t) {
        const RunReport r = solve_stochastic(fo, go, s.geometry, s.set, c, t);
        if (bc.trace) write_trace(*bc.trace, r.ledger);
        const BenchRow one = row_from_report(s, r);
        row.iterations += one.iterations;
        row.productive += one.productive;
        row.nonproductive += one.nonproductive;
        row.wall_time_seconds += one.wall_time_seconds;
        row.f_best += one.f_best / static_cast<double>(bc.trials);
        row.g_out = std::max(row.g_out, one.g_out);
      }
      return row;
    }
    case Algorithm::online: {
      const auto inst = std::make_shared<const FTSInstance>(s.instance);
      OnlineStream stream;
      stream.rounds = bc.rounds;
      stream.M = 1.0;
      stream.next_objective = [inst](std::size_t round, std::span<const Vector>) {
        const Vector p = inst->points.col(static_cast<Eigen::Index>(round) % inst->r());
        ConvexFunction fi;
        fi.value = [p](const Vector& x) { return (x - p).norm(); };
        fi.model = linear_model(
            [p](const Vector& x) {
              const Vector d = x - p;
              const double n = d.norm();
              return n > 0.0 ? Vector(d / n) : Vector(Vector::Zero(x.size()));
            },
            1.0);
        return fi;
      };
      const OnlineReport r = solve_online(stream, s.g, s.geometry, s.set, cfg);
      if (bc.trace) write_trace(*bc.trace, r.ledger);
      Vector mean = Vector::Zero(bc.n);
      for (const Vector& x : r.played) mean += x;
      mean /= static_cast<double>(r.played.size());
      BenchRow row;
      row.iterations = r.ledger.total();
      row.wall_time_seconds = r.wall_time_seconds;
      row.f_best = s.f.value(mean);
      row.g_out = s.g.value(mean);
      row.productive = r.played.size();
      row.nonproductive = r.nonproductive;
      return row;
    }
  }
  throw ConfigError("bench: unknown algorithm");
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  if (name == "alg1") return Algorithm::alg1;
  if (name == "alg2") return Algorithm::alg2;
  if (name == "alg2mod") return Algorithm::alg2mod;
  if (name == "multi-v1") return Algorithm::multi_v1;
  if (name == "multi-v2") return Algorithm::multi_v2;
  if (name == "stochastic") return Algorithm::stochastic;
  if (name == "online") return Algorithm::online;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::alg1: return "alg1";
    case Algorithm::alg2: return "alg2";
    case Algorithm::alg2mod: return "alg2mod";
    case Algorithm::multi_v1: return "multi-v1";
    case Algorithm::multi_v2: return "multi-v2";
    case Algorithm::stochastic: return "stochastic";
    case Algorithm::online: return "online";
  }
  return "?";
}

Geometry parse_geometry(std::string_view name) {
  if (name == "euclidean") return Geometry::euclidean();
  if (name == "entropy") return Geometry::entropy();
  throw ConfigError("unknown geometry '" + std::string(name) + "'");
}

FeasibleSet parse_set(std::string_view name, Eigen::Index n) {
  if (name == "unit-ball") return FeasibleSet::unit_ball(n);
  if (name == "whole") return FeasibleSet::whole_space();
  if (name == "box") return FeasibleSet::uniform_box(n, -1.0, 1.0);
  if (name == "simplex") return FeasibleSet::simplex(n);
  throw ConfigError("unknown feasible set '" + std::string(name) + "'");
}

ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw ConfigError("unknown format '" + std::string(name) + "'");
}

std::vector<BenchRow> run_bench(const BenchConfig& bc) {
  for (double eps : bc.epsilons) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("bench: epsilon values must be positive");
  }
  std::vector<BenchRow> rows;
  if (bc.epsilons.empty()) return rows;

  Setup s;
  s.instance = generate_fts(bc.n, bc.r, bc.m, bc.seed);
  s.geometry = parse_geometry(bc.geometry);
  s.set = parse_set(bc.set, bc.n);
  require_compatible(s.geometry, s.set);
  s.f = fts_function(s.instance);
  s.g = max_linear_function(s.instance, s.geometry);
  s.M_g = max_row_dual_norm(s.instance, s.geometry);

  for (double eps : bc.epsilons) {
    BenchRow row;
    try {
      row = run_one(bc, s, eps);
    } catch (const Error& e) {
      row = BenchRow{};
      row.error = e.what();
    }
    row.inv_eps = 1.0 / eps;
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_report(std::ostream& os, const std::vector<BenchRow>& rows, ReportFormat format) {
  if (format == ReportFormat::csv) {
    os << "inv_eps,iter,time_sec,f_best,g_out,productive,nonproductive\n";
    char buf[256];
    for (const BenchRow& r : rows) {
      if (r.error) {
        os << shortest(r.inv_eps) << ",ERROR,,,,,\n";
        continue;
      }
      std::snprintf(buf, sizeof buf, "%s,%zu,%.6f,%.6f,%.6f,%zu,%zu\n", shortest(r.inv_eps).c_str(),
                    r.iterations, r.wall_time_seconds, r.f_best, r.g_out, r.productive,
                    r.nonproductive);
      os << buf;
    }
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const BenchRow& r : rows) {
      nlohmann::json o;
      o["inv_eps"] = r.inv_eps;
      o["iter"] = r.iterations;
      o["time_sec"] = r.wall_time_seconds;
      o["f_best"] = r.f_best;
      o["g_out"] = r.g_out;
      o["productive"] = r.productive;
      o["nonproductive"] = r.nonproductive;
      if (r.error) o["error"] = *r.error;
      arr.push_back(std::move(o));
    }
    os << arr.dump(2) << '\n';
  }
  if (!os) throw Error("emit_report: write failed");
}

std::vector<BenchRow> parse_report_json(const std::string& text) {
  std::vector<BenchRow> rows;
  try {
    for (const auto& o : nlohmann::json::parse(text)) {
      BenchRow r;
      r.inv_eps = o.at("inv_eps").get<double>();
      r.iterations = o.at("iter").get<std::size_t>();
      r.wall_time_seconds = o.at("time_sec").get<double>();
      r.f_best = o.at("f_best").get<double>();
      r.g_out = o.at("g_out").get<double>();
      r.productive = o.at("productive").get<std::size_t>();
      r.nonproductive = o.at("nonproductive").get<std::size_t>();
      if (o.contains("error")) r.error = o.at("error").get<std::string>();
      rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("report JSON: ") + e.what());
  }
  return rows;
}

}  // namespace relmd
