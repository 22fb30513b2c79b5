#include "relmd/problems.hpp"

#include "relmd/errors.hpp"
#include "relmd/random.hpp"

#include <json.hpp>

#include <cmath>
#include <memory>

namespace relmd {

OracleValue fts_objective(const FTSInstance& inst, const Vector& x) {
  if (x.size() != inst.n()) throw DomainError("fts_objective: dimension mismatch");
  OracleValue out{0.0, Vector::Zero(x.size())};
  for (Eigen::Index k = 0; k < inst.r(); ++k) {
    const Vector d = x - inst.points.col(k);
    const double dist = d.norm();
    out.value += dist;
    if (dist > 0.0) out.subgradient += d / dist;
  }
  const double r = static_cast<double>(inst.r());
  out.value /= r;
  out.subgradient /= r;
  return out;
}

MaxLinearValue max_linear_constraint(const FTSInstance& inst, const Vector& x) {
  if (x.size() != inst.n()) throw DomainError("max_linear_constraint: dimension mismatch");
  const Vector v = inst.rows * x;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return MaxLinearValue{v[best], inst.rows.row(best).transpose(), best};
}

FTSInstance generate_fts(Eigen::Index n, Eigen::Index r, Eigen::Index m, std::uint64_t seed) {
  if (n < 1 || r < 1 || m < 1) throw ConfigError("generate_fts: n, r, m must be positive");
  KeyedStream rng(seed);
  FTSInstance inst;
  inst.seed = seed;
  inst.points.resize(n, r);
  inst.rows.resize(m, n);
  for (Eigen::Index k = 0; k < r; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) inst.points(j, k) = rng.normal(1.0, 2.0);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) inst.rows(i, j) = rng.normal(1.0, 2.0);
  }
  return inst;
}

void validate(const FTSInstance& inst) {
  if (inst.n() < 1 || inst.r() < 1 || inst.m() < 1) throw DomainError("FTS instance: empty");
  if (inst.rows.cols() != inst.n()) throw DomainError("FTS instance: rows have wrong dimension");
  if (!inst.points.allFinite() || !inst.rows.allFinite()) {
    throw DomainError("FTS instance: non-finite coordinate");
  }
}

ConvexFunction fts_function(const FTSInstance& inst) {
  validate(inst);
  auto shared = std::make_shared<const FTSInstance>(inst);
  ConvexFunction fn;
  fn.value = [shared](const Vector& x) { return fts_objective(*shared, x).value; };
  fn.model = linear_model([shared](const Vector& x) { return fts_objective(*shared, x).subgradient; },
                          1.0);
  return fn;
}

double max_row_dual_norm(const FTSInstance& inst, const Geometry& geom) {
  double M = 0.0;
  for (Eigen::Index i = 0; i < inst.m(); ++i) {
    M = std::max(M, geom.dual_norm(inst.rows.row(i).transpose()));
  }
  return M;
}

ConvexFunction max_linear_function(const FTSInstance& inst, const Geometry& geom) {
  validate(inst);
  auto shared = std::make_shared<const FTSInstance>(inst);
  ConvexFunction fn;
  fn.value = [shared](const Vector& x) { return max_linear_constraint(*shared, x).value; };
  fn.model = linear_model(
      [shared](const Vector& x) { return max_linear_constraint(*shared, x).subgradient; },
      max_row_dual_norm(inst, geom));
  return fn;
}

std::vector<ConvexFunction> linear_pieces(const FTSInstance& inst, const Geometry& geom) {
  validate(inst);
  std::vector<ConvexFunction> out;
  out.reserve(static_cast<std::size_t>(inst.m()));
  for (Eigen::Index i = 0; i < inst.m(); ++i) {
    out.push_back(affine_function(inst.rows.row(i).transpose(), 0.0, geom));
  }
  return out;
}

ConvexFunction shifted_abs(double c) {
  ConvexFunction fn;
  fn.value = [c](const Vector& x) { return std::abs(x[0] - c); };
  fn.model = linear_model(
      [c](const Vector& x) {
        Vector s = Vector::Zero(x.size());
        s[0] = x[0] > c ? 1.0 : (x[0] < c ? -1.0 : 0.0);
        return s;
      },
      1.0);
  return fn;
}

ConvexFunction affine_function(Vector a, double b, const Geometry& geom) {
  require_finite(a, "affine_function");
  const double M = geom.dual_norm(a);
  ConvexFunction fn;
  fn.value = [a, b](const Vector& x) { return a.dot(x) + b; };
  fn.model = linear_model([a](const Vector&) { return a; }, M > 0.0 ? M : 1.0);
  return fn;
}

std::string fts_to_json(const FTSInstance& inst) {
  using nlohmann::json;
  json j;
  j["n"] = inst.n();
  j["r"] = inst.r();
  j["m"] = inst.m();
  j["seed"] = inst.seed;
  json points = json::array();
  for (Eigen::Index k = 0; k < inst.r(); ++k) {
    points.push_back(std::vector<double>(inst.points.col(k).data(),
                                         inst.points.col(k).data() + inst.n()));
  }
  json rows = json::array();
  for (Eigen::Index i = 0; i < inst.m(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(inst.n()));
    for (Eigen::Index c = 0; c < inst.n(); ++c) row[static_cast<std::size_t>(c)] = inst.rows(i, c);
    rows.push_back(std::move(row));
  }
  j["points"] = std::move(points);
  j["rows"] = std::move(rows);
  return j.dump();
}

FTSInstance fts_from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("FTS instance JSON: ") + e.what());
  }
  try {
    const auto n = j.at("n").get<Eigen::Index>();
    const auto r = j.at("r").get<Eigen::Index>();
    const auto m = j.at("m").get<Eigen::Index>();
    const auto& points = j.at("points");
    const auto& rows = j.at("rows");
    if (n < 1 || r < 1 || m < 1 || points.size() != static_cast<std::size_t>(r) ||
        rows.size() != static_cast<std::size_t>(m)) {
      throw DomainError("FTS instance JSON: inconsistent sizes");
    }
    FTSInstance inst;
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.points.resize(n, r);
    inst.rows.resize(m, n);
    for (Eigen::Index k = 0; k < r; ++k) {
      const auto p = points[static_cast<std::size_t>(k)].get<std::vector<double>>();
      if (p.size() != static_cast<std::size_t>(n)) throw DomainError("FTS instance JSON: bad point");
      for (Eigen::Index c = 0; c < n; ++c) inst.points(c, k) = p[static_cast<std::size_t>(c)];
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto a = rows[static_cast<std::size_t>(i)].get<std::vector<double>>();
      if (a.size() != static_cast<std::size_t>(n)) throw DomainError("FTS instance JSON: bad row");
      for (Eigen::Index c = 0; c < n; ++c) inst.rows(i, c) = a[static_cast<std::size_t>(c)];
    }
    validate(inst);
    return inst;
  } catch (const json::exception& e) {
    throw DomainError(std::string("FTS instance JSON: ") + e.what());
  }
}

}  // namespace relmd
