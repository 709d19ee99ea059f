#include "garagemon/localization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <utility>

#include <json.hpp>

#include "garagemon/errors.hpp"
#include "garagemon/solvers.hpp"

namespace garagemon::localization {

namespace {

constexpr double kCollinearTolerance = 1e-9;
constexpr int kIterativeMaxSweeps = 2000;

nlohmann::json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace

PathLossModel::PathLossModel(double exponent) : exponent_(exponent) {
  if (!(exponent >= 1.0 && exponent <= 6.0))
    throw InputError("path-loss exponent must be in [1, 6], got " + std::to_string(exponent));
}

EstimateMethod parse_estimate_method(std::string_view name) {
  if (name == "gauss") return EstimateMethod::gauss;
  if (name == "jacobi") return EstimateMethod::jacobi;
  if (name == "gauss-seidel") return EstimateMethod::gauss_seidel;
  if (name == "least-squares") return EstimateMethod::least_squares;
  throw ConfigError("unknown estimate method: '" + std::string(name) +
                    "' (expected gauss, jacobi, gauss-seidel or least-squares)");
}

std::string_view estimate_method_name(EstimateMethod method) {
  switch (method) {
    case EstimateMethod::gauss:
      return "gauss";
    case EstimateMethod::jacobi:
      return "jacobi";
    case EstimateMethod::gauss_seidel:
      return "gauss-seidel";
    case EstimateMethod::least_squares:
      return "least-squares";
  }
  return "?";
}

double rssi_to_distance(const RssiReading& reading, const Beacon& beacon,
                        const PathLossModel& model) {
  if (reading.beacon_id != beacon.id)
    throw IdentityError("reading for beacon '" + reading.beacon_id +
                        "' paired with beacon '" + beacon.id + "'");
  if (!std::isfinite(reading.rssi_dbm))
    throw InputError("rssi reading for beacon '" + beacon.id + "' is not finite");
  return std::pow(10.0, (beacon.tx_power_dbm - reading.rssi_dbm) / (10.0 * model.exponent()));
}

LinearSystem build_trilateration_system(const std::vector<Beacon>& beacons,
                                        const std::vector<double>& distances) {
  const std::size_t k = beacons.size();
  if (k < 3) throw DimensionError("trilateration needs at least 3 beacons, got " +
                                  std::to_string(k));
  if (distances.size() != k)
    throw DimensionError("trilateration: " + std::to_string(k) + " beacons but " +
                         std::to_string(distances.size()) + " distances");
  for (double d : distances)
    if (!(d >= 0.0) || !std::isfinite(d))
      throw InputError("trilateration: distances must be finite and >= 0");

  Matrix a(k, 2);
  std::vector<double> rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = (i + 1) % k;
    const Vec2 pi = beacons[i].position;
    const Vec2 pj = beacons[j].position;
    a(i, 0) = pi.x - pj.x;
    a(i, 1) = pi.y - pj.y;
    rhs[i] = (distances[j] * distances[j] - distances[i] * distances[i] + dot(pi, pi) -
              dot(pj, pj)) /
             2.0;
  }

  // Degenerate when every pair of rows is parallel (sin of the angle
  // between them below tolerance); zero rows are parallel to everything.
  bool any_independent = false;
  for (std::size_t i = 0; i < k && !any_independent; ++i) {
    for (std::size_t j = i + 1; j < k && !any_independent; ++j) {
      const Vec2 u{a(i, 0), a(i, 1)};
      const Vec2 v{a(j, 0), a(j, 1)};
      const double scale = norm(u) * norm(v);
      if (scale > 0.0 && std::fabs(cross(u, v)) > kCollinearTolerance * scale)
        any_independent = true;
    }
  }
  if (!any_independent)
    throw DegenerateGeometryError("trilateration: beacon positions are collinear");

  // Cyclic construction: rows telescope to zero. Guard the invariant.
  double sx = 0.0, sy = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    sx += a(i, 0);
    sy += a(i, 1);
    scale = std::max({scale, std::fabs(a(i, 0)), std::fabs(a(i, 1))});
  }
  if (std::fabs(sx) > 1e-9 * scale || std::fabs(sy) > 1e-9 * scale)
    throw std::logic_error("trilateration rows do not sum to zero");

  return {std::move(a), std::move(rhs)};
}

PositionEstimate estimate_position(const std::vector<Beacon>& beacons,
                                   const std::vector<double>& distances,
                                   EstimateMethod method) {
  const LinearSystem system = build_trilateration_system(beacons, distances);
  const std::size_t k = system.rows();

  // 2x2 normal equations, accumulated in fixed row order.
  Matrix normal(2, 2);
  std::vector<double> b(2, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const double ax = system.a(i, 0);
    const double ay = system.a(i, 1);
    normal(0, 0) += ax * ax;
    normal(0, 1) += ax * ay;
    normal(1, 1) += ay * ay;
    b[0] += ax * system.y[i];
    b[1] += ay * system.y[i];
  }
  normal(1, 0) = normal(0, 1);
  const LinearSystem normal_system(normal, b);

  PositionEstimate estimate;
  std::vector<double> x;
  try {
    const bool iterative =
        method == EstimateMethod::jacobi || method == EstimateMethod::gauss_seidel;
    bool solved = false;
    if (iterative && solvers::is_diagonally_dominant(normal_system)) {
      const double tol = 1e-13 * std::max(1.0, std::hypot(b[0], b[1]));
      const solvers::SolveResult r =
          (method == EstimateMethod::jacobi)
              ? solvers::jacobi(normal_system, tol, kIterativeMaxSweeps)
              : solvers::gauss_seidel(normal_system, tol, kIterativeMaxSweeps);
      if (r.converged) {
        x = r.x;
        solved = true;
      }
    }
    if (!solved) {
      x = solvers::gauss_eliminate(normal_system).x;
      estimate.fell_back_to_direct = iterative;
    }
  } catch (const SingularMatrixError&) {
    throw DegenerateGeometryError("trilateration: normal equations are singular");
  }

  estimate.position = {x[0], x[1]};
  estimate.residual = residual_norm(system, x);
  estimate.beacons_used.reserve(k);
  for (const Beacon& beacon : beacons) estimate.beacons_used.push_back(beacon.id);
  return estimate;
}

PositionEstimate estimate_from_readings(const std::vector<Beacon>& deployment,
                                        const std::vector<RssiReading>& readings,
                                        const PathLossModel& model, EstimateMethod method) {
  std::map<std::string_view, std::pair<double, std::size_t>> sums;  // id -> (sum, count)
  for (const RssiReading& r : readings) {
    if (!std::isfinite(r.rssi_dbm))
      throw InputError("rssi reading for beacon '" + r.beacon_id + "' is not finite");
    const bool known = std::any_of(deployment.begin(), deployment.end(),
                                   [&](const Beacon& b) { return b.id == r.beacon_id; });
    if (!known) throw IdentityError("reading references unknown beacon '" + r.beacon_id + "'");
    auto& acc = sums[r.beacon_id];
    acc.first += r.rssi_dbm;
    acc.second += 1;
  }

  std::vector<Beacon> used;
  std::vector<double> distances;
  for (const Beacon& beacon : deployment) {
    const auto it = sums.find(beacon.id);
    if (it == sums.end()) continue;
    const double mean_rssi = it->second.first / static_cast<double>(it->second.second);
    used.push_back(beacon);
    distances.push_back(
        rssi_to_distance({beacon.id, mean_rssi, 0}, beacon, model));
  }
  if (used.size() < 3)
    throw DimensionError("localization needs readings for >= 3 distinct beacons, got " +
                         std::to_string(used.size()));
  return estimate_position(used, distances, method);
}

std::vector<RssiReading> strongest_readings(const std::vector<RssiReading>& readings,
                                            std::size_t k) {
  if (k == 0) return readings;
  std::vector<std::pair<std::string, std::pair<double, std::size_t>>> acc;  // id, (sum, count)
  for (const RssiReading& r : readings) {
    auto it = std::find_if(acc.begin(), acc.end(),
                           [&](const auto& e) { return e.first == r.beacon_id; });
    if (it == acc.end())
      acc.push_back({r.beacon_id, {r.rssi_dbm, 1}});
    else {
      it->second.first += r.rssi_dbm;
      it->second.second += 1;
    }
  }
  if (acc.size() <= k) return readings;

  std::stable_sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) {
    return a.second.first / static_cast<double>(a.second.second) >
           b.second.first / static_cast<double>(b.second.second);
  });
  acc.resize(k);

  std::vector<RssiReading> out;
  out.reserve(readings.size());
  for (const RssiReading& r : readings) {
    const bool keep = std::any_of(acc.begin(), acc.end(),
                                  [&](const auto& e) { return e.first == r.beacon_id; });
    if (keep) out.push_back(r);
  }
  return out;
}

std::vector<Beacon> load_beacons(const std::filesystem::path& path) {
  const nlohmann::json j = parse_json_file(path);
  if (!j.is_array()) throw ParseError(path.string() + ": expected a JSON array of beacons");
  std::vector<Beacon> beacons;
  beacons.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    try {
      Beacon b;
      b.id = e.at("id").get<std::string>();
      b.position = {e.at("x_m").get<double>(), e.at("y_m").get<double>()};
      b.tx_power_dbm = e.at("tx_power_dbm").get<double>();
      if (!std::isfinite(b.position.x) || !std::isfinite(b.position.y))
        throw ParseError(path.string() + ": beacon " + std::to_string(i) +
                         ": non-finite position");
      beacons.push_back(std::move(b));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(path.string() + ": beacon " + std::to_string(i) + ": " + ex.what());
    }
  }
  for (std::size_t i = 0; i < beacons.size(); ++i)
    for (std::size_t j2 = i + 1; j2 < beacons.size(); ++j2)
      if (beacons[i].id == beacons[j2].id)
        throw IntegrityError(path.string() + ": duplicate beacon id '" + beacons[i].id + "'");
  return beacons;
}

std::vector<RssiReading> load_readings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::vector<RssiReading> readings;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      RssiReading r;
      r.tick = j.at("tick").get<std::uint64_t>();
      r.beacon_id = j.at("beacon_id").get<std::string>();
      r.rssi_dbm = j.at("rssi_dbm").get<double>();
      readings.push_back(std::move(r));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return readings;
}

std::string to_json(const PositionEstimate& estimate) {
  nlohmann::json j{{"x", estimate.position.x},
                   {"y", estimate.position.y},
                   {"residual", estimate.residual},
                   {"beacons_used", estimate.beacons_used},
                   {"fell_back_to_direct", estimate.fell_back_to_direct}};
  return j.dump();
}

}  // namespace garagemon::localization
