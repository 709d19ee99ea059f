#include "garagemon/garage.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "garagemon/errors.hpp"

namespace garagemon::garage {

namespace {

constexpr double kPatrolStepM = 0.125;
constexpr double kMinPathDistanceM = 0.1;
constexpr double kBaseConfidence = 90.0;
constexpr double kConfidencePenalty = 15.0;
constexpr double kConfidenceFloor = 20.0;
constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

char confusion_partner(char c) {
  switch (c) {
    case '0': return 'O';
    case 'O': return '0';
    case '1': return 'I';
    case 'I': return '1';
    case '8': return 'B';
    case 'B': return '8';
    case '5': return 'S';
    case 'S': return '5';
    default: return '\0';
  }
}

bool in_bounds(const GarageMap& map, Vec2 p) {
  return p.x >= 0.0 && p.x <= map.width_m && p.y >= 0.0 && p.y <= map.height_m;
}

// Positions along the polyline at multiples of the step, from the first
// waypoint to (at most) the last.
std::vector<Vec2> walk_route(const std::vector<Vec2>& route, double step) {
  std::vector<Vec2> points;
  if (route.empty()) return points;
  double total = 0.0;
  for (std::size_t i = 1; i < route.size(); ++i) total += distance(route[i - 1], route[i]);
  const auto ticks = static_cast<std::size_t>(std::floor(total / step)) + 1;
  points.reserve(ticks);
  for (std::size_t t = 0; t < ticks; ++t) {
    double s = static_cast<double>(t) * step;
    Vec2 pos = route.front();
    for (std::size_t i = 1; i < route.size(); ++i) {
      const double seg = distance(route[i - 1], route[i]);
      if (s <= seg || i == route.size() - 1) {
        const double f = (seg > 0.0) ? std::min(s, seg) / seg : 0.0;
        pos = route[i - 1] + f * (route[i] - route[i - 1]);
        break;
      }
      s -= seg;
    }
    points.push_back(pos);
  }
  return points;
}

}  // namespace

void validate_map(const GarageMap& map) {
  if (!(map.width_m > 0.0) || !(map.height_m > 0.0))
    throw InputError("garage map: width and height must be positive");
  for (std::size_t i = 0; i < map.stalls.size(); ++i) {
    const Stall& s = map.stalls[i];
    if (!(s.width_m > 0.0))
      throw InputError("garage map: stall '" + s.stall_id + "' has non-positive width");
    if (!in_bounds(map, s.center))
      throw InputError("garage map: stall '" + s.stall_id + "' is outside the map");
    for (std::size_t j = i + 1; j < map.stalls.size(); ++j)
      if (map.stalls[j].stall_id == s.stall_id)
        throw InputError("garage map: duplicate stall id '" + s.stall_id + "'");
  }
  for (std::size_t i = 0; i < map.beacons.size(); ++i)
    for (std::size_t j = i + 1; j < map.beacons.size(); ++j)
      if (map.beacons[j].id == map.beacons[i].id)
        throw InputError("garage map: duplicate beacon id '" + map.beacons[i].id + "'");
  for (const Vec2& p : map.route)
    if (!in_bounds(map, p))
      throw InputError("garage map: route waypoint outside the map");
}

GarageMap make_default_map(std::size_t stalls_per_row) {
  GarageMap map;
  const double margin = 1.0;
  map.width_m = 2.0 * margin + kDefaultStallWidthM * static_cast<double>(stalls_per_row);
  map.height_m = 8.0;  // wall-to-wall lane

  // Stall rows hug the walls; the patrol legs run 1.4 m in front of the
  // stall centers so detections bind within the 1.5 m threshold.
  const double row_a_y = 1.2;
  const double row_b_y = map.height_m - 1.2;
  for (std::size_t i = 0; i < stalls_per_row; ++i) {
    const double cx = margin + kDefaultStallWidthM * (static_cast<double>(i) + 0.5);
    char id[32];
    std::snprintf(id, sizeof id, "A-%02zu", i + 1);
    map.stalls.push_back({id, {cx, row_a_y}, kDefaultStallWidthM});
    std::snprintf(id, sizeof id, "B-%02zu", i + 1);
    map.stalls.push_back({id, {cx, row_b_y}, kDefaultStallWidthM});
  }

  // Wall beacons at every stall column, both walls.
  for (std::size_t i = 0; i <= stalls_per_row; ++i) {
    const double bx = margin + kDefaultStallWidthM * static_cast<double>(i);
    char id[32];
    std::snprintf(id, sizeof id, "W0-%02zu", i + 1);
    map.beacons.push_back({id, {bx, 0.0}, -59.0});
    std::snprintf(id, sizeof id, "W1-%02zu", i + 1);
    map.beacons.push_back({id, {bx, map.height_m}, -59.0});
  }

  // 1.0 m in front of the stall centers: ticks near a stall boundary fall
  // outside the 1.5 m bind threshold instead of flipping to the neighbor.
  const double leg_a_y = row_a_y + 1.0;
  const double leg_b_y = row_b_y - 1.0;
  map.route = {{margin + 0.5, leg_a_y},
               {map.width_m - margin - 0.5, leg_a_y},
               {map.width_m - margin - 0.5, leg_b_y},
               {margin + 0.5, leg_b_y}};

  validate_map(map);
  return map;
}

std::optional<std::string> stall_for_position(const GarageMap& map, Vec2 pos, double threshold) {
  if (!std::isfinite(pos.x) || !std::isfinite(pos.y))
    throw InputError("stall_for_position: position must be finite");
  const Stall* best = nullptr;
  double best_d = 0.0;
  for (const Stall& s : map.stalls) {
    const double d = distance(s.center, pos);
    if (d > threshold) continue;
    if (best == nullptr || d < best_d || (d == best_d && s.stall_id < best->stall_id)) {
      best = &s;
      best_d = d;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->stall_id;
}

std::vector<localization::RssiReading> simulate_rssi(const GarageMap& map, Vec2 pose,
                                                     const localization::PathLossModel& model,
                                                     double noise_sigma_db, Rng& rng,
                                                     std::uint64_t tick) {
  if (noise_sigma_db < 0.0) throw InputError("simulate_rssi: noise sigma must be >= 0");
  std::vector<localization::RssiReading> readings;
  readings.reserve(map.beacons.size());
  for (const localization::Beacon& b : map.beacons) {
    const double d = std::max(distance(pose, b.position), kMinPathDistanceM);
    const double rssi =
        b.tx_power_dbm - 10.0 * model.exponent() * std::log10(d) + rng.gaussian(0.0, noise_sigma_db);
    readings.push_back({b.id, rssi, tick});
  }
  return readings;
}

std::vector<localization::RssiReading> simulate_rssi(const GarageMap& map, Vec2 pose,
                                                     const localization::PathLossModel& model,
                                                     double noise_sigma_db, std::uint64_t seed,
                                                     std::uint64_t tick) {
  Rng rng(seed);
  return simulate_rssi(map, pose, model, noise_sigma_db, rng, tick);
}

plates::PlateCandidate corrupt_plate(const std::string& plate, double char_p, Rng& rng,
                                     std::uint64_t tick) {
  std::string out = plate;
  int corrupted = 0;
  for (char& c : out) {
    if (rng.uniform() >= char_p) continue;
    const char partner = confusion_partner(c);
    if (partner != '\0') {
      c = partner;
    } else {
      char repl = c;
      while (repl == c)
        repl = kAlphabet[static_cast<std::size_t>(rng.below(kAlphabet.size()))];
      c = repl;
    }
    ++corrupted;
  }
  const double confidence =
      std::max(kConfidenceFloor, kBaseConfidence - kConfidencePenalty * corrupted);
  return {out, confidence, tick};
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }

  Scenario sc;
  try {
    const auto& jm = j.at("map");
    sc.map.width_m = jm.at("width_m").get<double>();
    sc.map.height_m = jm.at("height_m").get<double>();
    for (const auto& js : jm.at("stalls")) {
      Stall s;
      s.stall_id = js.at("id").get<std::string>();
      s.center = {js.at("x_m").get<double>(), js.at("y_m").get<double>()};
      if (js.contains("width_m")) s.width_m = js.at("width_m").get<double>();
      sc.map.stalls.push_back(std::move(s));
    }
    for (const auto& jb : jm.at("beacons")) {
      localization::Beacon b;
      b.id = jb.at("id").get<std::string>();
      b.position = {jb.at("x_m").get<double>(), jb.at("y_m").get<double>()};
      b.tx_power_dbm = jb.at("tx_power_dbm").get<double>();
      sc.map.beacons.push_back(std::move(b));
    }
    for (const auto& jp : jm.at("route")) {
      if (!jp.is_array() || jp.size() != 2)
        throw ParseError(path.string() + ": map.route entries must be [x, y] pairs");
      sc.map.route.push_back({jp[0].get<double>(), jp[1].get<double>()});
    }

    const auto& jt = j.at("truth");
    for (const auto& [stall_id, plate] : jt.items()) {
      if (plate.is_null()) {
        sc.truth[stall_id] = std::nullopt;
      } else {
        const std::string normalized = plates::normalize_plate(plate.get<std::string>());
        if (!plates::is_valid_plate(normalized))
          throw ParseError(path.string() + ": truth." + stall_id + ": invalid plate '" +
                           plate.get<std::string>() + "'");
        sc.truth[stall_id] = normalized;
      }
    }

    const auto& jn = j.at("noise");
    sc.noise.rssi_sigma_db = jn.at("rssi_sigma_db").get<double>();
    sc.noise.ocr_char_p = jn.at("ocr_char_p").get<double>();
    sc.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("path_loss_exponent"))
      sc.path_loss_exponent = j.at("path_loss_exponent").get<double>();
    if (jn.contains("rssi_samples_per_tick"))
      sc.rssi_samples_per_tick = jn.at("rssi_samples_per_tick").get<int>();
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(path.string() + ": " + ex.what());
  }
  if (sc.rssi_samples_per_tick < 1)
    throw ParseError(path.string() + ": noise.rssi_samples_per_tick must be >= 1");

  try {
    validate_map(sc.map);
  } catch (const InputError& ex) {
    throw ParseError(path.string() + ": " + ex.what());
  }
  for (const auto& [stall_id, plate] : sc.truth) {
    const bool known = std::any_of(sc.map.stalls.begin(), sc.map.stalls.end(),
                                   [&](const Stall& s) { return s.stall_id == stall_id; });
    if (!known)
      throw ParseError(path.string() + ": truth references unknown stall '" + stall_id + "'");
  }
  if (!(sc.noise.rssi_sigma_db >= 0.0))
    throw ParseError(path.string() + ": noise.rssi_sigma_db must be >= 0");
  if (!(sc.noise.ocr_char_p >= 0.0 && sc.noise.ocr_char_p <= 1.0))
    throw ParseError(path.string() + ": noise.ocr_char_p must be in [0, 1]");
  if (sc.map.route.size() < 2)
    throw ParseError(path.string() + ": map.route needs at least 2 waypoints");
  return sc;
}

std::vector<PatrolEvent> simulate_patrol(const Scenario& scenario) {
  const localization::PathLossModel model(scenario.path_loss_exponent);
  Rng rng(scenario.seed);

  const std::vector<Vec2> poses = walk_route(scenario.map.route, kPatrolStepM);
  std::vector<PatrolEvent> events;
  events.reserve(poses.size());

  for (std::size_t t = 0; t < poses.size(); ++t) {
    PatrolEvent ev;
    ev.tick = t;
    ev.true_pose = poses[t];
    for (int s = 0; s < scenario.rssi_samples_per_tick; ++s) {
      const auto sample =
          simulate_rssi(scenario.map, ev.true_pose, model, scenario.noise.rssi_sigma_db, rng, t);
      ev.rssi_readings.insert(ev.rssi_readings.end(), sample.begin(), sample.end());
    }

    // The camera sees the stall the robot is passing in front of.
    if (const auto stall_id = stall_for_position(scenario.map, ev.true_pose, kCameraRangeM)) {
      Detection det;
      const auto it = scenario.truth.find(*stall_id);
      const std::optional<std::string> plate =
          (it != scenario.truth.end()) ? it->second : std::nullopt;
      if (plate) {
        det.vehicle_present = true;
        det.plate_candidates.push_back(corrupt_plate(*plate, scenario.noise.ocr_char_p, rng, t));
      }
      ev.detections.push_back(std::move(det));
    }
    events.push_back(std::move(ev));
  }
  return events;
}

std::vector<PatrolEvent> simulate_patrol(const std::filesystem::path& scenario_path) {
  return simulate_patrol(load_scenario(scenario_path));
}

std::string events_to_jsonl(const std::vector<PatrolEvent>& events) {
  std::ostringstream out;
  for (const PatrolEvent& ev : events) {
    nlohmann::json readings = nlohmann::json::array();
    for (const auto& r : ev.rssi_readings)
      readings.push_back({{"beacon_id", r.beacon_id}, {"rssi_dbm", r.rssi_dbm}});
    nlohmann::json detections = nlohmann::json::array();
    for (const auto& d : ev.detections) {
      nlohmann::json cands = nlohmann::json::array();
      for (const auto& c : d.plate_candidates)
        cands.push_back({{"raw", c.raw}, {"confidence", c.confidence}});
      detections.push_back(
          {{"vehicle_present", d.vehicle_present}, {"plate_candidates", cands}});
    }
    nlohmann::json j{{"tick", ev.tick},
                     {"true_pose", {ev.true_pose.x, ev.true_pose.y}},
                     {"rssi_readings", readings},
                     {"detections", detections}};
    out << j.dump() << "\n";
  }
  return out.str();
}

std::string encode_drive_command(const DriveCommand& command) {
  if (command.angle_deg < 0 || command.angle_deg > 180)
    throw InputError("drive command angle must be in [0, 180], got " +
                     std::to_string(command.angle_deg));
  char letter = 'S';
  switch (command.motion) {
    case Motion::forward: letter = 'F'; break;
    case Motion::stop: letter = 'S'; break;
    case Motion::rewind: letter = 'R'; break;
  }
  char frame[8];
  std::snprintf(frame, sizeof frame, "%c%03d\n", letter, command.angle_deg);
  return frame;
}

DriveCommand decode_drive_command(std::string_view frame) {
  if (frame.size() != 5 || frame[4] != '\n')
    throw FrameError("drive frame must be 5 bytes ending in linefeed");
  DriveCommand cmd;
  switch (frame[0]) {
    case 'F': cmd.motion = Motion::forward; break;
    case 'S': cmd.motion = Motion::stop; break;
    case 'R': cmd.motion = Motion::rewind; break;
    default:
      throw FrameError(std::string("drive frame has unknown motion letter '") + frame[0] + "'");
  }
  int angle = 0;
  for (std::size_t i = 1; i <= 3; ++i) {
    if (frame[i] < '0' || frame[i] > '9')
      throw FrameError("drive frame angle must be three digits");
    angle = angle * 10 + (frame[i] - '0');
  }
  if (angle > 180) throw FrameError("drive frame angle exceeds 180");
  cmd.angle_deg = angle;
  return cmd;
}

}  // namespace garagemon::garage
