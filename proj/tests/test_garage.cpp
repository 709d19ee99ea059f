#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "garagemon/errors.hpp"
#include "garagemon/garage.hpp"
#include "garagemon/localization.hpp"

using namespace garagemon;
using namespace garagemon::garage;

namespace {

GarageMap tiny_map() {
  GarageMap map;
  map.width_m = 20.0;
  map.height_m = 10.0;
  map.stalls = {{"E-01", {2.0, 2.0}}, {"E-02", {4.0, 2.0}}, {"E-03", {18.0, 8.0}}};
  map.beacons = {{"w1", {0.0, 0.0}, -59.0},
                 {"w2", {20.0, 0.0}, -59.0},
                 {"w3", {0.0, 10.0}, -59.0}};
  map.route = {{1.0, 3.5}, {19.0, 3.5}};
  return map;
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::trunc);
  out << content;
  return path;
}

std::string scenario_json(const std::string& truth, double sigma, double ocr_p,
                          std::uint64_t seed) {
  return R"({
    "map": {
      "width_m": 20.0, "height_m": 10.0,
      "stalls": [{"id": "E-01", "x_m": 2.0, "y_m": 2.0},
                 {"id": "E-02", "x_m": 4.0, "y_m": 2.0}],
      "beacons": [{"id": "w1", "x_m": 0.0, "y_m": 0.0, "tx_power_dbm": -59.0},
                  {"id": "w2", "x_m": 20.0, "y_m": 0.0, "tx_power_dbm": -59.0},
                  {"id": "w3", "x_m": 0.0, "y_m": 10.0, "tx_power_dbm": -59.0}],
      "route": [[1.0, 3.0], [6.0, 3.0]]
    },
    "truth": )" + truth + R"(,
    "noise": {"rssi_sigma_db": )" + std::to_string(sigma) + R"(, "ocr_char_p": )" +
         std::to_string(ocr_p) + R"(},
    "seed": )" + std::to_string(seed) + "}";
}

}  // namespace

TEST_CASE("stall binding") {
  const GarageMap map = tiny_map();

  SUBCASE("exact center") { CHECK(stall_for_position(map, {2.0, 2.0}) == "E-01"); }

  SUBCASE("beyond the threshold") {
    CHECK_FALSE(stall_for_position(map, {10.0, 9.0}).has_value());
  }

  SUBCASE("equidistant tie breaks lexicographically") {
    CHECK(stall_for_position(map, {3.0, 2.0}) == "E-01");  // 1.0 m from both E-01 and E-02
  }

  SUBCASE("never returns a stall farther than the threshold") {
    for (double x = 0.0; x <= 20.0; x += 0.5) {
      for (double y = 0.0; y <= 10.0; y += 0.5) {
        const auto id = stall_for_position(map, {x, y});
        if (!id) continue;
        for (const Stall& s : map.stalls)
          if (s.stall_id == *id) CHECK(distance(s.center, {x, y}) <= kDefaultBindThresholdM);
      }
    }
  }

  SUBCASE("non-finite position") {
    CHECK_THROWS_AS(stall_for_position(map, {std::nan(""), 0.0}), InputError);
  }
}

TEST_CASE("rssi simulation") {
  const GarageMap map = tiny_map();
  const localization::PathLossModel model(2.0);

  SUBCASE("noise-free reading at 1 m equals tx power") {
    const auto readings = simulate_rssi(map, {1.0, 0.0}, model, 0.0, 1);
    REQUIRE(readings.size() == 3);
    CHECK(readings[0].rssi_dbm == doctest::Approx(-59.0));  // w1 is 1 m away
  }

  SUBCASE("noise-free reading at 10 m is 20 dB down at exponent 2") {
    const auto readings = simulate_rssi(map, {10.0, 0.0}, model, 0.0, 1);
    CHECK(readings[0].rssi_dbm == doctest::Approx(-79.0));
  }

  SUBCASE("same seed, same readings") {
    const auto a = simulate_rssi(map, {5.0, 5.0}, model, 1.5, 42);
    const auto b = simulate_rssi(map, {5.0, 5.0}, model, 1.5, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].rssi_dbm == b[i].rssi_dbm);
  }

  SUBCASE("negative sigma rejected") {
    CHECK_THROWS_AS(simulate_rssi(map, {5.0, 5.0}, model, -1.0, 1), InputError);
  }
}

TEST_CASE("drive command codec") {
  SUBCASE("definitional frames") {
    CHECK(encode_drive_command({Motion::forward, 90}) == "F090\n");
    CHECK(encode_drive_command({Motion::stop, 0}) == "S000\n");
    CHECK(encode_drive_command({Motion::rewind, 180}) == "R180\n");
  }

  SUBCASE("round trip") {
    const DriveCommand cmd{Motion::stop, 0};
    CHECK(decode_drive_command(encode_drive_command(cmd)) == cmd);
  }

  SUBCASE("exhaustive bijectivity over all 543 commands") {
    std::set<std::string> frames;
    for (const Motion m : {Motion::forward, Motion::stop, Motion::rewind}) {
      for (int angle = 0; angle <= 180; ++angle) {
        const DriveCommand cmd{m, angle};
        const std::string frame = encode_drive_command(cmd);
        CHECK(decode_drive_command(frame) == cmd);
        frames.insert(frame);
      }
    }
    CHECK(frames.size() == 543);
  }

  SUBCASE("malformed frames") {
    CHECK_THROWS_AS(decode_drive_command("F181\n"), FrameError);  // angle out of range
    CHECK_THROWS_AS(decode_drive_command("X090\n"), FrameError);  // unknown letter
    CHECK_THROWS_AS(decode_drive_command("F09\n"), FrameError);   // short
    CHECK_THROWS_AS(decode_drive_command("F0900"), FrameError);   // no linefeed
    CHECK_THROWS_AS(decode_drive_command("F0a0\n"), FrameError);  // non-digit
  }

  SUBCASE("encode validates the angle") {
    CHECK_THROWS_AS(encode_drive_command({Motion::forward, 181}), InputError);
    CHECK_THROWS_AS(encode_drive_command({Motion::forward, -1}), InputError);
  }
}

TEST_CASE("map validation") {
  GarageMap map = tiny_map();
  validate_map(map);  // baseline is fine

  SUBCASE("stall outside bounds") {
    map.stalls[0].center = {25.0, 2.0};
    CHECK_THROWS_AS(validate_map(map), InputError);
  }

  SUBCASE("duplicate stall id") {
    map.stalls[1].stall_id = "E-01";
    CHECK_THROWS_AS(validate_map(map), InputError);
  }

  SUBCASE("route outside bounds") {
    map.route.push_back({30.0, 3.0});
    CHECK_THROWS_AS(validate_map(map), InputError);
  }
}

TEST_CASE("default map") {
  const GarageMap map = make_default_map();
  CHECK(map.stalls.size() == 12);
  CHECK(map.height_m == 8.0);
  CHECK(map.beacons.size() >= 6);
  CHECK(map.route.size() >= 2);
  validate_map(map);

  // Every stall is reachable within camera range from some route point.
  auto segment_distance = [](Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len_sq = dot(ab, ab);
    const double t = len_sq > 0.0 ? std::clamp(dot(p - a, ab) / len_sq, 0.0, 1.0) : 0.0;
    return distance(p, a + t * ab);
  };
  for (const Stall& s : map.stalls) {
    double best = 1e9;
    for (std::size_t i = 1; i < map.route.size(); ++i)
      best = std::min(best, segment_distance(s.center, map.route[i - 1], map.route[i]));
    CHECK(best <= kCameraRangeM);
  }
}

TEST_CASE("ocr corruption model") {
  SUBCASE("confusion partners swap deterministically at p=1") {
    Rng rng(1);
    const auto c = corrupt_plate("0I8S5B", 1.0, rng, 7);
    CHECK(c.raw == "O1B5S8");
    CHECK(c.confidence == 20.0);  // 90 - 15*6 floored at 20
    CHECK(c.tick == 7);
  }

  SUBCASE("p=0 leaves the plate untouched at confidence 90") {
    Rng rng(1);
    const auto c = corrupt_plate("ABC123", 0.0, rng, 0);
    CHECK(c.raw == "ABC123");
    CHECK(c.confidence == 90.0);
  }

  SUBCASE("characters without a partner become a different alphanumeric") {
    Rng rng(1);
    const auto c = corrupt_plate("AAAAAA", 1.0, rng, 0);
    CHECK(c.raw.size() == 6);
    for (const char ch : c.raw) {
      CHECK(ch != 'A');
      CHECK(((ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9')));
    }
  }

  SUBCASE("confidence scales with the corruption count") {
    Rng rng(99);
    // Single-character plate corruption via partner: one corruption.
    const auto c = corrupt_plate("0", 1.0, rng, 0);
    CHECK(c.raw == "O");
    CHECK(c.confidence == 75.0);  // 90 - 15
  }
}

TEST_CASE("scenario files") {
  SUBCASE("well-formed scenario") {
    const auto path = write_temp("gm_scenario.json",
                                 scenario_json(R"({"E-01": "ABC123", "E-02": null})", 0.5, 0.1, 7));
    const Scenario sc = load_scenario(path);
    CHECK(sc.map.stalls.size() == 2);
    CHECK(sc.truth.at("E-01") == "ABC123");
    CHECK_FALSE(sc.truth.at("E-02").has_value());
    CHECK(sc.noise.rssi_sigma_db == 0.5);
    CHECK(sc.seed == 7);
    std::filesystem::remove(path);
  }

  SUBCASE("unknown stall in truth") {
    const auto path = write_temp("gm_scenario_bad1.json",
                                 scenario_json(R"({"E-99": "ABC123"})", 0.0, 0.0, 1));
    CHECK_THROWS_WITH_AS(load_scenario(path), doctest::Contains("E-99"), ParseError);
    std::filesystem::remove(path);
  }

  SUBCASE("invalid plate in truth") {
    const auto path = write_temp("gm_scenario_bad2.json",
                                 scenario_json(R"({"E-01": "AB"})", 0.0, 0.0, 1));
    CHECK_THROWS_AS(load_scenario(path), ParseError);
    std::filesystem::remove(path);
  }

  SUBCASE("corruption probability out of range") {
    const auto path = write_temp("gm_scenario_bad3.json",
                                 scenario_json(R"({"E-01": null})", 0.0, 1.5, 1));
    CHECK_THROWS_AS(load_scenario(path), ParseError);
    std::filesystem::remove(path);
  }

  SUBCASE("missing file and malformed json") {
    CHECK_THROWS_AS(load_scenario("/nonexistent.json"), ParseError);
    const auto path = write_temp("gm_scenario_bad4.json", "{nope");
    CHECK_THROWS_AS(load_scenario(path), ParseError);
    std::filesystem::remove(path);
  }
}

TEST_CASE("patrol simulation") {
  SUBCASE("all stalls empty: no vehicles, no candidates") {
    const auto path = write_temp("gm_patrol_empty.json",
                                 scenario_json(R"({"E-01": null, "E-02": null})", 0.0, 0.0, 3));
    const auto events = simulate_patrol(path);
    CHECK(!events.empty());
    for (const PatrolEvent& ev : events) {
      for (const Detection& det : ev.detections) {
        CHECK_FALSE(det.vehicle_present);
        CHECK(det.plate_candidates.empty());
      }
    }
    std::filesystem::remove(path);
  }

  SUBCASE("zero corruption: every candidate is the true plate at confidence 90") {
    const auto path = write_temp("gm_patrol_clean.json",
                                 scenario_json(R"({"E-01": "ABC123", "E-02": null})", 0.0, 0.0, 3));
    const auto events = simulate_patrol(path);
    bool saw_candidate = false;
    for (const PatrolEvent& ev : events) {
      for (const Detection& det : ev.detections) {
        for (const auto& cand : det.plate_candidates) {
          saw_candidate = true;
          CHECK(cand.raw == "ABC123");
          CHECK(cand.confidence == 90.0);
        }
      }
    }
    CHECK(saw_candidate);
    std::filesystem::remove(path);
  }

  SUBCASE("same scenario and seed produce byte-identical event streams") {
    const auto path = write_temp("gm_patrol_det.json",
                                 scenario_json(R"({"E-01": "ABC123", "E-02": null})", 1.0, 0.2, 9));
    const auto a = simulate_patrol(path);
    const auto b = simulate_patrol(path);
    CHECK(events_to_jsonl(a) == events_to_jsonl(b));
    std::filesystem::remove(path);
  }

  SUBCASE("different seeds differ") {
    const auto p1 = write_temp("gm_patrol_s1.json",
                               scenario_json(R"({"E-01": "ABC123"})", 1.0, 0.2, 1));
    const auto p2 = write_temp("gm_patrol_s2.json",
                               scenario_json(R"({"E-01": "ABC123"})", 1.0, 0.2, 2));
    CHECK(events_to_jsonl(simulate_patrol(p1)) != events_to_jsonl(simulate_patrol(p2)));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
  }

  SUBCASE("noise-free readings localize back to the true pose at every tick") {
    Scenario sc;
    sc.map = make_default_map();
    sc.noise = {0.0, 0.0};
    sc.seed = 5;
    const auto events = simulate_patrol(sc);
    const localization::PathLossModel model(2.0);
    for (const PatrolEvent& ev : events) {
      const auto est = localization::estimate_from_readings(sc.map.beacons, ev.rssi_readings,
                                                            model);
      CHECK(distance(est.position, ev.true_pose) <= 1e-6);
    }
  }

  SUBCASE("tick count follows the route length and fixed step") {
    Scenario sc;
    sc.map = tiny_map();
    sc.map.route = {{1.0, 3.5}, {3.0, 3.5}};  // 2 m at 0.125 m step
    sc.seed = 1;
    const auto events = simulate_patrol(sc);
    CHECK(events.size() == 17);
    CHECK(events.front().true_pose == Vec2{1.0, 3.5});
    CHECK(events.back().true_pose == Vec2{3.0, 3.5});
  }

  SUBCASE("multi-sample ticks carry one reading per beacon per sample") {
    Scenario sc;
    sc.map = tiny_map();
    sc.rssi_samples_per_tick = 3;
    sc.seed = 1;
    const auto events = simulate_patrol(sc);
    REQUIRE(!events.empty());
    CHECK(events[0].rssi_readings.size() == 3 * sc.map.beacons.size());
  }
}
