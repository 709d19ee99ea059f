#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "garagemon/localization.hpp"
#include "garagemon/plates.hpp"
#include "garagemon/rng.hpp"
#include "garagemon/vec2.hpp"

namespace garagemon::garage {

inline constexpr double kDefaultStallWidthM = 2.45;
inline constexpr double kDefaultBindThresholdM = 1.5;
inline constexpr double kCameraRangeM = 3.0;

struct Stall {
  std::string stall_id;
  Vec2 center;
  double width_m = kDefaultStallWidthM;
};

struct GarageMap {
  double width_m = 0.0;
  double height_m = 0.0;
  std::vector<Stall> stalls;
  std::vector<localization::Beacon> beacons;
  std::vector<Vec2> route;
};

// Validates bounds, unique ids, route inside the map. Throws InputError.
void validate_map(const GarageMap& map);

// Two stall rows along opposite walls of an 8 m lane, 2.45 m pitch, wall
// beacons at every stall column. The layout every demo and test relies on.
GarageMap make_default_map(std::size_t stalls_per_row = 6);

// Nearest stall center within `threshold` meters; ties break toward the
// lexicographically smaller stall id.
std::optional<std::string> stall_for_position(const GarageMap& map, Vec2 pos,
                                              double threshold = kDefaultBindThresholdM);

// One reading per beacon: tx_power − 10·exponent·log10(max(d, 0.1)) plus
// gaussian noise. Deterministic per seed.
std::vector<localization::RssiReading> simulate_rssi(const GarageMap& map, Vec2 pose,
                                                     const localization::PathLossModel& model,
                                                     double noise_sigma_db, std::uint64_t seed,
                                                     std::uint64_t tick = 0);
// Same, drawing from an existing stream (the patrol simulator's).
std::vector<localization::RssiReading> simulate_rssi(const GarageMap& map, Vec2 pose,
                                                     const localization::PathLossModel& model,
                                                     double noise_sigma_db, Rng& rng,
                                                     std::uint64_t tick = 0);

// What the camera reported at one stall; carries no stall id on purpose —
// observations bind to stalls through the position estimate.
struct Detection {
  bool vehicle_present = false;
  std::vector<plates::PlateCandidate> plate_candidates;
};

struct PatrolEvent {
  std::uint64_t tick = 0;
  Vec2 true_pose;  // ground truth, for scoring only
  std::vector<localization::RssiReading> rssi_readings;
  std::vector<Detection> detections;
};

struct ScenarioNoise {
  double rssi_sigma_db = 0.0;
  double ocr_char_p = 0.0;  // per-character corruption probability
};

struct Scenario {
  GarageMap map;
  // stall_id -> plate of the parked vehicle; nullopt = stall is empty.
  std::map<std::string, std::optional<std::string>> truth;
  ScenarioNoise noise;
  std::uint64_t seed = 0;
  double path_loss_exponent = 2.0;
  // RSSI samples per beacon per tick; localization averages them in dBm.
  int rssi_samples_per_tick = 1;
};

// JSON: {map:{width_m,height_m,stalls:[{id,x_m,y_m}],beacons:[{id,x_m,y_m,
// tx_power_dbm}],route:[[x,y],...]}, truth:{stall_id: plate|null},
// noise:{rssi_sigma_db,ocr_char_p}, seed}. Stalls missing from `truth`
// default to empty. Throws ParseError with the offending location.
Scenario load_scenario(const std::filesystem::path& path);

// Walks the route at a fixed 0.25 m step. Each tick emits RSSI readings
// for every beacon and, when a stall center is within camera range, one
// detection for the nearest such stall: empty stalls report no vehicle,
// occupied stalls yield one OCR candidate corrupted per the noise model.
// Fully deterministic per scenario seed.
std::vector<PatrolEvent> simulate_patrol(const Scenario& scenario);
std::vector<PatrolEvent> simulate_patrol(const std::filesystem::path& scenario_path);

// Per-character OCR corruption: confusion partner when one exists
// (0↔O, 1↔I, 8↔B, 5↔S), otherwise a random different character.
// Confidence is 90 − 15 per corrupted character, floored at 20.
plates::PlateCandidate corrupt_plate(const std::string& plate, double char_p, Rng& rng,
                                     std::uint64_t tick);

// One event per line; stable field order, for byte-exact comparisons.
std::string events_to_jsonl(const std::vector<PatrolEvent>& events);

enum class Motion { forward, stop, rewind };

struct DriveCommand {
  Motion motion = Motion::stop;
  int angle_deg = 0;  // [0, 180]

  friend bool operator==(const DriveCommand&, const DriveCommand&) = default;
};

// ASCII frame: one letter {F,S,R}, three-digit zero-padded angle, linefeed.
// encode throws InputError on an out-of-range angle; decode throws
// FrameError on any malformed frame and is the exact inverse of encode.
std::string encode_drive_command(const DriveCommand& command);
DriveCommand decode_drive_command(std::string_view frame);

}  // namespace garagemon::garage
