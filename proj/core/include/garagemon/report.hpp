#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "garagemon/garage.hpp"
#include "garagemon/localization.hpp"
#include "garagemon/owner_lookup.hpp"
#include "garagemon/plates.hpp"
#include "garagemon/registry.hpp"

namespace garagemon::report {

enum class OccupancyKind {
  empty,
  occupied_by_owner,
  occupied_by_other_tenant,  // plate registered to a different stall
  occupied_by_unknown,       // unregistered plate, or no readable plate
};

std::string_view occupancy_kind_name(OccupancyKind kind);

struct OccupancyStatus {
  OccupancyKind kind = OccupancyKind::empty;
  // occupied_by_other_tenant: the other tenant's plate.
  // occupied_by_unknown: the consensus plate, or nullopt when unreadable.
  std::optional<std::string> plate;

  friend bool operator==(const OccupancyStatus&, const OccupancyStatus&) = default;
};

// What the patrol saw at one stall, after consensus.
struct StallObservation {
  bool vehicle_present = false;
  std::optional<std::string> consensus_winner;
};

// Rule table of the audit. Throws MapError when stall_id is not on the map.
OccupancyStatus classify_stall(const garage::GarageMap& map, const std::string& stall_id,
                               const StallObservation& observed,
                               const registry::Registry& registry);

struct StallEvidence {
  std::vector<std::uint64_t> ticks;  // events whose estimate bound here
  std::vector<plates::RankedPlate> ranked;
  std::vector<Vec2> positions;
};

struct StallReport {
  std::string stall_id;
  OccupancyStatus status;
  bool observed = false;  // false = zero evidence, reported Empty by default
  StallEvidence evidence;
  std::optional<owner_lookup::OwnerRecord> owner_lookup;
};

struct Diagnostics {
  std::size_t skipped_events = 0;  // degenerate localization, event dropped
};

struct MonitoringReport {
  std::vector<StallReport> stalls;  // one per map stall, sorted by stall_id
  Diagnostics diagnostics;
};

struct ReportConfig {
  localization::EstimateMethod method = localization::EstimateMethod::least_squares;
  localization::PathLossModel path_loss{2.0};
  double bind_threshold_m = garage::kDefaultBindThresholdM;
  std::size_t consensus_k = 3;
  // Localize from the strongest N beacons of each event; 0 = use all.
  // Falls back to the full reading set when the selection is degenerate.
  std::size_t strongest_beacons = 6;
  // When set, unknown readable plates are looked up and the result attached.
  const owner_lookup::Client* lookup = nullptr;
};

// Estimates a position per event, binds that event's detections to the
// nearest stall, accumulates candidates per stall, runs consensus and
// classifies every stall on the map. Events with degenerate localization
// are skipped and counted.
MonitoringReport build_report(const std::vector<garage::PatrolEvent>& events,
                              const registry::Registry& registry, const garage::GarageMap& map,
                              const ReportConfig& config);

std::string to_json(const MonitoringReport& report);
std::string to_table(const MonitoringReport& report);

}  // namespace garagemon::report
