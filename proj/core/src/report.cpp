#include "garagemon/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "garagemon/errors.hpp"

namespace garagemon::report {

std::string_view occupancy_kind_name(OccupancyKind kind) {
  switch (kind) {
    case OccupancyKind::empty:
      return "Empty";
    case OccupancyKind::occupied_by_owner:
      return "OccupiedByOwner";
    case OccupancyKind::occupied_by_other_tenant:
      return "OccupiedByOtherTenant";
    case OccupancyKind::occupied_by_unknown:
      return "OccupiedByUnknown";
  }
  return "?";
}

OccupancyStatus classify_stall(const garage::GarageMap& map, const std::string& stall_id,
                               const StallObservation& observed,
                               const registry::Registry& registry) {
  const bool known = std::any_of(map.stalls.begin(), map.stalls.end(),
                                 [&](const garage::Stall& s) { return s.stall_id == stall_id; });
  if (!known) throw MapError("classify_stall: unknown stall '" + stall_id + "'");

  if (!observed.vehicle_present) return {OccupancyKind::empty, std::nullopt};
  if (!observed.consensus_winner) return {OccupancyKind::occupied_by_unknown, std::nullopt};

  const std::string& winner = *observed.consensus_winner;
  const registry::TenantRecord* here = registry.find_by_stall(stall_id);
  if (here != nullptr && !here->plate.empty() && here->plate == winner)
    return {OccupancyKind::occupied_by_owner, std::nullopt};

  const registry::TenantRecord* owner_of_plate = registry.find_by_plate(winner);
  if (owner_of_plate != nullptr) return {OccupancyKind::occupied_by_other_tenant, winner};
  return {OccupancyKind::occupied_by_unknown, winner};
}

namespace {

struct Accumulator {
  std::size_t detections = 0;
  std::size_t vehicle_detections = 0;
  std::vector<std::uint64_t> ticks;
  std::vector<Vec2> positions;
  std::vector<plates::PlateCandidate> candidates;

  // Majority vote over bound detections. A lone mislocalized event near a
  // stall boundary must not flip an empty stall to occupied, but a stall
  // sighted once with a vehicle (1 of 1) still counts.
  bool vehicle_present() const { return vehicle_detections * 2 > detections; }
};

}  // namespace

MonitoringReport build_report(const std::vector<garage::PatrolEvent>& events,
                              const registry::Registry& registry, const garage::GarageMap& map,
                              const ReportConfig& config) {
  MonitoringReport out;
  std::map<std::string, Accumulator> acc;

  for (const garage::PatrolEvent& ev : events) {
    localization::PositionEstimate estimate;
    try {
      try {
        const auto selected =
            localization::strongest_readings(ev.rssi_readings, config.strongest_beacons);
        estimate = localization::estimate_from_readings(map.beacons, selected,
                                                        config.path_loss, config.method);
      } catch (const DegenerateGeometryError&) {
        // Selection can land on one wall; the full set may still work.
        estimate = localization::estimate_from_readings(map.beacons, ev.rssi_readings,
                                                        config.path_loss, config.method);
      } catch (const DimensionError&) {
        estimate = localization::estimate_from_readings(map.beacons, ev.rssi_readings,
                                                        config.path_loss, config.method);
      }
    } catch (const DegenerateGeometryError&) {
      ++out.diagnostics.skipped_events;
      continue;
    } catch (const DimensionError&) {
      ++out.diagnostics.skipped_events;
      continue;
    }

    const auto stall_id =
        garage::stall_for_position(map, estimate.position, config.bind_threshold_m);
    if (!stall_id) continue;  // estimate bound to no stall; evidence dropped

    Accumulator& a = acc[*stall_id];
    a.ticks.push_back(ev.tick);
    a.positions.push_back(estimate.position);
    for (const garage::Detection& det : ev.detections) {
      ++a.detections;
      if (det.vehicle_present) ++a.vehicle_detections;
      a.candidates.insert(a.candidates.end(), det.plate_candidates.begin(),
                          det.plate_candidates.end());
    }
  }

  std::vector<std::string> stall_ids;
  stall_ids.reserve(map.stalls.size());
  for (const garage::Stall& s : map.stalls) stall_ids.push_back(s.stall_id);
  std::sort(stall_ids.begin(), stall_ids.end());

  for (const std::string& stall_id : stall_ids) {
    StallReport sr;
    sr.stall_id = stall_id;
    const auto it = acc.find(stall_id);
    if (it == acc.end()) {
      sr.observed = false;
      sr.status = {OccupancyKind::empty, std::nullopt};
    } else {
      const Accumulator& a = it->second;
      sr.observed = true;
      sr.evidence.ticks = a.ticks;
      sr.evidence.positions = a.positions;
      const plates::ConsensusResult consensus =
          plates::consensus(a.candidates, config.consensus_k);
      sr.evidence.ranked = consensus.ranked;

      StallObservation obs;
      obs.vehicle_present = a.vehicle_present();
      if (const auto w = consensus.winner()) obs.consensus_winner = w->plate;
      sr.status = classify_stall(map, stall_id, obs, registry);

      if (sr.status.kind == OccupancyKind::occupied_by_unknown && sr.status.plate &&
          config.lookup != nullptr)
        sr.owner_lookup = config.lookup->query_owner(*sr.status.plate);
    }
    out.stalls.push_back(std::move(sr));
  }
  return out;
}

std::string to_json(const MonitoringReport& report) {
  nlohmann::json stalls = nlohmann::json::array();
  for (const StallReport& sr : report.stalls) {
    nlohmann::json ranked = nlohmann::json::array();
    for (const plates::RankedPlate& r : sr.evidence.ranked)
      ranked.push_back({{"plate", r.plate}, {"score", r.score}});
    nlohmann::json positions = nlohmann::json::array();
    for (const Vec2& p : sr.evidence.positions) positions.push_back({p.x, p.y});

    nlohmann::json j{{"stall_id", sr.stall_id},
                     {"status", std::string(occupancy_kind_name(sr.status.kind))},
                     {"plate", sr.status.plate ? nlohmann::json(*sr.status.plate)
                                               : nlohmann::json(nullptr)},
                     {"observed", sr.observed},
                     {"evidence",
                      {{"ticks", sr.evidence.ticks},
                       {"ranked", ranked},
                       {"positions", positions}}}};
    if (sr.owner_lookup)
      j["owner_lookup"] = {{"plate", sr.owner_lookup->plate},
                           {"owner_name", sr.owner_lookup->owner_name},
                           {"source", std::string(owner_lookup::source_name(
                                          sr.owner_lookup->source))}};
    stalls.push_back(std::move(j));
  }
  nlohmann::json j{{"stalls", stalls},
                   {"diagnostics", {{"skipped_events", report.diagnostics.skipped_events}}}};
  return j.dump();
}

std::string to_table(const MonitoringReport& report) {
  std::ostringstream out;
  out << "stall   status                 plate    owner            ticks\n";
  for (const StallReport& sr : report.stalls) {
    char line[160];
    const std::string plate = sr.status.plate.value_or("-");
    const std::string owner = sr.owner_lookup ? sr.owner_lookup->owner_name : "-";
    const std::string flags = sr.observed ? std::to_string(sr.evidence.ticks.size())
                                          : std::string("unseen");
    std::snprintf(line, sizeof line, "%-7s %-22s %-8s %-16s %s\n", sr.stall_id.c_str(),
                  std::string(occupancy_kind_name(sr.status.kind)).c_str(), plate.c_str(),
                  owner.c_str(), flags.c_str());
    out << line;
  }
  out << "skipped events: " << report.diagnostics.skipped_events << "\n";
  return out.str();
}

}  // namespace garagemon::report
