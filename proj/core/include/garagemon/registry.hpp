#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace garagemon::registry {

// One tenant row: who owns which stall and what is parked or stored there.
// `plate` is normalized; empty means the stall has no registered vehicle.
struct TenantRecord {
  std::string apartment;
  std::string name;
  std::string stall_id;
  std::string vehicle_type;
  std::string plate;
  std::vector<std::string> stored_goods;

  friend bool operator==(const TenantRecord&, const TenantRecord&) = default;
};

// Immutable after construction; safe for shared reads.
class Registry {
 public:
  Registry() = default;

  // CSV with header apartment,name,stall_id,vehicle_type,plate,stored_goods;
  // goods are ';'-separated within their field. Plates are normalized on
  // load. Throws ParseError (with line number) or IntegrityError (duplicate
  // stall/plate, invalid plate).
  static Registry load(const std::filesystem::path& path);

  // Builds from in-memory rows, enforcing the same invariants.
  static Registry from_records(std::vector<TenantRecord> records);

  // Canonical form; load → save → load is a fixed point.
  void save(const std::filesystem::path& path) const;

  const TenantRecord* find_by_plate(std::string_view normalized_plate) const;
  const TenantRecord* find_by_stall(std::string_view stall_id) const;

  const std::vector<TenantRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<TenantRecord> records_;
};

}  // namespace garagemon::registry
