#include "garagemon/registry.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "garagemon/errors.hpp"
#include "garagemon/plates.hpp"

namespace garagemon::registry {

namespace {

constexpr std::string_view kHeader = "apartment,name,stall_id,vehicle_type,plate,stored_goods";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

void check_invariants(const std::vector<TenantRecord>& records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TenantRecord& r = records[i];
    if (r.stall_id.empty()) throw IntegrityError("registry: record with empty stall_id");
    if (!r.plate.empty() && !plates::is_valid_plate(r.plate))
      throw IntegrityError("registry: invalid plate '" + r.plate + "' for stall " + r.stall_id);
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      if (records[j].stall_id == r.stall_id)
        throw IntegrityError("registry: duplicate stall_id '" + r.stall_id + "'");
      if (!r.plate.empty() && records[j].plate == r.plate)
        throw IntegrityError("registry: duplicate plate '" + r.plate + "'");
    }
  }
}

void check_saveable_field(const std::string& value, const char* what) {
  if (value.find(',') != std::string::npos || value.find('\n') != std::string::npos)
    throw InputError(std::string("registry: ") + what + " '" + value +
                     "' contains a separator and cannot be saved");
}

}  // namespace

Registry Registry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ":1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw ParseError(path.string() + ":1: expected header '" + std::string(kHeader) + "'");

  std::vector<TenantRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != 6)
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected 6 fields, got " +
                       std::to_string(fields.size()));
    TenantRecord r;
    r.apartment = fields[0];
    r.name = fields[1];
    r.stall_id = fields[2];
    r.vehicle_type = fields[3];
    r.plate = plates::normalize_plate(fields[4]);
    if (!fields[5].empty()) r.stored_goods = split(fields[5], ';');
    records.push_back(std::move(r));
  }
  return from_records(std::move(records));
}

Registry Registry::from_records(std::vector<TenantRecord> records) {
  check_invariants(records);
  Registry reg;
  reg.records_ = std::move(records);
  return reg;
}

void Registry::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("registry: cannot write '" + path.string() + "'");
  out << kHeader << "\n";
  for (const TenantRecord& r : records_) {
    check_saveable_field(r.apartment, "apartment");
    check_saveable_field(r.name, "name");
    check_saveable_field(r.stall_id, "stall_id");
    check_saveable_field(r.vehicle_type, "vehicle_type");
    std::string goods;
    for (std::size_t i = 0; i < r.stored_goods.size(); ++i) {
      check_saveable_field(r.stored_goods[i], "stored_goods entry");
      if (r.stored_goods[i].find(';') != std::string::npos)
        throw InputError("registry: stored_goods entry '" + r.stored_goods[i] +
                         "' contains ';' and cannot be saved");
      if (i > 0) goods += ';';
      goods += r.stored_goods[i];
    }
    out << r.apartment << ',' << r.name << ',' << r.stall_id << ',' << r.vehicle_type << ','
        << r.plate << ',' << goods << "\n";
  }
}

const TenantRecord* Registry::find_by_plate(std::string_view normalized_plate) const {
  if (normalized_plate.empty()) return nullptr;
  for (const TenantRecord& r : records_)
    if (r.plate == normalized_plate) return &r;
  return nullptr;
}

const TenantRecord* Registry::find_by_stall(std::string_view stall_id) const {
  for (const TenantRecord& r : records_)
    if (r.stall_id == stall_id) return &r;
  return nullptr;
}

}  // namespace garagemon::registry
