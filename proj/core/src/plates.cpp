#include "garagemon/plates.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include <json.hpp>

#include "garagemon/errors.hpp"

namespace garagemon::plates {

std::string normalize_plate(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (const char c : raw) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || c == '-') continue;
    out.push_back(static_cast<char>(std::toupper(uc)));
  }
  return out;
}

bool is_valid_plate(std::string_view normalized) {
  if (normalized.size() != 6) return false;
  return std::all_of(normalized.begin(), normalized.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  });
}

std::vector<PlateCandidate> filter_valid(const std::vector<PlateCandidate>& candidates) {
  std::vector<PlateCandidate> out;
  out.reserve(candidates.size());
  for (const PlateCandidate& c : candidates)
    if (is_valid_plate(normalize_plate(c.raw))) out.push_back(c);
  return out;
}

ConsensusResult consensus(const std::vector<PlateCandidate>& candidates, std::size_t k) {
  if (k == 0) throw InputError("consensus: k must be >= 1");

  // Collect per-plate confidences and sum them in a canonical order so the
  // score is independent of the input ordering.
  std::map<std::string, std::vector<double>> groups;
  for (const PlateCandidate& c : candidates) {
    std::string plate = normalize_plate(c.raw);
    if (!is_valid_plate(plate)) continue;
    groups[std::move(plate)].push_back(c.confidence);
  }

  ConsensusResult result;
  result.ranked.reserve(groups.size());
  for (auto& [plate, confidences] : groups) {
    std::sort(confidences.begin(), confidences.end());
    double score = 0.0;
    for (const double c : confidences) score += c;
    result.ranked.push_back({plate, score});
  }
  // groups iterates plates ascending; stable sort keeps that order on ties.
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const RankedPlate& a, const RankedPlate& b) { return a.score > b.score; });
  if (result.ranked.size() > k) result.ranked.resize(k);
  return result;
}

std::vector<PlateCandidate> load_candidates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::vector<PlateCandidate> candidates;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      PlateCandidate c;
      c.tick = j.at("tick").get<std::uint64_t>();
      c.raw = j.at("raw").get<std::string>();
      c.confidence = j.at("confidence").get<double>();
      if (!(c.confidence >= 0.0 && c.confidence <= 100.0))
        throw ParseError(path.string() + ":" + std::to_string(lineno) +
                         ": confidence must be in [0, 100]");
      candidates.push_back(std::move(c));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return candidates;
}

std::string to_json(const ConsensusResult& result) {
  nlohmann::json ranked = nlohmann::json::array();
  for (const RankedPlate& r : result.ranked)
    ranked.push_back({{"plate", r.plate}, {"score", r.score}});
  nlohmann::json j;
  if (const auto w = result.winner())
    j["winner"] = w->plate;
  else
    j["winner"] = nullptr;
  j["ranked"] = ranked;
  return j.dump();
}

}  // namespace garagemon::plates
