#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace garagemon::plates {

// One OCR guess for a plate in one frame.
struct PlateCandidate {
  std::string raw;
  double confidence = 0.0;  // [0, 100]
  std::uint64_t tick = 0;
};

// Uppercases and strips whitespace and hyphens. Any other character is kept
// verbatim and will fail validity downstream.
std::string normalize_plate(std::string_view raw);

// Six characters, all A-Z or 0-9, after normalization.
bool is_valid_plate(std::string_view normalized);

// Keeps candidates whose normalized form is valid; order preserved.
std::vector<PlateCandidate> filter_valid(const std::vector<PlateCandidate>& candidates);

struct RankedPlate {
  std::string plate;
  double score = 0.0;
};

struct ConsensusResult {
  // Sorted by score descending, ties broken by plate ascending.
  std::vector<RankedPlate> ranked;

  std::optional<RankedPlate> winner() const {
    if (ranked.empty()) return std::nullopt;
    return ranked.front();
  }
};

// Confidence-weighted vote: score(plate) = sum of confidences over its
// valid occurrences; top k survive. Throws InputError when k == 0.
ConsensusResult consensus(const std::vector<PlateCandidate>& candidates, std::size_t k = 3);

// Candidate log: JSON lines of {tick, raw, confidence}.
std::vector<PlateCandidate> load_candidates(const std::filesystem::path& path);

// {"winner": <plate or null>, "ranked": [{"plate", "score"}...]}
std::string to_json(const ConsensusResult& result);

}  // namespace garagemon::plates
