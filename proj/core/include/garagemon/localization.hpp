#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "garagemon/matrix.hpp"
#include "garagemon/vec2.hpp"

namespace garagemon::localization {

// Fixed transmitter at a known position in the garage frame.
struct Beacon {
  std::string id;
  Vec2 position;
  double tx_power_dbm = -59.0;  // expected RSSI at 1 m
};

struct RssiReading {
  std::string beacon_id;
  double rssi_dbm = 0.0;
  std::uint64_t tick = 0;
};

// Log-distance path loss: rssi(d) = tx_power − 10·exponent·log10(d).
class PathLossModel {
 public:
  // Throws InputError when the exponent is outside [1, 6].
  explicit PathLossModel(double exponent = 2.0);
  double exponent() const { return exponent_; }

 private:
  double exponent_;
};

enum class EstimateMethod { gauss, jacobi, gauss_seidel, least_squares };

// Accepts "gauss", "jacobi", "gauss-seidel", "least-squares".
EstimateMethod parse_estimate_method(std::string_view name);
std::string_view estimate_method_name(EstimateMethod method);

struct PositionEstimate {
  Vec2 position;
  double residual = 0.0;  // ‖A·x − Y‖₂ of the trilateration system
  std::vector<std::string> beacons_used;
  // Set when an iterative method was requested but the dominance gate
  // failed (or the iteration stalled) and the direct solver answered.
  bool fell_back_to_direct = false;
};

// Inverts the path-loss model: d = 10^((tx_power − rssi)/(10·exponent)).
double rssi_to_distance(const RssiReading& reading, const Beacon& beacon,
                        const PathLossModel& model);

// Linearized circle-difference system over consecutive cyclic beacon pairs
// (i, i+1 mod k): row = p_i − p_j, rhs = (d_j² − d_i² + ‖p_i‖² − ‖p_j‖²)/2.
// Rows always sum to the zero vector. Throws DegenerateGeometryError when
// all pairwise rows are parallel, DimensionError on length mismatch.
LinearSystem build_trilateration_system(const std::vector<Beacon>& beacons,
                                        const std::vector<double>& distances);

// Solves the 2-unknown normal equations of the trilateration system.
// Iterative methods run only when the normal matrix passes the diagonal
// dominance gate; otherwise the direct solver answers and the estimate is
// flagged. Throws DegenerateGeometryError when geometry does not determine
// a position.
PositionEstimate estimate_position(const std::vector<Beacon>& beacons,
                                   const std::vector<double>& distances,
                                   EstimateMethod method = EstimateMethod::least_squares);

// Groups readings by beacon, averages RSSI per beacon in dBm, inverts the
// path-loss model and estimates. Needs readings for >= 3 distinct beacons.
PositionEstimate estimate_from_readings(const std::vector<Beacon>& deployment,
                                        const std::vector<RssiReading>& readings,
                                        const PathLossModel& model,
                                        EstimateMethod method = EstimateMethod::least_squares);

// Keeps readings of the k beacons with the strongest mean RSSI (ties in
// deployment-order of first appearance); input order preserved. k == 0
// keeps everything. Distant beacons carry quadratically amplified range
// noise through the linearization, so estimates usually use the nearest
// handful rather than the whole deployment.
std::vector<RssiReading> strongest_readings(const std::vector<RssiReading>& readings,
                                            std::size_t k);

// Deployment file: JSON array of {id, x_m, y_m, tx_power_dbm}.
std::vector<Beacon> load_beacons(const std::filesystem::path& path);

// Reading log: JSON lines of {tick, beacon_id, rssi_dbm}.
std::vector<RssiReading> load_readings(const std::filesystem::path& path);

std::string to_json(const PositionEstimate& estimate);

}  // namespace garagemon::localization
