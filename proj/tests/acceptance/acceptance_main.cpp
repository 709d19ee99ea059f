// Acceptance suite: one criterion per entry, one PASS/FAIL line each.
// Run all with no arguments, a single one with --criterion N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "garagemon/errors.hpp"
#include "garagemon/garage.hpp"
#include "garagemon/localization.hpp"
#include "garagemon/owner_lookup.hpp"
#include "garagemon/plates.hpp"
#include "garagemon/registry.hpp"
#include "garagemon/report.hpp"
#include "garagemon/rng.hpp"
#include "garagemon/solvers.hpp"

using namespace garagemon;

namespace {

struct Criterion {
  int id;
  const char* name;
  std::function<bool(std::string&)> run;
};

#define EXPECT(cond)                                                          \
  do {                                                                        \
    if (!(cond)) {                                                            \
      detail += std::string(detail.empty() ? "" : "; ") + "failed: " + #cond; \
      ok = false;                                                             \
    }                                                                         \
  } while (0)

double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::filesystem::path data_file(const char* name) {
  return std::filesystem::path(GARAGEMON_DATA_DIR) / name;
}

// --- 1. Trilateration round-trip --------------------------------------

bool c1_roundtrip(std::string& detail) {
  bool ok = true;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20260810);
  double worst = 0.0;
  int done = 0;
  while (done < 1000) {
    std::vector<localization::Beacon> beacons;
    for (int i = 0; i < 3; ++i)
      beacons.push_back(
          {"b" + std::to_string(i), {rng.uniform(0.0, 20.0), rng.uniform(0.0, 20.0)}});
    const Vec2 u = beacons[1].position - beacons[0].position;
    const Vec2 v = beacons[2].position - beacons[0].position;
    if (std::fabs(cross(u, v)) < 1e-3 * std::max(1.0, norm(u) * norm(v))) continue;

    const Vec2 truth{rng.uniform(0.0, 20.0), rng.uniform(0.0, 20.0)};
    std::vector<double> d;
    for (const auto& b : beacons) d.push_back(distance(truth, b.position));
    const auto est = localization::estimate_position(beacons, d);
    worst = std::max(worst, distance(est.position, truth));
    ++done;
  }
  const double secs = elapsed_s(start);
  EXPECT(worst <= 1e-6);
  EXPECT(secs < 5.0);
  {
    std::ostringstream s;
    s << "worst error " << worst << " m over 1000 triples, " << secs << " s";
    detail = s.str() + (detail.empty() ? "" : "; " + detail);
  }
  return ok;
}

// --- 2. Solver oracle equivalence --------------------------------------

bool c2_solver_oracle(std::string& detail) {
  bool ok = true;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const std::size_t n : {std::size_t{4}, std::size_t{64}, std::size_t{512}}) {
    for (std::uint64_t instance = 0; instance < 50; ++instance) {
      const auto system = solvers::make_bench_system(n, Rng::mix(1000 + n, instance));
      const auto direct = solvers::gauss_eliminate(system);
      const auto jac = solvers::jacobi(system, 1e-10, 10000);
      const auto gs = solvers::gauss_seidel(system, 1e-10, 10000);
      EXPECT(jac.converged);
      EXPECT(gs.converged);
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::fabs(jac.x[i] - direct.x[i]));
        worst = std::max(worst, std::fabs(gs.x[i] - direct.x[i]));
      }
    }
  }
  const double secs = elapsed_s(start);
  EXPECT(worst <= 1e-6);
  EXPECT(secs < 30.0);
  {
    std::ostringstream s;
    s << "max |dx| " << worst << ", " << secs << " s";
    detail = s.str() + (detail.empty() ? "" : "; " + detail);
  }
  return ok;
}

// --- 3. Table-1 shape: ordering, parallel jacobi, O(n^3) growth ---------

double mean_time(solvers::Method method, std::size_t n, int workers, int trials,
                 std::uint64_t seed) {
  solvers::BenchConfig cfg;
  cfg.method = method;
  cfg.n = n;
  cfg.workers = workers;
  cfg.trials = trials;
  cfg.seed = seed;
  return solvers::bench_solve(cfg).entries().at(0).mean_s;
}

bool c3_table_shape(std::string& detail) {
  bool ok = true;
  const int trials = 20;
  const double gauss_1024 = mean_time(solvers::Method::gauss, 1024, 1, trials, 42);
  const double jacobi_1024 = mean_time(solvers::Method::jacobi, 1024, 1, trials, 42);
  const double gs_1024 = mean_time(solvers::Method::gauss_seidel, 1024, 1, trials, 42);
  EXPECT(gauss_1024 > jacobi_1024);
  EXPECT(gauss_1024 > gs_1024);

  const double gauss_512 = mean_time(solvers::Method::gauss, 512, 1, trials, 42);
  const double growth = gauss_1024 / gauss_512;
  EXPECT(growth >= 4.0);
  EXPECT(growth <= 16.0);

  std::ostringstream s;
  s << "gauss " << gauss_1024 << " s, jacobi " << jacobi_1024 << " s, gauss-seidel " << gs_1024
    << " s at n=1024; gauss growth x" << growth << " per doubling";

  const unsigned cores = std::thread::hardware_concurrency();
  if (cores >= 4) {
    const double jacobi_w8 = mean_time(solvers::Method::jacobi, 1024, 8, trials, 42);
    EXPECT(jacobi_w8 <= jacobi_1024);
    s << "; jacobi w8 " << jacobi_w8 << " s vs w1 " << jacobi_1024 << " s";
  } else {
    s << "; host has " << cores << " cores (<4): w8<=w1 constraint not applicable";
  }
  detail = s.str() + (detail.empty() ? "" : "; " + detail);
  return ok;
}

// --- 4. Jacobi worker determinism ---------------------------------------

bool c4_jacobi_determinism(std::string& detail) {
  bool ok = true;
  for (std::uint64_t instance = 0; instance < 20; ++instance) {
    const auto system = solvers::make_bench_system(128, Rng::mix(4, instance));
    const auto base = solvers::jacobi(system, 1e-10, 10000, 1);
    for (const int workers : {2, 4, 8}) {
      const auto other = solvers::jacobi(system, 1e-10, 10000, workers);
      EXPECT(other.x == base.x);
      EXPECT(other.iterations == base.iterations);
    }
  }
  if (detail.empty()) detail = "bitwise-identical solutions on 20 systems, workers {1,2,4,8}";
  return ok;
}

// --- 5. Consensus properties ---------------------------------------------

bool c5_consensus(std::string& detail) {
  bool ok = true;
  Rng rng(55);
  static const std::vector<std::string> pool{"ABC123", "A8C123", "XYZ987", "AAA111",
                                             "ZZZ999", "AB12",   "AB*123"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<plates::PlateCandidate> in;
    const std::size_t count = 1 + rng.below(25);
    for (std::size_t i = 0; i < count; ++i)
      in.push_back({pool[rng.below(pool.size())], static_cast<double>(rng.below(101)), i});

    const auto base = plates::consensus(in, 3);

    auto mixed_input = in;
    for (std::size_t i = mixed_input.size(); i > 1; --i)
      std::swap(mixed_input[i - 1], mixed_input[rng.below(i)]);
    const auto mixed = plates::consensus(mixed_input, 3);

    EXPECT(base.ranked.size() == mixed.ranked.size());
    for (std::size_t i = 0; i < base.ranked.size(); ++i) {
      EXPECT(base.ranked[i].plate == mixed.ranked[i].plate);
      EXPECT(base.ranked[i].score == mixed.ranked[i].score);
    }

    const auto full = plates::consensus(in, 100);
    for (const auto& rp : full.ranked) {
      double expected = 0.0;
      for (const auto& c : in)
        if (plates::normalize_plate(c.raw) == rp.plate &&
            plates::is_valid_plate(rp.plate))
          expected += c.confidence;
      EXPECT(rp.score == expected);
    }
    if (!ok) break;
  }

  const auto worked = plates::consensus(
      {{"ABC123", 90, 0}, {"ABC123", 85, 1}, {"A8C123", 60, 2}}, 3);
  EXPECT(worked.winner().has_value());
  EXPECT(worked.winner()->plate == "ABC123");
  EXPECT(worked.winner()->score == 175.0);
  EXPECT(worked.ranked.size() == 2);
  EXPECT(worked.ranked[1].plate == "A8C123");
  EXPECT(worked.ranked[1].score == 60.0);

  if (detail.empty())
    detail = "permutation invariance + score additivity over 1000 multisets; worked example exact";
  return ok;
}

// --- 6. Codec exhaustive round-trip --------------------------------------

bool c6_codec(std::string& detail) {
  bool ok = true;
  int count = 0;
  for (const auto motion : {garage::Motion::forward, garage::Motion::stop,
                            garage::Motion::rewind}) {
    for (int angle = 0; angle <= 180; ++angle) {
      const garage::DriveCommand cmd{motion, angle};
      const auto decoded = garage::decode_drive_command(garage::encode_drive_command(cmd));
      EXPECT(decoded == cmd);
      ++count;
    }
  }
  EXPECT(count == 543);

  int rejected = 0;
  for (const char* frame : {"F181\n", "X090\n", "F09\n"}) {
    try {
      garage::decode_drive_command(frame);
    } catch (const FrameError&) {
      ++rejected;
    }
  }
  EXPECT(rejected == 3);
  if (detail.empty()) detail = "543 commands round-trip; 3 malformed frames rejected";
  return ok;
}

// --- 7. End-to-end demo ----------------------------------------------------

bool c7_demo(std::string& detail) {
  bool ok = true;
  const auto start = std::chrono::steady_clock::now();

  const auto scenario = garage::load_scenario(data_file("demo_scenario.json"));
  const auto registry = registry::Registry::load(data_file("demo_registry.csv"));
  const owner_lookup::Client lookup(
      std::make_shared<owner_lookup::FixtureBackend>(data_file("demo_owners.json")));

  EXPECT(scenario.noise.rssi_sigma_db == 0.5);
  EXPECT(scenario.noise.ocr_char_p == 0.1);
  EXPECT(scenario.map.stalls.size() == 12);

  report::ReportConfig cfg;
  cfg.lookup = &lookup;
  const auto events = garage::simulate_patrol(scenario);
  const auto rep = report::build_report(events, registry, scenario.map, cfg);

  // Ground truth of the shipped scenario: 3 owner-parked, 1 wrong-stall
  // tenant, 1 unknown intruder, 7 empty.
  const std::map<std::string, std::string> expected{
      {"A-01", "OccupiedByOwner"},       {"A-02", "Empty"},
      {"A-03", "OccupiedByOwner"},       {"A-04", "Empty"},
      {"A-05", "OccupiedByOtherTenant"}, {"A-06", "Empty"},
      {"B-01", "Empty"},                 {"B-02", "OccupiedByOwner"},
      {"B-03", "Empty"},                 {"B-04", "OccupiedByUnknown"},
      {"B-05", "Empty"},                 {"B-06", "Empty"}};

  EXPECT(rep.stalls.size() == 12);
  int mismatches = 0;
  for (const auto& sr : rep.stalls)
    if (std::string(report::occupancy_kind_name(sr.status.kind)) != expected.at(sr.stall_id))
      ++mismatches;
  EXPECT(mismatches == 0);

  const auto intruder = std::find_if(rep.stalls.begin(), rep.stalls.end(),
                                     [](const auto& s) { return s.stall_id == "B-04"; });
  EXPECT(intruder != rep.stalls.end());
  EXPECT(intruder->owner_lookup.has_value());
  if (intruder->owner_lookup) {
    EXPECT(intruder->owner_lookup->owner_name == "R. SALAZAR");
    EXPECT(intruder->owner_lookup->source == owner_lookup::Source::stub);
  }

  // Determinism: a second run serializes byte-identically.
  const auto rep2 = report::build_report(garage::simulate_patrol(scenario), registry,
                                         scenario.map, cfg);
  EXPECT(report::to_json(rep) == report::to_json(rep2));

  const double secs = elapsed_s(start);
  EXPECT(secs < 10.0);
  {
    std::ostringstream s;
    s << "12/12 statuses match, intruder owner attached, " << secs << " s";
    detail = s.str() + (detail.empty() ? "" : "; " + detail);
  }
  return ok;
}

// --- 8. Noise robustness -----------------------------------------------

bool c8_noise_rms(std::string& detail) {
  bool ok = true;
  const auto map = garage::make_default_map();
  const localization::PathLossModel model(2.0);
  const report::ReportConfig defaults;  // mirror the report localization policy

  Rng rng(909);
  double sum_sq = 0.0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const Vec2 truth{rng.uniform(1.5, 15.2), rng.uniform(2.2, 5.8)};
    const auto readings = garage::simulate_rssi(map, truth, model, 1.0, rng, 0);
    Vec2 est;
    try {
      est = localization::estimate_from_readings(
                map.beacons,
                localization::strongest_readings(readings, defaults.strongest_beacons), model)
                .position;
    } catch (const Error&) {
      est = localization::estimate_from_readings(map.beacons, readings, model).position;
    }
    const double e = distance(est, truth);
    sum_sq += e * e;
  }
  const double rms = std::sqrt(sum_sq / trials);
  EXPECT(rms <= 1.0);
  {
    std::ostringstream s;
    s << "RMS error " << rms << " m over " << trials << " trials at sigma=1 dB";
    detail = s.str() + (detail.empty() ? "" : "; " + detail);
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "trilateration round-trip 1000 triples <= 1e-6 m", c1_roundtrip},
      {2, "jacobi/gauss-seidel match gauss within 1e-6 (n=4,64,512)", c2_solver_oracle},
      {3, "table-1 shape: ordering, parallel jacobi, O(n^3) growth", c3_table_shape},
      {4, "jacobi bitwise determinism across workers {1,2,4,8}", c4_jacobi_determinism},
      {5, "consensus property tests + worked example", c5_consensus},
      {6, "drive codec exhaustive round-trip, malformed rejected", c6_codec},
      {7, "end-to-end 12-stall demo matches ground truth", c7_demo},
      {8, "localization RMS <= 1.0 m at sigma=1 dB", c8_noise_rms},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    std::string detail;
    bool passed = false;
    try {
      passed = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] C%d %s (%s)\n", passed ? "PASS" : "FAIL", c.id, c.name, detail.c_str());
    std::fflush(stdout);
    if (!passed) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
