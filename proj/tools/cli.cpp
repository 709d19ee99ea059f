#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "garagemon/errors.hpp"
#include "garagemon/garage.hpp"
#include "garagemon/localization.hpp"
#include "garagemon/owner_lookup.hpp"
#include "garagemon/plates.hpp"
#include "garagemon/registry.hpp"
#include "garagemon/report.hpp"
#include "garagemon/solvers.hpp"

namespace garagemon::cli {

namespace {

struct LocalizeArgs {
  std::string beacons;
  std::string readings;
  std::string method = "least-squares";
};

struct BenchArgs {
  std::string method = "gauss";
  std::size_t n = 64;
  int workers = 1;
  int trials = 100;
  std::uint64_t seed = 1;
  bool table = false;
};

struct ConsensusArgs {
  std::string candidates;
  std::size_t k = 3;
};

struct RegistryArgs {
  std::string registry;
};

struct PatrolArgs {
  std::string scenario;
  std::string registry;
  std::string out_path;
  std::string method = "least-squares";
  std::optional<std::uint64_t> seed;
};

struct CodecArgs {
  std::string encode;
  std::string decode;
};

int do_localize(const LocalizeArgs& a, std::ostream& out) {
  const auto beacons = localization::load_beacons(a.beacons);
  const auto readings = localization::load_readings(a.readings);
  const auto estimate = localization::estimate_from_readings(
      beacons, readings, localization::PathLossModel(2.0),
      localization::parse_estimate_method(a.method));
  out << localization::to_json(estimate) << "\n";
  return 0;
}

int do_bench(const BenchArgs& a, std::ostream& out) {
  solvers::BenchConfig cfg;
  cfg.method = solvers::parse_method(a.method);
  cfg.n = a.n;
  cfg.workers = a.workers;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  const solvers::TimingReport report = solvers::bench_solve(cfg);
  out << (a.table ? report.to_table() : report.to_jsonl());
  return 0;
}

int do_consensus(const ConsensusArgs& a, std::ostream& out) {
  const auto candidates = plates::load_candidates(a.candidates);
  out << plates::to_json(plates::consensus(candidates, a.k)) << "\n";
  return 0;
}

int do_registry_check(const RegistryArgs& a, std::ostream& out) {
  const auto reg = registry::Registry::load(a.registry);
  out << "{\"ok\":true,\"records\":" << reg.size() << "}\n";
  return 0;
}

int do_patrol(const PatrolArgs& a, std::ostream& out, std::ostream& err) {
  garage::Scenario scenario = garage::load_scenario(a.scenario);
  if (a.seed) scenario.seed = *a.seed;
  const auto events = garage::simulate_patrol(scenario);
  const auto reg = registry::Registry::load(a.registry);

  std::unique_ptr<owner_lookup::Client> lookup;
  if (const char* fixture = std::getenv("PATROL_STUB_FIXTURE"); fixture != nullptr) {
    lookup = std::make_unique<owner_lookup::Client>(
        std::make_shared<owner_lookup::FixtureBackend>(fixture));
  }

  report::ReportConfig cfg;
  cfg.method = localization::parse_estimate_method(a.method);
  cfg.path_loss = localization::PathLossModel(scenario.path_loss_exponent);
  cfg.lookup = lookup.get();
  const report::MonitoringReport rep = report::build_report(events, reg, scenario.map, cfg);

  if (a.out_path.empty()) {
    out << report::to_json(rep) << "\n";
  } else {
    std::ofstream f(a.out_path, std::ios::trunc);
    if (!f) throw InputError("cannot write report to '" + a.out_path + "'");
    f << report::to_json(rep) << "\n";
    out << report::to_table(rep);
    err << "report written to " << a.out_path << "\n";
  }
  return 0;
}

int do_codec(const CodecArgs& a, std::ostream& out) {
  if (a.encode.empty() == a.decode.empty())
    throw InputError("codec: pass exactly one of --encode or --decode");
  if (!a.encode.empty()) {
    // Compact command form: motion letter + three-digit angle, e.g. F090.
    std::string frame = a.encode;
    if (frame.size() == 4) frame.push_back('\n');
    const garage::DriveCommand cmd = garage::decode_drive_command(frame);
    out << garage::encode_drive_command(cmd);
    return 0;
  }
  std::string frame = a.decode;
  if (!frame.empty() && frame.back() != '\n') frame.push_back('\n');
  const garage::DriveCommand cmd = garage::decode_drive_command(frame);
  const char* motion = cmd.motion == garage::Motion::forward ? "forward"
                       : cmd.motion == garage::Motion::stop  ? "stop"
                                                             : "rewind";
  out << "{\"motion\":\"" << motion << "\",\"angle_deg\":" << cmd.angle_deg << "}\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"garage patrol monitoring engine", "garagemon"};
  app.require_subcommand(1);

  LocalizeArgs loc;
  auto* localize = app.add_subcommand("localize", "estimate a position from beacon readings");
  localize->add_option("--beacons", loc.beacons, "beacon deployment JSON")->required();
  localize->add_option("--readings", loc.readings, "RSSI readings JSONL")->required();
  localize->add_option("--method", loc.method,
                       "gauss | jacobi | gauss-seidel | least-squares");

  BenchArgs bench;
  auto* solve_bench = app.add_subcommand("solve-bench", "time a linear solver");
  solve_bench->add_option("--method", bench.method, "gauss | jacobi | gauss-seidel");
  solve_bench->add_option("--n", bench.n, "system size");
  solve_bench->add_option("--workers", bench.workers, "worker count");
  solve_bench->add_option("--trials", bench.trials, "repeat count");
  solve_bench->add_option("--seed", bench.seed, "base seed");
  solve_bench->add_flag("--table", bench.table, "print a table instead of JSON lines");

  ConsensusArgs cons;
  auto* consensus = app.add_subcommand("consensus", "aggregate plate candidates");
  consensus->add_option("--candidates", cons.candidates, "candidate JSONL")->required();
  consensus->add_option("--k", cons.k, "ranked list size");

  RegistryArgs regc;
  auto* registry_check = app.add_subcommand("registry-check", "validate a tenant registry");
  registry_check->add_option("--registry", regc.registry, "registry CSV")->required();

  PatrolArgs pat;
  auto* patrol = app.add_subcommand("patrol", "run a patrol scenario and build the report");
  patrol->add_option("--scenario", pat.scenario, "scenario JSON")->required();
  patrol->add_option("--registry", pat.registry, "registry CSV")->required();
  patrol->add_option("--out", pat.out_path, "report JSON output path");
  patrol->add_option("--method", pat.method, "localization method");
  patrol->add_option("--seed", pat.seed, "override the scenario seed");

  CodecArgs codec;
  auto* codec_cmd = app.add_subcommand("codec", "drive-command frame codec");
  codec_cmd->add_option("--encode", codec.encode, "command, e.g. F090");
  codec_cmd->add_option("--decode", codec.decode, "frame to decode");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (*localize) return do_localize(loc, out);
    if (*solve_bench) return do_bench(bench, out);
    if (*consensus) return do_consensus(cons, out);
    if (*registry_check) return do_registry_check(regc, out);
    if (*patrol) return do_patrol(pat, out, err);
    if (*codec_cmd) return do_codec(codec, out);
    err << "error: no subcommand\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace garagemon::cli
