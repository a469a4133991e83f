#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "slicesim/config_io.hpp"
#include "slicesim/harness.hpp"

using namespace slicesim;
namespace fs = std::filesystem;

namespace {

// A small, fast scenario: 3 RSUs, 12 vehicles, 2 s simulated.
nlohmann::json small_config_json() {
  nlohmann::json j;
  j["highway"]["length_m"] = 3000.0;
  j["highway"]["num_lanes"] = 2;
  j["highway"]["inter_vehicle_distance_m"] = 500.0;
  j["rsu"]["spacing_m"] = 1000.0;
  j["radio"]["num_rbs_rsu"] = 6;
  j["radio"]["num_rbs_sl"] = 6;
  j["sim"]["duration_s"] = 2.0;
  j["slicing"]["reslicing_period_slots"] = 200;
  j["slicing"]["kmeans_restarts"] = 10;
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file())
      out[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
  return out;
}

std::vector<VehicleState> vehicles_at(const std::vector<double>& xs) {
  std::vector<VehicleState> out;
  for (size_t i = 0; i < xs.size(); ++i) {
    VehicleState v;
    v.id = static_cast<int>(i);
    v.x = xs[i];
    v.y = 0;
    out.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("zero-duration run emits valid headers and empty traces") {
  auto j = small_config_json();
  j["sim"]["duration_s"] = 0.0;
  auto [cfg, catalog] = parse_config(j);
  TraceOptions opts;
  opts.queues = true;
  opts.decisions = true;
  const std::string dir = "harness_t0_out";
  fs::remove_all(dir);
  const RunResult res =
      run_slot_loop(cfg, catalog, SchedulerKind::Proposed, opts, dir);
  CHECK(res.summary.slots == 0);
  CHECK(res.playback_samples.empty());
  CHECK(res.latency_samples.empty());
  CHECK(slurp(fs::path(dir) / "queues.csv") ==
        "slot,vehicle,q_bv,q_sv,virt,buffered_s\n");
  CHECK(slurp(fs::path(dir) / "latency_samples.csv") == "vehicle,chunk,seconds\n");
  CHECK(fs::exists(fs::path(dir) / "summary.json"));
  fs::remove_all(dir);
}

TEST_CASE("identical seeds produce byte-identical outputs") {
  auto [cfg, catalog] = parse_config(small_config_json());
  TraceOptions opts;
  opts.queues = true;
  opts.decisions = true;
  opts.topology = true;

  fs::remove_all("harness_det_a");
  fs::remove_all("harness_det_b");
  run_slot_loop(cfg, catalog, SchedulerKind::Proposed, opts, "harness_det_a");
  run_slot_loop(cfg, catalog, SchedulerKind::Proposed, opts, "harness_det_b");

  const auto a = dir_contents("harness_det_a");
  const auto b = dir_contents("harness_det_b");
  REQUIRE(a.size() == b.size());
  for (const auto& [name, bytes] : a) {
    REQUIRE(b.count(name) == 1);
    CHECK_MESSAGE(bytes == b.at(name), "file differs: ", name);
  }
  fs::remove_all("harness_det_a");
  fs::remove_all("harness_det_b");
}

TEST_CASE("different seeds change the trajectory") {
  auto [cfg, catalog] = parse_config(small_config_json());
  TraceOptions opts;
  const RunResult a =
      run_slot_loop(cfg, catalog, SchedulerKind::Proposed, opts, "");
  cfg.seed = 999;
  const RunResult b =
      run_slot_loop(cfg, catalog, SchedulerKind::Proposed, opts, "");
  CHECK(a.playback_samples != b.playback_samples);
}

TEST_CASE("smoke: every slot of a short proposed run is constraint-clean") {
  auto [cfg, catalog] = parse_config(small_config_json());
  TraceOptions opts;  // checker on by default
  const RunResult res =
      run_slot_loop(cfg, catalog, SchedulerKind::Proposed, opts, "");
  CHECK(res.summary.constraint_violations == 0);
  CHECK(res.summary.slots == 2000);
  CHECK(res.summary.playback_samples > 0);
  // every vehicle recorded one level decision per chunk (2 chunks in 2 s)
  for (const auto& history : res.chunk_levels) CHECK(history.size() == 2);
}

TEST_CASE("baselines run clean on the same scenario") {
  auto [cfg, catalog] = parse_config(small_config_json());
  TraceOptions opts;
  for (SchedulerKind kind : {SchedulerKind::Baseline1, SchedulerKind::Baseline2}) {
    const RunResult res = run_slot_loop(cfg, catalog, kind, opts, "");
    CHECK(res.summary.constraint_violations == 0);
  }
}

TEST_CASE("plan grid: 2-value sweep x 3 replications x 2 schedulers = 12 cells") {
  nlohmann::json plan_json;
  plan_json["sweeps"] = nlohmann::json::array(
      {{{"path", "control.epsilon"}, {"values", {0.1, 0.01}}}});
  plan_json["replications"] = 3;
  plan_json["schedulers"] = {"proposed", "baseline1"};

  auto base = small_config_json();
  base["sim"]["duration_s"] = 0.2;
  const std::string dir = "harness_plan_out";
  fs::remove_all(dir);
  ExperimentPlan plan = load_plan(plan_json, base, dir);
  const PlanOutcome outcome = run_plan(plan);
  CHECK(outcome.cells == 12);
  CHECK(outcome.failures == 0);

  nlohmann::json manifest;
  std::ifstream(fs::path(dir) / "manifest.json") >> manifest;
  CHECK(manifest.size() == 12);

  // a rerun with the same base seed reproduces every config hash and seed
  std::map<std::string, std::pair<std::string, std::uint64_t>> first;
  for (const auto& e : manifest)
    first[e.at("cell")] = {e.at("config_hash"), e.at("seed").get<std::uint64_t>()};
  fs::remove_all(dir);
  run_plan(plan);
  nlohmann::json manifest2;
  std::ifstream(fs::path(dir) / "manifest.json") >> manifest2;
  for (const auto& e : manifest2) {
    const auto& [hash, seed] = first.at(e.at("cell"));
    CHECK(e.at("config_hash") == hash);
    CHECK(e.at("seed").get<std::uint64_t>() == seed);
  }
  CHECK(fs::exists(fs::path(dir) / "results.csv"));
  fs::remove_all(dir);
}

TEST_CASE("a sweep over a nonexistent field is rejected before any run") {
  nlohmann::json plan_json;
  plan_json["sweeps"] = nlohmann::json::array(
      {{{"path", "control.no_such_knob"}, {"values", {1, 2}}}});
  CHECK_THROWS_AS(load_plan(plan_json, small_config_json(), "x"), ConfigError);

  nlohmann::json bad_key;
  bad_key["replication"] = 3;  // typo'd key
  CHECK_THROWS_AS(load_plan(bad_key, small_config_json(), "x"), ConfigError);
}

TEST_CASE("baseline 2 partition: no edge vehicles means baseline 1 behavior") {
  ScenarioConfig cfg;
  cfg.highway_length_m = 2000;
  cfg.inter_rsu_distance_m = 1000;
  cfg.num_rsus = 2;
  // both vehicles close to RSU x positions (500, 1500)
  auto vehicles = vehicles_at({480, 1520});
  std::vector<RsuSite> rsus = {{0, 500, -35}, {1, 1500, 35}};

  const SlicePartition p2 = baseline2_partition(vehicles, rsus, cfg);
  CHECK(p2.leaders.empty());
  for (int v = 0; v < 2; ++v)
    CHECK(p2.role[static_cast<size_t>(v)] == Role::Compelled);
}

TEST_CASE("baseline 2 relays an edge vehicle through a nearby mid-cell one") {
  ScenarioConfig cfg;
  cfg.highway_length_m = 2000;
  cfg.inter_rsu_distance_m = 1000;
  cfg.num_rsus = 2;
  // edge threshold = 0.4 * 1000 = 400 m from the nearest RSU
  auto vehicles = vehicles_at({950, 800});  // 950 is edge; 800 is not
  std::vector<RsuSite> rsus = {{0, 500, -35}, {1, 1500, 35}};

  const SlicePartition p = baseline2_partition(vehicles, rsus, cfg);
  CHECK(p.role[0] == Role::Free);
  CHECK(p.role[1] == Role::SliceLeader);
  CHECK(p.serving_sl[0] == 1);
}

TEST_CASE("baseline 2 leaves an isolated edge vehicle on V2I") {
  ScenarioConfig cfg;
  cfg.highway_length_m = 2000;
  cfg.inter_rsu_distance_m = 1000;
  cfg.num_rsus = 2;
  auto vehicles = vehicles_at({950, 400});  // nearest candidate 550 m away
  std::vector<RsuSite> rsus = {{0, 500, -35}, {1, 1500, 35}};

  const SlicePartition p = baseline2_partition(vehicles, rsus, cfg);
  CHECK(p.leaders.empty());
  CHECK(p.role[0] == Role::Compelled);
}

TEST_CASE("summary metrics recompute bit-exactly from persisted traces") {
  auto [cfg, catalog] = parse_config(small_config_json());
  TraceOptions opts;
  opts.queues = true;
  const std::string dir = "harness_recompute_out";
  fs::remove_all(dir);
  const RunResult res =
      run_slot_loop(cfg, catalog, SchedulerKind::Proposed, opts, dir);

  // violation fraction from the queue trace
  std::ifstream qf(fs::path(dir) / "queues.csv");
  std::string line;
  std::getline(qf, line);  // header
  long total = 0, bad = 0;
  while (std::getline(qf, line)) {
    long slot;
    double buffered;
    std::sscanf(line.c_str(), "%ld,%*d,%*[^,],%*[^,],%*[^,],%lf", &slot, &buffered);
    const size_t last_comma = line.rfind(',');
    buffered = std::strtod(line.c_str() + last_comma + 1, nullptr);
    if (!std::isfinite(buffered)) continue;
    if ((slot + 1) * cfg.slot_duration_s <= cfg.playback_threshold_s) continue;
    ++total;
    if (buffered <= cfg.playback_threshold_s) ++bad;
  }
  REQUIRE(total == res.summary.playback_samples);
  CHECK(static_cast<double>(bad) / total == res.summary.violation_fraction);

  // latency median from the sample file
  std::ifstream lf(fs::path(dir) / "latency_samples.csv");
  std::getline(lf, line);
  std::vector<double> secs;
  while (std::getline(lf, line)) {
    const size_t last_comma = line.rfind(',');
    secs.push_back(std::strtod(line.c_str() + last_comma + 1, nullptr));
  }
  REQUIRE(static_cast<long>(secs.size()) == res.summary.latency_samples);
  REQUIRE(!secs.empty());
  EmpiricalDistribution dist(secs);
  CHECK(dist.quantile(0.5) == res.summary.latency_median_s);
  fs::remove_all(dir);
}

TEST_CASE("scheduler names round-trip") {
  CHECK(scheduler_from_name("proposed") == SchedulerKind::Proposed);
  CHECK(scheduler_from_name(scheduler_name(SchedulerKind::Baseline2)) ==
        SchedulerKind::Baseline2);
  CHECK_THROWS_AS(scheduler_from_name("nope"), std::invalid_argument);
}
