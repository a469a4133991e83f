#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "slicesim/metrics.hpp"
#include "slicesim/model.hpp"
#include "slicesim/queueing.hpp"
#include "slicesim/scheduler.hpp"

namespace slicesim {

enum class SchedulerKind { Proposed, Baseline1, Baseline2 };

const char* scheduler_name(SchedulerKind k);
SchedulerKind scheduler_from_name(const std::string& name);

struct TraceOptions {
  bool queues = false;     // per-slot queue trace (large)
  bool decisions = false;  // per-slot decision trace (large)
  bool sinr = false;       // per-slot per-RB SINR trace (very large)
  bool topology = false;   // initial vehicle/RSU placement
  bool partition = true;   // per-epoch partition trace
  bool check_every_slot = true;  // run the constraint checker on every slot
};

struct RunSummary {
  std::string scheduler;
  long slots = 0;
  int vehicles = 0;
  int rsus = 0;
  double network_qoe = 0;
  double mean_vehicle_qoe = 0;
  double violation_fraction = 0;  // playback reliability, post warm-up
  long playback_samples = 0;
  double latency_mean_s = 0;
  double latency_median_s = 0;
  double latency_p99_s = 0;
  long latency_samples = 0;
  double mean_cluster_count = 0;
  std::vector<double> level_fractions;
  double idle_fraction = 0;
  long constraint_violations = 0;
  long backhaul_scaled_slots = 0;
  long backhaul_starved_slots = 0;
  double mean_ccp_iterations = 0;
  std::string config_hash;

  nlohmann::json to_json() const;
};

struct RunResult {
  RunSummary summary;
  std::vector<double> playback_samples;          // post warm-up buffered seconds
  std::vector<LatencySample> latency_samples;
  std::vector<std::vector<int>> chunk_levels;    // per vehicle, per chunk
  std::vector<int> epoch_cluster_counts;
  std::vector<double> virt_mid;                  // virtual queues at T/2
  std::vector<double> virt_final;                // and at T
  std::string first_violation;                   // first checker message, if any
};

// Executes the slot loop: advance -> channel -> (re-slice) -> coefficients ->
// solve -> backhaul -> queues -> metrics. Deterministic given (cfg, seed).
// out_dir may be empty to skip all file output.
RunResult run_slot_loop(const ScenarioConfig& cfg, const VideoCatalog& catalog,
                        SchedulerKind kind, const TraceOptions& traces,
                        const std::string& out_dir);

// Epoch partition builders. The proposed pipeline runs weak-set detection,
// spectral clustering and leader election; baseline 2 relays vehicles in the
// outer fraction of the inter-RSU span through the nearest in-range
// mid-cell vehicle (no clustering, no candidate -> stays on V2I).
SlicePartition proposed_partition(const ChannelSnapshot& snap,
                                  const std::vector<VehicleState>& vehicles,
                                  const std::vector<RsuSite>& rsus,
                                  const ScenarioConfig& cfg, Rng& rng_kmeans);
SlicePartition baseline2_partition(const std::vector<VehicleState>& vehicles,
                                   const std::vector<RsuSite>& rsus,
                                   const ScenarioConfig& cfg);

// ---------------------------------------------------------------------------
// Experiment plans: cartesian sweeps x replications x schedulers.
// ---------------------------------------------------------------------------
struct SweepSpec {
  std::string path;                    // dot path into the config tree
  std::vector<nlohmann::json> values;
};

struct ExperimentPlan {
  nlohmann::json base_config;          // overlay onto the defaults
  std::vector<SweepSpec> sweeps;
  int replications = 1;
  std::vector<SchedulerKind> schedulers;
  std::string out_dir;
  int workers = 1;
  TraceOptions traces;
};

// Parses a plan file: {"sweeps": [{"path":..., "values":[...]}],
// "replications": n, "schedulers": [...]}. Sweep paths are validated
// against the config schema before any run starts.
ExperimentPlan load_plan(const nlohmann::json& plan_json,
                         const nlohmann::json& base_config,
                         const std::string& out_dir);

struct PlanOutcome {
  int cells = 0;
  int failures = 0;
};

// Runs every cell into out_dir/<cell>/, writes manifest.json and results.csv,
// plus figure-analogue sweep files when the swept parameter matches.
// Cell seeds derive from (base seed, sweep index, replication).
PlanOutcome run_plan(const ExperimentPlan& plan);

// ---------------------------------------------------------------------------
// Scheduler-vs-oracle equivalence suite on random micro-instances.
// ---------------------------------------------------------------------------
struct OracleSuiteResult {
  int instances = 0;
  int exact_matches = 0;
  double worst_gap = 0;       // relative to max(1, |oracle value|)
  double mean_gap = 0;
  int within_tolerance = 0;   // gap <= 5%
};

OracleSuiteResult run_oracle_suite(int instances, std::uint64_t seed);

}  // namespace slicesim
