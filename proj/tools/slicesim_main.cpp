// Command-line experiment runner: single runs, sweep plans, config
// validation and the scheduler-vs-oracle equivalence suite.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "slicesim/config_io.hpp"
#include "slicesim/harness.hpp"

using namespace slicesim;

int main(int argc, char** argv) {
  CLI::App app{"sliced vehicular video streaming simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string scheduler = "proposed";
  std::string plan_path;
  long seed_override = -1;
  int workers = 1;
  int oracle_instances = 100;
  TraceOptions traces;

  CLI::App* validate = app.add_subcommand("validate", "check a config file");
  validate->add_option("--config", config_path, "config file (JSON)")->required();

  CLI::App* run = app.add_subcommand("run", "run a single cell");
  run->add_option("--config", config_path, "config file (JSON)")->required();
  run->add_option("--scheduler", scheduler, "proposed|baseline1|baseline2");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed_override, "override sim.seed");
  run->add_flag("--trace-queues", traces.queues, "per-slot queue trace");
  run->add_flag("--trace-decisions", traces.decisions, "per-slot decision trace");
  run->add_flag("--trace-sinr", traces.sinr, "per-slot serving-link SINR trace");
  run->add_flag("--trace-topology", traces.topology, "initial topology dump");

  CLI::App* plan = app.add_subcommand("plan", "run a sweep campaign");
  plan->add_option("--config", config_path, "base config file (JSON)")->required();
  plan->add_option("--plan", plan_path, "plan file (JSON)")->required();
  plan->add_option("--out", out_dir, "output directory");
  plan->add_option("--workers", workers, "parallel cells");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "scheduler-vs-oracle equivalence suite on micro-instances");
  oracle->add_option("--instances", oracle_instances, "number of instances");
  oracle->add_option("--seed", seed_override, "suite seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      auto [cfg, catalog] = load_config(config_path);
      std::printf("config ok: %d RSUs, %ld slots, %d quality levels\n",
                  cfg.effective_num_rsus(), cfg.total_slots(),
                  catalog.num_levels());
      return 0;
    }
    if (run->parsed()) {
      nlohmann::json cfg_json = load_config_json(config_path);
      auto [cfg, catalog] = parse_config(cfg_json);
      if (seed_override >= 0)
        cfg.seed = static_cast<std::uint64_t>(seed_override);
      const RunResult res = run_slot_loop(
          cfg, catalog, scheduler_from_name(scheduler), traces, out_dir);
      const RunSummary& s = res.summary;
      std::printf("%s: qoe=%.4f violation=%.4f latency_p50=%.4gs p99=%.4gs "
                  "clusters=%.2f violations=%ld\n",
                  s.scheduler.c_str(), s.network_qoe, s.violation_fraction,
                  s.latency_median_s, s.latency_p99_s, s.mean_cluster_count,
                  s.constraint_violations);
      if (s.constraint_violations > 0) {
        std::fprintf(stderr, "constraint violations: %s\n",
                     res.first_violation.c_str());
        return 1;
      }
      return 0;
    }
    if (plan->parsed()) {
      const nlohmann::json base = load_config_json(config_path);
      parse_config(base);  // fail fast on a bad base config
      ExperimentPlan p = load_plan(load_config_json(plan_path), base, out_dir);
      p.workers = workers;
      const PlanOutcome outcome = run_plan(p);
      std::printf("plan: %d cells, %d failed\n", outcome.cells,
                  outcome.failures);
      return outcome.failures == 0 ? 0 : 1;
    }
    if (oracle->parsed()) {
      const OracleSuiteResult r = run_oracle_suite(
          oracle_instances,
          seed_override >= 0 ? static_cast<std::uint64_t>(seed_override) : 7);
      std::printf("oracle suite: %d instances, %d exact, %d within 5%%, "
                  "worst gap %.3g, mean gap %.3g\n",
                  r.instances, r.exact_matches, r.within_tolerance, r.worst_gap,
                  r.mean_gap);
      return (r.within_tolerance == r.instances &&
              r.exact_matches * 5 >= r.instances * 4)
                 ? 0
                 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
