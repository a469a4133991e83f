#pragma once

#include <vector>

#include "slicesim/channel.hpp"
#include "slicesim/model.hpp"
#include "slicesim/queueing.hpp"

namespace slicesim {

// ---------------------------------------------------------------------------
// QoE scoring: per-chunk quality term plus the switching penalty.
// ---------------------------------------------------------------------------

// S-curve surrogate of the downward-switch indicator, 0.5 at equal levels.
// Computed in a saturation-safe form.
double sigmoid_penalty(int z_now, int z_prev, double alpha);

// Per-chunk score: sum of level weights up to the selected level, minus beta
// times the switching penalty. A level of -1 means no chunk was fetched and
// is exempt from the penalty on either side of the transition.
double chunk_qoe_score(int level, int prev_level, const ScenarioConfig& cfg,
                       int num_levels, bool use_sigmoid);

struct QoeResult {
  std::vector<double> per_vehicle;  // mean per-chunk score
  double network = 0;               // sum over vehicles
};

// QoE over complete per-vehicle chunk histories (exact indicator by default).
QoeResult qoe_objective(const std::vector<std::vector<int>>& levels_per_vehicle,
                        const ScenarioConfig& cfg, const VideoCatalog& catalog,
                        bool use_sigmoid = false);

// ---------------------------------------------------------------------------
// The per-slot program: minimize sum_v x theta + z phi - x z zeta subject to
// the partition, prefix, pool and backhaul constraints.
// ---------------------------------------------------------------------------

struct SlotProblem {
  const SlicePartition* partition = nullptr;
  const VideoCatalog* catalog = nullptr;
  const ScenarioConfig* cfg = nullptr;
  int num_rsus = 0;
  bool chunk_boundary = true;       // when false, z stays at held_level
  std::vector<int> held_level;      // per vehicle, current chunk's choice
  // Smallest admissible level at a boundary. Active streaming sessions floor
  // at the lowest quality (an idle vehicle would trivially defeat the
  // playback constraint); -1 opens the full lattice including "none".
  int min_level = 0;
};

struct DppCoefficients {
  int num_vehicles = 0;
  int num_levels = 0;
  int rbs_rsu = 0;
  int rbs_sl = 0;
  double one_plus_eps_psi = 1.0;
  std::vector<double> level_rate;      // r^(j)
  std::vector<double> rate_coef;       // phi_bw log2(1+sinr), v * stride + m
  std::vector<double> theta;           // RB coefficient, v * stride + m
  std::vector<double> phi;             // quality coefficient (per vehicle)
  std::vector<double> pressure_theta;  // role bracket behind theta
  std::vector<double> pressure_phi;    // own-queue bracket behind phi
  // CCP anchor (a, b): previous-iterate values of (x, z).
  std::vector<std::uint8_t> anchor_x;  // v * stride + m
  std::vector<int> anchor_level;       // per vehicle, -1 = none

  int stride() const { return rbs_rsu > rbs_sl ? rbs_rsu : rbs_sl; }
  double rate_at(int v, int m) const {
    return rate_coef[static_cast<size_t>(v) * stride() + m];
  }
  double theta_at(int v, int m) const {
    return theta[static_cast<size_t>(v) * stride() + m];
  }
  // Cross-term weight zeta = c * r^(j) * (1 + eps psi).
  double zeta(int v, int m, int j) const {
    return rate_at(v, m) * level_rate[static_cast<size_t>(j)] * one_plus_eps_psi;
  }
};

// Builds theta/phi/zeta from the queue and channel state. The bracket behind
// theta is role-dependent: U-based outside F, Y-based (both queues) inside F;
// a slice leader's bracket additionally carries the RSU-side backlogs of its
// cluster so the backhaul competes for V2I resources on their behalf.
DppCoefficients compute_coefficients(const QueueState& queues,
                                     const ChannelSnapshot& snap,
                                     const SlicePartition& partition,
                                     const VideoCatalog& catalog,
                                     const ScenarioConfig& cfg);

struct SchedulerOutcome {
  SlotDecision decision;
  double surrogate_value = 0;
  int ccp_iterations = 0;
  bool converged = true;
  // True objective value after each CCP iteration (non-increasing).
  std::vector<double> iteration_values;
};

// The exact drift-plus-penalty value of a decision, bilinear term included.
double true_dpp_value(const DppCoefficients& coeffs, const SlotProblem& problem,
                      const SlotDecision& decision);

// CCP outer loop over the boundary-slot program; between chunk boundaries z
// is frozen and the RB assignment is re-optimized exactly per RB.
SchedulerOutcome ccp_solve(const DppCoefficients& coeffs,
                           const SlotProblem& problem);

// Exhaustive minimizer of the true objective over all feasible (x, z).
// Refuses instances beyond 2^20 combinations or with slice leaders present
// (the backhaul constraint couples pools; micro-instances are single-hop).
SchedulerOutcome oracle_solve(const DppCoefficients& coeffs,
                              const SlotProblem& problem);

// ---------------------------------------------------------------------------
// Baselines: proportional-fair RB assignment with greedy quality selection.
// Baseline 1 is V2I-only; baseline 2 relays cell-edge vehicles through a
// fixed nearby relay (partition built by the harness each epoch).
// ---------------------------------------------------------------------------
class BaselineScheduler {
 public:
  BaselineScheduler(int num_vehicles, double pf_window = 0.05)
      : ewma_bps_(static_cast<size_t>(num_vehicles), 0.0),
        level_(static_cast<size_t>(num_vehicles), 0),
        pf_weight_(pf_window) {}

  SchedulerOutcome schedule(const SlotProblem& problem,
                            const ChannelSnapshot& snap,
                            const QueueState& queues);

  const std::vector<double>& ewma_bps() const { return ewma_bps_; }

 private:
  std::vector<double> ewma_bps_;
  std::vector<int> level_;
  double pf_weight_;
};

// ---------------------------------------------------------------------------
// Backhaul feasibility: r_bs - sum relays >= r_s^req per slice leader.
// ---------------------------------------------------------------------------
struct BackhaulReport {
  int repaired_rbs = 0;   // RBs reassigned to cover a leader's own demand
  int scaled_links = 0;   // relay sets scaled down proportionally
  int starved_sls = 0;    // leaders whose own demand is uncoverable
};

// Verifies each leader's V2I rate against its own demand plus the planned
// relay service; scales relays proportionally when short, first reassigning
// RSU RBs toward the leader when even its own demand is uncovered. Fills
// decision.backhaul_bps / relay_bps / relay_scale.
BackhaulReport enforce_backhaul(SlotDecision& decision,
                                const ChannelSnapshot& snap,
                                const SlicePartition& partition,
                                const VideoCatalog& catalog,
                                const ScenarioConfig& cfg);

}  // namespace slicesim
