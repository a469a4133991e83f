#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "slicesim/rng.hpp"

namespace slicesim {

// ---------------------------------------------------------------------------
// Unit helpers. All internal arithmetic is linear scale / SI; dB and dBm
// appear only at the config boundary and in traces.
// ---------------------------------------------------------------------------
inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double kmh_to_mps(double kmh) { return kmh / 3.6; }

// ---------------------------------------------------------------------------
// Video catalog: the quality ladder and the chunk timeline.
// ---------------------------------------------------------------------------
struct VideoLevel {
  std::string label;   // e.g. "240p"
  double rate_bps = 0; // encoding rate r^(j)
};

struct VideoCatalog {
  std::vector<VideoLevel> levels;  // ordered, rates strictly increasing
  double chunk_duration_s = 1.0;
  int num_chunks = 0;  // 0 = stream for the whole run

  int num_levels() const { return static_cast<int>(levels.size()); }
  double rate(int j) const { return levels[static_cast<size_t>(j)].rate_bps; }
  // Marginal rate of adding level j on top of the prefix below it.
  double rate_increment(int j) const {
    return j == 0 ? levels[0].rate_bps
                  : levels[static_cast<size_t>(j)].rate_bps -
                        levels[static_cast<size_t>(j) - 1].rate_bps;
  }
};

// ---------------------------------------------------------------------------
// Scenario configuration. Field units are fixed (meters, seconds, watts,
// hertz, bits/second); the config file accepts the usual field units
// (dBm, km/h, kbps) and conversion happens at load.
// ---------------------------------------------------------------------------
struct ScenarioConfig {
  // highway layout
  double highway_length_m = 10000.0;
  int num_lanes = 6;
  double lane_width_m = 4.0;
  double vehicle_speed_ms = kmh_to_mps(140.0);
  double inter_vehicle_distance_m = 800.0;

  // RSU grid and slice-leader radios
  int num_rsus = 0;  // 0 = derive as floor(highway_length / inter_rsu_distance)
  double inter_rsu_distance_m = 1732.0;
  double rsu_lateral_offset_m = 35.0;
  double rsu_tx_power_w = dbm_to_watts(46.0);
  double sl_tx_power_w = dbm_to_watts(20.0);

  // radio resources
  double rb_bandwidth_hz = 180e3;
  int num_rbs_rsu = 25;
  int num_rbs_sl = 25;
  double noise_power_w = dbm_to_watts(-112.4);  // per RB
  double carrier_v2i_hz = 2.0e9;
  double carrier_v2v_hz = 5.9e9;
  double pathloss_exp_v2i = 3.68;
  double pathloss_exp_v2v = 2.75;
  bool fading = true;

  // control parameters
  double epsilon = 0.1;            // reliability target of the playback constraint
  double playback_threshold_s = 0.5;  // psi
  double gamma = 0.9;              // per-level QoE weight base
  double beta = 0.5;               // switching-penalty weight
  double alpha = 10.0;             // s-curve slope
  double eta = 1e9;                // drift/penalty tradeoff
  int ccp_max_iters = 20;
  double ccp_tolerance = 1e-6;     // relative improvement stop
  bool qoe_weight_descending = false;  // weight gamma^(J-1-j) instead of gamma^j

  // slicing
  double neighborhood_size_m = 100.0;  // sigma_nb of the similarity kernel
  int reslicing_period_slots = 100;
  double weak_sinr_threshold_db = 3.0;
  bool squared_kernel = false;  // exp(-d^2 / 2 sigma^2) instead of exp(-d / 2 sigma^2)
  int kmeans_restarts = 50;

  // baseline 2 relaying rule
  double baseline2_relay_range_m = 200.0;
  double baseline2_edge_fraction = 0.2;  // outer fraction of the inter-RSU span

  // simulation
  double slot_duration_s = 1e-3;
  double duration_s = 30.0;
  std::uint64_t seed = 1;

  int effective_num_rsus() const {
    if (num_rsus > 0) return num_rsus;
    return static_cast<int>(std::floor(highway_length_m / inter_rsu_distance_m));
  }
  long total_slots() const {
    return static_cast<long>(std::llround(duration_s / slot_duration_s));
  }
  long slots_per_chunk(const VideoCatalog& cat) const {
    return static_cast<long>(std::llround(cat.chunk_duration_s / slot_duration_s));
  }
  // QoE weight of level j (see VideoCatalog); qoe_weight_descending flips the
  // exponent so higher levels carry the larger weight.
  double level_weight(int j, int num_levels) const {
    const int e = qoe_weight_descending ? (num_levels - 1 - j) : j;
    return std::pow(gamma, e);
  }
};

// Returns every violated invariant, empty when the configuration is valid.
std::vector<std::string> validate_config(const ScenarioConfig& cfg,
                                         const VideoCatalog& catalog);

// ---------------------------------------------------------------------------
// Slice partition: the (S, F, C) split with link indicators.
// ---------------------------------------------------------------------------
enum class Role : std::uint8_t { Compelled = 0, Free = 1, SliceLeader = 2 };

const char* role_name(Role r);

struct SlicePartition {
  int num_vehicles = 0;
  std::vector<Role> role;        // indexed by vehicle id
  std::vector<int> serving_rsu;  // RSU id; for free vehicles the RSU behind their SL
  std::vector<int> serving_sl;   // leader vehicle id for free vehicles, else -1
  std::vector<int> leaders;            // sorted slice-leader ids
  std::vector<std::vector<int>> members;  // members[i] = free vehicles of leaders[i]

  int leader_index(int vehicle) const {
    for (size_t i = 0; i < leaders.size(); ++i)
      if (leaders[i] == vehicle) return static_cast<int>(i);
    return -1;
  }
  // Link indicator l_bv: true when the serving link is V2I.
  bool via_rsu(int v) const { return role[static_cast<size_t>(v)] != Role::Free; }
  int num_sls() const { return static_cast<int>(leaders.size()); }

  // All vehicles compelled, attached to their nearest RSU (given per caller).
  static SlicePartition all_compelled(const std::vector<int>& serving_rsu);
};

// Verifies the set-partition equations against the full vehicle set; each
// violation names the failed sub-equation (1a..1e).
std::vector<std::string> check_partition(const SlicePartition& p,
                                         const std::vector<int>& all_vehicles);

// ---------------------------------------------------------------------------
// One slot's joint RB assignment and quality choice.
// ---------------------------------------------------------------------------
struct SlotDecision {
  int num_vehicles = 0;
  int num_rsus = 0;
  int num_sls = 0;
  int rbs_rsu = 0;
  int rbs_sl = 0;

  // Owner maps: vehicle id or -1 per (transmitter, RB). RBs are reused across
  // transmitters of the same kind; uniqueness holds per transmitter.
  std::vector<int> rsu_owner;  // b * rbs_rsu + m
  std::vector<int> sl_owner;   // s * rbs_sl + m

  std::vector<int> level;          // selected level per vehicle, -1 = none
  std::vector<double> backhaul_bps;  // per SL slot index: r_bs
  std::vector<double> relay_bps;     // per vehicle: effective SL->vehicle rate
  std::vector<double> relay_scale;   // per SL slot index, from backhaul enforcement

  static SlotDecision empty(int vehicles, int rsus, int sls, int m_rsu, int m_sl);

  int rsu_owner_at(int b, int m) const { return rsu_owner[static_cast<size_t>(b) * rbs_rsu + m]; }
  int sl_owner_at(int s, int m) const { return sl_owner[static_cast<size_t>(s) * rbs_sl + m]; }
  void set_rsu_owner(int b, int m, int v) { rsu_owner[static_cast<size_t>(b) * rbs_rsu + m] = v; }
  void set_sl_owner(int s, int m, int v) { sl_owner[static_cast<size_t>(s) * rbs_sl + m] = v; }

  // Cumulative quality indicator z_v^(j); a prefix by construction.
  bool z(int v, int j) const { return level[static_cast<size_t>(v)] >= j; }

  // RBs held by a vehicle in the given pool of the given transmitter.
  std::vector<int> held_rbs_rsu(int b, int v) const;
  std::vector<int> held_rbs_sl(int s, int v) const;
};

// Required rate r^req for a selected level (-1 = idle, rate 0).
double required_rate_bps(const VideoCatalog& catalog, int level);

// Required rate evaluated from an explicit z vector via the per-level rate
// increments; equals required_rate_bps(level) for every valid prefix.
double required_rate_from_z(const VideoCatalog& catalog,
                            const std::vector<int>& z);

}  // namespace slicesim
