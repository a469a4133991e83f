#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slicesim/mobility.hpp"
#include "slicesim/model.hpp"

namespace slicesim {

struct TxRef {
  enum Kind : std::uint8_t { Rsu = 0, Sl = 1 };
  Kind kind = Rsu;
  int index = 0;  // RSU id, or SL slot index into ChannelSnapshot::sl_ids
};

// Which (transmitter, RB) pairs carried power in the previous slot. The
// scheduler cannot know the concurrent decisions of other cells, so
// interference is computed against this one-slot-lagged activity map.
struct ActivityMask {
  int num_rsus = 0, num_sls = 0, rbs_rsu = 0, rbs_sl = 0;
  std::vector<std::uint8_t> rsu;  // b * rbs_rsu + m
  std::vector<std::uint8_t> sl;   // s * rbs_sl + m
  std::vector<int> sl_ids;        // SL slot index -> vehicle id (previous epoch)

  static ActivityMask silent(int rsus, int sls, int m_rsu, int m_sl) {
    ActivityMask a;
    a.num_rsus = rsus;
    a.num_sls = sls;
    a.rbs_rsu = m_rsu;
    a.rbs_sl = m_sl;
    a.rsu.assign(static_cast<size_t>(rsus) * m_rsu, 0);
    a.sl.assign(static_cast<size_t>(sls) * m_sl, 0);
    return a;
  }
  static ActivityMask from_decision(const SlotDecision& d,
                                    const std::vector<int>& sl_ids);
};

// Per-slot channel state: power gains for every potential link and RB of the
// relevant pool, plus the lagged activity map driving interference.
struct ChannelSnapshot {
  int num_rsus = 0, num_sls = 0, num_vehicles = 0;
  int rbs_rsu = 0, rbs_sl = 0;
  double p_rsu_rb_w = 0;  // tx power per RB (uniform split over the pool)
  double p_sl_rb_w = 0;
  double noise_w = 0;
  double rb_bandwidth_hz = 0;
  std::vector<int> sl_ids;     // SL slot index -> vehicle id
  std::vector<double> g_rsu;   // (b * V + v) * rbs_rsu + m
  std::vector<double> g_sl;    // (s * V + v) * rbs_sl + m
  ActivityMask activity;

  double gain(TxRef tx, int v, int m) const {
    if (tx.kind == TxRef::Rsu)
      return g_rsu[(static_cast<size_t>(tx.index) * num_vehicles + v) * rbs_rsu + m];
    return g_sl[(static_cast<size_t>(tx.index) * num_vehicles + v) * rbs_sl + m];
  }
  double tx_power_rb(TxRef tx) const {
    return tx.kind == TxRef::Rsu ? p_rsu_rb_w : p_sl_rb_w;
  }
  int sl_index_of(int vehicle) const {
    for (size_t i = 0; i < sl_ids.size(); ++i)
      if (sl_ids[i] == vehicle) return static_cast<int>(i);
    return -1;
  }
};

// Free-space intercept at the 1 m reference distance.
double pathloss_intercept(double carrier_hz);

// Log-distance power gain with the distance clamped to the 1 m reference.
double pathloss_gain(double distance_m, double intercept, double exponent);

// Samples the V2I block (all RSU -> vehicle gains) into `snap`, sizing it.
// Fading draws are i.i.d. across links, RBs and slots.
void sample_v2i(ChannelSnapshot& snap, const std::vector<VehicleState>& vehicles,
                const std::vector<RsuSite>& rsus, const ScenarioConfig& cfg,
                Rng& rng);

// Samples the V2V block for the given slice leaders (vehicle ids).
void sample_v2v(ChannelSnapshot& snap, const std::vector<VehicleState>& vehicles,
                const std::vector<int>& sl_ids, const ScenarioConfig& cfg,
                Rng& rng);

// Full snapshot for an already-known partition.
ChannelSnapshot sample_channel(const std::vector<VehicleState>& vehicles,
                               const std::vector<RsuSite>& rsus,
                               const SlicePartition& partition,
                               const ActivityMask& previous_activity,
                               const ScenarioConfig& cfg, Rng& rng);

// Co-channel interference power at vehicle v on RB m when served by `tx`;
// sums transmitters of the same pool that were active on m, excluding tx.
double interference(const ChannelSnapshot& snap, TxRef tx, int v, int m);

// p |h|^2 / (sigma^2 + I); finite because sigma^2 > 0.
double sinr(const ChannelSnapshot& snap, TxRef tx, int v, int m);

// Shannon rate over a set of RBs: sum of phi * log2(1 + sinr).
double link_rate(const ChannelSnapshot& snap, TxRef tx, int v,
                 std::span<const int> rbs);

}  // namespace slicesim
