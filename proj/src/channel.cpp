#include "slicesim/channel.hpp"

namespace slicesim {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
}

ActivityMask ActivityMask::from_decision(const SlotDecision& d,
                                         const std::vector<int>& sl_ids) {
  ActivityMask a = silent(d.num_rsus, d.num_sls, d.rbs_rsu, d.rbs_sl);
  a.sl_ids = sl_ids;
  for (size_t i = 0; i < d.rsu_owner.size(); ++i)
    a.rsu[i] = d.rsu_owner[i] >= 0 ? 1 : 0;
  for (size_t i = 0; i < d.sl_owner.size(); ++i)
    a.sl[i] = d.sl_owner[i] >= 0 ? 1 : 0;
  return a;
}

double pathloss_intercept(double carrier_hz) {
  const double lambda = kSpeedOfLight / carrier_hz;
  const double k = lambda / (4.0 * M_PI);
  return k * k;
}

double pathloss_gain(double distance_m, double intercept, double exponent) {
  const double d = distance_m < 1.0 ? 1.0 : distance_m;
  return intercept * std::pow(d, -exponent);
}

void sample_v2i(ChannelSnapshot& snap, const std::vector<VehicleState>& vehicles,
                const std::vector<RsuSite>& rsus, const ScenarioConfig& cfg,
                Rng& rng) {
  const int num_b = static_cast<int>(rsus.size());
  const int num_v = static_cast<int>(vehicles.size());
  snap.num_rsus = num_b;
  snap.num_vehicles = num_v;
  snap.rbs_rsu = cfg.num_rbs_rsu;
  snap.rbs_sl = cfg.num_rbs_sl;
  snap.p_rsu_rb_w = cfg.rsu_tx_power_w / cfg.num_rbs_rsu;
  snap.p_sl_rb_w = cfg.sl_tx_power_w / cfg.num_rbs_sl;
  snap.noise_w = cfg.noise_power_w;
  snap.rb_bandwidth_hz = cfg.rb_bandwidth_hz;
  snap.g_rsu.assign(static_cast<size_t>(num_b) * num_v * cfg.num_rbs_rsu, 0.0);

  const double k_v2i = pathloss_intercept(cfg.carrier_v2i_hz);
  size_t idx = 0;
  for (int b = 0; b < num_b; ++b) {
    for (int v = 0; v < num_v; ++v) {
      const double d = ring_distance(rsus[static_cast<size_t>(b)].x,
                                     rsus[static_cast<size_t>(b)].y,
                                     vehicles[static_cast<size_t>(v)].x,
                                     vehicles[static_cast<size_t>(v)].y,
                                     cfg.highway_length_m);
      const double pl = pathloss_gain(d, k_v2i, cfg.pathloss_exp_v2i);
      for (int m = 0; m < cfg.num_rbs_rsu; ++m, ++idx)
        snap.g_rsu[idx] = cfg.fading ? pl * rng.exponential() : pl;
    }
  }
}

void sample_v2v(ChannelSnapshot& snap, const std::vector<VehicleState>& vehicles,
                const std::vector<int>& sl_ids, const ScenarioConfig& cfg,
                Rng& rng) {
  const int num_v = static_cast<int>(vehicles.size());
  const int num_s = static_cast<int>(sl_ids.size());
  snap.num_sls = num_s;
  snap.sl_ids = sl_ids;
  snap.g_sl.assign(static_cast<size_t>(num_s) * num_v * cfg.num_rbs_sl, 0.0);

  const double k_v2v = pathloss_intercept(cfg.carrier_v2v_hz);
  size_t idx = 0;
  for (int s = 0; s < num_s; ++s) {
    const VehicleState& tx = vehicles[static_cast<size_t>(sl_ids[static_cast<size_t>(s)])];
    for (int v = 0; v < num_v; ++v) {
      const double d = ring_distance(tx.x, tx.y, vehicles[static_cast<size_t>(v)].x,
                                     vehicles[static_cast<size_t>(v)].y,
                                     cfg.highway_length_m);
      const double pl = pathloss_gain(d, k_v2v, cfg.pathloss_exp_v2v);
      for (int m = 0; m < cfg.num_rbs_sl; ++m, ++idx)
        snap.g_sl[idx] = cfg.fading ? pl * rng.exponential() : pl;
    }
  }
}

ChannelSnapshot sample_channel(const std::vector<VehicleState>& vehicles,
                               const std::vector<RsuSite>& rsus,
                               const SlicePartition& partition,
                               const ActivityMask& previous_activity,
                               const ScenarioConfig& cfg, Rng& rng) {
  ChannelSnapshot snap;
  sample_v2i(snap, vehicles, rsus, cfg, rng);
  sample_v2v(snap, vehicles, partition.leaders, cfg, rng);
  snap.activity = previous_activity;
  return snap;
}

double interference(const ChannelSnapshot& snap, TxRef tx, int v, int m) {
  double total = 0.0;
  const ActivityMask& act = snap.activity;
  if (tx.kind == TxRef::Rsu) {
    for (int b = 0; b < act.num_rsus && b < snap.num_rsus; ++b) {
      if (b == tx.index) continue;
      if (m < act.rbs_rsu && act.rsu[static_cast<size_t>(b) * act.rbs_rsu + m])
        total += snap.p_rsu_rb_w * snap.gain({TxRef::Rsu, b}, v, m);
    }
  } else {
    // Interfering SLs are looked up by vehicle id: the activity map may stem
    // from a previous epoch with a different SL set.
    for (int sa = 0; sa < act.num_sls; ++sa) {
      if (m >= act.rbs_sl || !act.sl[static_cast<size_t>(sa) * act.rbs_sl + m])
        continue;
      const int veh = sa < static_cast<int>(act.sl_ids.size())
                          ? act.sl_ids[static_cast<size_t>(sa)]
                          : -1;
      if (veh < 0) continue;
      const int cur = snap.sl_index_of(veh);
      if (cur < 0 || cur == tx.index) continue;
      total += snap.p_sl_rb_w * snap.gain({TxRef::Sl, cur}, v, m);
    }
  }
  return total;
}

double sinr(const ChannelSnapshot& snap, TxRef tx, int v, int m) {
  const double p = snap.tx_power_rb(tx);
  const double g = snap.gain(tx, v, m);
  return p * g / (snap.noise_w + interference(snap, tx, v, m));
}

double link_rate(const ChannelSnapshot& snap, TxRef tx, int v,
                 std::span<const int> rbs) {
  double rate = 0.0;
  for (int m : rbs)
    rate += snap.rb_bandwidth_hz * std::log2(1.0 + sinr(snap, tx, v, m));
  return rate;
}

}  // namespace slicesim
