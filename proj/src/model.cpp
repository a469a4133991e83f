#include "slicesim/model.hpp"

#include <algorithm>
#include <set>

namespace slicesim {

namespace {

void require(std::vector<std::string>& errs, bool ok, const std::string& msg) {
  if (!ok) errs.push_back(msg);
}

}  // namespace

std::vector<std::string> validate_config(const ScenarioConfig& cfg,
                                         const VideoCatalog& catalog) {
  std::vector<std::string> errs;

  require(errs, cfg.epsilon > 0.0 && cfg.epsilon < 1.0, "epsilon out of (0,1)");
  require(errs, cfg.gamma > 0.0 && cfg.gamma < 1.0, "gamma out of (0,1)");
  require(errs, cfg.beta >= 0.0 && cfg.beta <= 1.0, "beta out of [0,1]");
  require(errs, cfg.alpha > 0.0, "alpha must be > 0");
  require(errs, cfg.eta >= 0.0, "eta must be >= 0");

  require(errs, cfg.num_rbs_rsu >= 1, "num_rbs_rsu must be >= 1");
  require(errs, cfg.num_rbs_sl >= 1, "num_rbs_sl must be >= 1");
  require(errs, cfg.rsu_tx_power_w > 0.0, "rsu_tx_power must be > 0");
  require(errs, cfg.sl_tx_power_w > 0.0, "sl_tx_power must be > 0");
  require(errs, cfg.rb_bandwidth_hz > 0.0, "rb_bandwidth must be > 0");
  require(errs, cfg.noise_power_w > 0.0, "noise_power must be > 0");

  require(errs, cfg.highway_length_m > 0.0, "highway_length must be > 0");
  require(errs, cfg.inter_rsu_distance_m > 0.0, "inter_rsu_distance must be > 0");
  require(errs, cfg.inter_vehicle_distance_m > 0.0,
          "inter_vehicle_distance must be > 0");
  require(errs, cfg.lane_width_m > 0.0, "lane_width must be > 0");
  require(errs, cfg.rsu_lateral_offset_m > 0.0, "rsu_lateral_offset must be > 0");
  require(errs, cfg.num_lanes >= 1, "num_lanes must be >= 1");
  require(errs, cfg.vehicle_speed_ms >= 0.0, "vehicle_speed must be >= 0");
  require(errs, cfg.num_rsus >= 0, "num_rsus must be >= 0");
  require(errs, cfg.effective_num_rsus() >= 1,
          "no RSUs: highway shorter than inter_rsu_distance");

  require(errs, cfg.pathloss_exp_v2i > 0.0, "pathloss_exp_v2i must be > 0");
  require(errs, cfg.pathloss_exp_v2v > 0.0, "pathloss_exp_v2v must be > 0");
  require(errs, cfg.carrier_v2i_hz > 0.0, "carrier_v2i must be > 0");
  require(errs, cfg.carrier_v2v_hz > 0.0, "carrier_v2v must be > 0");

  require(errs, cfg.playback_threshold_s >= 0.0, "playback_threshold must be >= 0");
  require(errs, cfg.neighborhood_size_m > 0.0, "neighborhood_size must be > 0");
  require(errs, cfg.reslicing_period_slots >= 1, "reslicing_period must be >= 1");
  require(errs, !std::isnan(cfg.weak_sinr_threshold_db),
          "weak_sinr_threshold must not be NaN");
  require(errs, cfg.kmeans_restarts >= 1, "kmeans_restarts must be >= 1");
  require(errs, cfg.ccp_max_iters >= 1, "ccp_max_iters must be >= 1");
  require(errs, cfg.ccp_tolerance > 0.0, "ccp_tolerance must be > 0");
  require(errs, cfg.baseline2_relay_range_m > 0.0,
          "baseline2.relay_range must be > 0");
  require(errs, cfg.baseline2_edge_fraction > 0.0 && cfg.baseline2_edge_fraction < 0.5,
          "baseline2.edge_fraction out of (0,0.5)");

  require(errs, cfg.slot_duration_s > 0.0, "slot_duration must be > 0");
  require(errs, cfg.duration_s >= 0.0, "duration must be >= 0");

  require(errs, catalog.num_levels() >= 1, "video catalog needs >= 1 level");
  for (int j = 0; j < catalog.num_levels(); ++j) {
    require(errs, catalog.rate(j) > 0.0, "video rate must be > 0");
    if (j > 0 && !(catalog.rate(j) > catalog.rate(j - 1))) {
      errs.push_back("rates not increasing");
      break;
    }
  }
  require(errs, catalog.chunk_duration_s > 0.0, "chunk_duration must be > 0");
  require(errs, catalog.num_chunks >= 0, "num_chunks must be >= 0");
  return errs;
}

const char* role_name(Role r) {
  switch (r) {
    case Role::SliceLeader: return "SL";
    case Role::Free: return "FREE";
    case Role::Compelled: return "COMPELLED";
  }
  return "?";
}

SlicePartition SlicePartition::all_compelled(const std::vector<int>& serving_rsu) {
  SlicePartition p;
  p.num_vehicles = static_cast<int>(serving_rsu.size());
  p.role.assign(serving_rsu.size(), Role::Compelled);
  p.serving_rsu = serving_rsu;
  p.serving_sl.assign(serving_rsu.size(), -1);
  return p;
}

std::vector<std::string> check_partition(const SlicePartition& p,
                                         const std::vector<int>& all_vehicles) {
  std::vector<std::string> errs;
  const int n = static_cast<int>(all_vehicles.size());
  if (p.num_vehicles != n ||
      static_cast<int>(p.role.size()) != n ||
      static_cast<int>(p.serving_rsu.size()) != n ||
      static_cast<int>(p.serving_sl.size()) != n) {
    errs.push_back("1a: partition not sized to the vehicle set");
    return errs;
  }

  std::set<int> leaders(p.leaders.begin(), p.leaders.end());
  std::set<int> frees;
  std::set<int> compelled;
  long free_count = 0;
  for (int v : all_vehicles) {
    const Role r = p.role[static_cast<size_t>(v)];
    if (r == Role::Free) {
      frees.insert(v);
      ++free_count;
    } else if (r == Role::Compelled) {
      compelled.insert(v);
    }
  }

  // (1a) pairwise disjoint and cardinalities add up.
  for (int v : leaders) {
    if (frees.count(v)) errs.push_back("1a: sets overlap (vehicle " + std::to_string(v) + " in S and F)");
    if (compelled.count(v)) errs.push_back("1a: sets overlap (vehicle " + std::to_string(v) + " in S and C)");
  }
  for (int v : frees)
    if (compelled.count(v)) errs.push_back("1a: sets overlap (vehicle " + std::to_string(v) + " in F and C)");
  if (static_cast<long>(leaders.size()) + free_count +
          static_cast<long>(compelled.size()) != n)
    errs.push_back("1a: |V| != |S| + |F| + |C|");

  // Leaders listed must actually carry the SliceLeader role, and the member
  // lists must cover exactly the free set (1d: disjoint across SLs).
  if (p.members.size() != p.leaders.size())
    errs.push_back("1d: member lists not aligned with leaders");
  std::set<int> seen_members;
  for (size_t i = 0; i < p.leaders.size(); ++i) {
    const int s = p.leaders[i];
    if (s < 0 || s >= n || p.role[static_cast<size_t>(s)] != Role::SliceLeader)
      errs.push_back("1b: listed leader " + std::to_string(s) + " lacks the SL role");
    if (i < p.members.size()) {
      for (int v : p.members[i]) {
        if (!seen_members.insert(v).second)
          errs.push_back("1d: free vehicle " + std::to_string(v) + " in two clusters");
        if (v < 0 || v >= n || p.role[static_cast<size_t>(v)] != Role::Free)
          errs.push_back("1d: member " + std::to_string(v) + " is not a free vehicle");
        else if (p.serving_sl[static_cast<size_t>(v)] != s)
          errs.push_back("1d: member " + std::to_string(v) + " not linked to its SL");
      }
    }
  }
  if (seen_members != frees)
    errs.push_back("1a: free set not covered by cluster membership");

  // (1e) exactly one link indicator per vehicle, consistent with the role;
  // (1b)-(1c) follow from each SL/compelled vehicle having one serving RSU.
  for (int v : all_vehicles) {
    const Role r = p.role[static_cast<size_t>(v)];
    const int b = p.serving_rsu[static_cast<size_t>(v)];
    const int s = p.serving_sl[static_cast<size_t>(v)];
    if (r == Role::Free) {
      if (s < 0 || !leaders.count(s))
        errs.push_back("1e: free vehicle " + std::to_string(v) + " without serving SL");
      if (b < 0)
        errs.push_back("1d: free vehicle " + std::to_string(v) +
                       " without a backhaul RSU behind its SL");
    } else {
      if (b < 0)
        errs.push_back("1b: vehicle " + std::to_string(v) + " without serving RSU");
      if (s != -1)
        errs.push_back("1e: vehicle " + std::to_string(v) +
                       " has both link indicators set");
    }
  }
  return errs;
}

SlotDecision SlotDecision::empty(int vehicles, int rsus, int sls, int m_rsu,
                                 int m_sl) {
  SlotDecision d;
  d.num_vehicles = vehicles;
  d.num_rsus = rsus;
  d.num_sls = sls;
  d.rbs_rsu = m_rsu;
  d.rbs_sl = m_sl;
  d.rsu_owner.assign(static_cast<size_t>(rsus) * m_rsu, -1);
  d.sl_owner.assign(static_cast<size_t>(sls) * m_sl, -1);
  d.level.assign(static_cast<size_t>(vehicles), -1);
  d.backhaul_bps.assign(static_cast<size_t>(sls), 0.0);
  d.relay_bps.assign(static_cast<size_t>(vehicles), 0.0);
  d.relay_scale.assign(static_cast<size_t>(sls), 1.0);
  return d;
}

std::vector<int> SlotDecision::held_rbs_rsu(int b, int v) const {
  std::vector<int> out;
  for (int m = 0; m < rbs_rsu; ++m)
    if (rsu_owner_at(b, m) == v) out.push_back(m);
  return out;
}

std::vector<int> SlotDecision::held_rbs_sl(int s, int v) const {
  std::vector<int> out;
  for (int m = 0; m < rbs_sl; ++m)
    if (sl_owner_at(s, m) == v) out.push_back(m);
  return out;
}

double required_rate_bps(const VideoCatalog& catalog, int level) {
  if (level < 0) return 0.0;
  return catalog.rate(level);
}

double required_rate_from_z(const VideoCatalog& catalog,
                            const std::vector<int>& z) {
  double r = 0.0;
  for (int j = 0; j < catalog.num_levels() && j < static_cast<int>(z.size()); ++j)
    if (z[static_cast<size_t>(j)]) r += catalog.rate_increment(j);
  return r;
}

}  // namespace slicesim
