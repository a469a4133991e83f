#include "slicesim/checker.hpp"

#include <cmath>

namespace slicesim {

std::vector<std::string> check_decision(const SlotDecision& decision,
                                        const SlicePartition& partition,
                                        const ChannelSnapshot& snap,
                                        const VideoCatalog& catalog) {
  std::vector<std::string> errs;
  const int n = partition.num_vehicles;

  // (1) the partition itself, with links consistent per vehicle.
  std::vector<int> all(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) all[static_cast<size_t>(v)] = v;
  for (const std::string& e : check_partition(partition, all))
    errs.push_back("(1) " + e);

  // (3) levels in range; the z prefix follows from the level encoding, and
  // the required-rate telescoping is checked against the increments.
  for (int v = 0; v < n; ++v) {
    const int lvl = decision.level[static_cast<size_t>(v)];
    if (lvl < -1 || lvl >= catalog.num_levels()) {
      errs.push_back("(3) vehicle " + std::to_string(v) + " level out of range");
      continue;
    }
    std::vector<int> z(static_cast<size_t>(catalog.num_levels()), 0);
    for (int j = 0; j <= lvl; ++j) z[static_cast<size_t>(j)] = 1;
    const double direct = required_rate_bps(catalog, lvl);
    const double tele = required_rate_from_z(catalog, z);
    if (std::fabs(direct - tele) > 1e-9 * std::max(1.0, direct))
      errs.push_back("(3) vehicle " + std::to_string(v) +
                     " required rate fails to telescope");
  }

  // (8a)/(9) owners valid, attached to the transmitter, one owner per
  // (transmitter, RB); (8b) no vehicle in both pools.
  std::vector<int> pool_of(static_cast<size_t>(n), 0);  // bitmask 1=RSU 2=SL
  for (int b = 0; b < decision.num_rsus; ++b) {
    for (int m = 0; m < decision.rbs_rsu; ++m) {
      const int v = decision.rsu_owner_at(b, m);
      if (v < 0) continue;
      if (v >= n) {
        errs.push_back("(9) RSU RB owned by unknown vehicle");
        continue;
      }
      pool_of[static_cast<size_t>(v)] |= 1;
      if (partition.role[static_cast<size_t>(v)] == Role::Free)
        errs.push_back("(8) free vehicle " + std::to_string(v) + " on the RSU pool");
      else if (partition.serving_rsu[static_cast<size_t>(v)] != b)
        errs.push_back("(9) vehicle " + std::to_string(v) +
                       " scheduled by a foreign RSU");
    }
  }
  for (int s = 0; s < decision.num_sls; ++s) {
    if (s >= partition.num_sls()) {
      errs.push_back("(9) decision refers to a nonexistent SL");
      break;
    }
    const int leader = partition.leaders[static_cast<size_t>(s)];
    for (int m = 0; m < decision.rbs_sl; ++m) {
      const int v = decision.sl_owner_at(s, m);
      if (v < 0) continue;
      if (v >= n) {
        errs.push_back("(9) SL RB owned by unknown vehicle");
        continue;
      }
      pool_of[static_cast<size_t>(v)] |= 2;
      if (partition.role[static_cast<size_t>(v)] != Role::Free ||
          partition.serving_sl[static_cast<size_t>(v)] != leader)
        errs.push_back("(9) vehicle " + std::to_string(v) +
                       " scheduled by a foreign SL");
    }
  }
  for (int v = 0; v < n; ++v)
    if (pool_of[static_cast<size_t>(v)] == 3)
      errs.push_back("(8) vehicle " + std::to_string(v) + " holds RBs from both pools");

  // (6) per leader: V2I rate must cover its own demand plus the committed
  // relay service; rates recomputed from the snapshot.
  for (int s = 0; s < partition.num_sls() && s < decision.num_sls; ++s) {
    const int leader = partition.leaders[static_cast<size_t>(s)];
    const int b = partition.serving_rsu[static_cast<size_t>(leader)];
    const auto held = decision.held_rbs_rsu(b, leader);
    const double r_bs = link_rate(snap, {TxRef::Rsu, b}, leader, held);
    const double own_req =
        required_rate_bps(catalog, decision.level[static_cast<size_t>(leader)]);
    double relay_sum = 0.0;
    for (int f : partition.members[static_cast<size_t>(s)])
      relay_sum += decision.relay_bps[static_cast<size_t>(f)];
    const double slack = r_bs - relay_sum - own_req;
    if (slack < -1e-6 * std::max(1.0, r_bs))
      errs.push_back("(6) SL " + std::to_string(leader) + " backhaul short by " +
                     std::to_string(-slack) + " bps");
  }
  return errs;
}

}  // namespace slicesim
