#include "slicesim/mobility.hpp"

#include <stdexcept>

namespace slicesim {

Topology spawn_topology(const ScenarioConfig& cfg, Rng& rng) {
  if (cfg.inter_vehicle_distance_m > cfg.highway_length_m)
    throw std::invalid_argument(
        "empty lane: inter_vehicle_distance exceeds highway_length");

  Topology topo;
  const int per_lane = static_cast<int>(
      std::floor(cfg.highway_length_m / cfg.inter_vehicle_distance_m));
  int id = 0;
  for (int lane = 0; lane < cfg.num_lanes; ++lane) {
    const double phase = rng.uniform(0.0, cfg.inter_vehicle_distance_m);
    const double y =
        (lane - (cfg.num_lanes - 1) / 2.0) * cfg.lane_width_m;
    const int direction = (lane < cfg.num_lanes / 2) ? -1 : +1;
    for (int k = 0; k < per_lane; ++k) {
      VehicleState v;
      v.id = id++;
      v.x = wrap_position(phase + k * cfg.inter_vehicle_distance_m,
                          cfg.highway_length_m);
      v.y = y;
      v.lane = lane;
      v.direction = direction;
      v.speed_ms = cfg.vehicle_speed_ms;
      topo.vehicles.push_back(v);
    }
  }

  const int num_rsus = cfg.effective_num_rsus();
  for (int b = 0; b < num_rsus; ++b) {
    RsuSite r;
    r.id = b;
    r.x = wrap_position(cfg.inter_rsu_distance_m / 2 + b * cfg.inter_rsu_distance_m,
                        cfg.highway_length_m);
    r.y = (b % 2 == 0 ? -1.0 : 1.0) * cfg.rsu_lateral_offset_m;
    topo.rsus.push_back(r);
  }
  return topo;
}

std::vector<VehicleState> advance(const std::vector<VehicleState>& vehicles,
                                  double dt_s, double highway_length_m) {
  if (!(dt_s > 0)) throw std::invalid_argument("advance: dt must be > 0");
  std::vector<VehicleState> out = vehicles;
  for (VehicleState& v : out)
    v.x = wrap_position(v.x + v.direction * v.speed_ms * dt_s, highway_length_m);
  return out;
}

int nearest_rsu(const std::vector<RsuSite>& rsus, double x, double y,
                double highway_length_m) {
  int best = -1;
  double best_d = 0;
  for (const RsuSite& r : rsus) {
    const double d = ring_distance(x, y, r.x, r.y, highway_length_m);
    if (best < 0 || d < best_d) {
      best = r.id;
      best_d = d;
    }
  }
  return best;
}

}  // namespace slicesim
