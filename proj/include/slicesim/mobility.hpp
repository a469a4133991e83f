#pragma once

#include <cmath>
#include <vector>

#include "slicesim/model.hpp"

namespace slicesim {

struct VehicleState {
  int id = 0;
  double x = 0;  // meters along the highway, wraps modulo highway length
  double y = 0;  // lateral, lane-center
  int lane = 0;
  int direction = 1;  // +1 or -1
  double speed_ms = 0;
};

struct RsuSite {
  int id = 0;
  double x = 0;
  double y = 0;  // +/- lateral offset, alternating sides
};

struct Topology {
  std::vector<VehicleState> vehicles;
  std::vector<RsuSite> rsus;
};

// Wrap a coordinate onto the ring [0, length).
inline double wrap_position(double x, double length) {
  const double w = std::fmod(x, length);
  return w < 0 ? w + length : w;
}

// Shortest along-highway distance on the ring.
inline double ring_dx(double x1, double x2, double length) {
  double d = std::fabs(x1 - x2);
  if (length > 0 && d > length / 2) d = length - d;
  return d;
}

// Planar distance with ring wrap in x (length 0 disables the wrap).
inline double ring_distance(double x1, double y1, double x2, double y2,
                            double length) {
  const double dx = ring_dx(x1, x2, length);
  return std::hypot(dx, y1 - y2);
}

// Places vehicles lane by lane at the configured spacing (uniform random
// per-lane phase) and the RSU grid at half-spacing offsets. Lanes in the
// lower half move in -x, the rest in +x.
Topology spawn_topology(const ScenarioConfig& cfg, Rng& rng);

// Constant-velocity update; positions wrap on the ring. dt must be > 0.
std::vector<VehicleState> advance(const std::vector<VehicleState>& vehicles,
                                  double dt_s, double highway_length_m);

// Index of the nearest RSU by planar ring distance (lowest id wins ties).
int nearest_rsu(const std::vector<RsuSite>& rsus, double x, double y,
                double highway_length_m);

}  // namespace slicesim
