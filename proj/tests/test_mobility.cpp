#include <doctest.h>

#include <stdexcept>

#include "slicesim/mobility.hpp"

using namespace slicesim;

namespace {

ScenarioConfig base_cfg() {
  ScenarioConfig cfg;
  cfg.highway_length_m = 10000;
  cfg.inter_rsu_distance_m = 1732;
  cfg.num_lanes = 6;
  cfg.inter_vehicle_distance_m = 800;
  return cfg;
}

}  // namespace

TEST_CASE("10 km highway with 1732 m spacing yields 5 RSUs") {
  ScenarioConfig cfg = base_cfg();
  Rng rng(1, rng_stream::kTopology);
  const Topology topo = spawn_topology(cfg, rng);
  CHECK(topo.rsus.size() == 5);
  // Consecutive x spacing equals the configured inter-RSU distance.
  for (size_t b = 1; b < topo.rsus.size(); ++b)
    CHECK(topo.rsus[b].x - topo.rsus[b - 1].x == doctest::Approx(1732.0));
  // Lateral offset alternates sides at the configured distance.
  for (const RsuSite& r : topo.rsus)
    CHECK(std::fabs(r.y) == doctest::Approx(cfg.rsu_lateral_offset_m));
}

TEST_CASE("half-length spacing puts exactly two vehicles per lane") {
  ScenarioConfig cfg = base_cfg();
  cfg.inter_vehicle_distance_m = cfg.highway_length_m / 2;
  Rng rng(3, rng_stream::kTopology);
  const Topology topo = spawn_topology(cfg, rng);
  CHECK(topo.vehicles.size() == static_cast<size_t>(2 * cfg.num_lanes));
}

TEST_CASE("vehicle speed comes from the config (140 km/h)") {
  ScenarioConfig cfg = base_cfg();
  Rng rng(5, rng_stream::kTopology);
  const Topology topo = spawn_topology(cfg, rng);
  for (const VehicleState& v : topo.vehicles)
    CHECK(v.speed_ms == doctest::Approx(38.888888889));
}

TEST_CASE("half the lanes move left, half right") {
  ScenarioConfig cfg = base_cfg();
  Rng rng(5, rng_stream::kTopology);
  const Topology topo = spawn_topology(cfg, rng);
  for (const VehicleState& v : topo.vehicles)
    CHECK(v.direction == (v.lane < 3 ? -1 : +1));
}

TEST_CASE("spacing longer than the highway is an empty-lane error") {
  ScenarioConfig cfg = base_cfg();
  cfg.inter_vehicle_distance_m = cfg.highway_length_m + 1;
  Rng rng(1, rng_stream::kTopology);
  CHECK_THROWS_AS(spawn_topology(cfg, rng), std::invalid_argument);
}

TEST_CASE("advance is plain constant-velocity arithmetic") {
  VehicleState v;
  v.x = 0;
  v.direction = 1;
  v.speed_ms = 38.889;
  const auto out = advance({v}, 0.1, 10000);
  CHECK(out[0].x == doctest::Approx(3.8889));
}

TEST_CASE("advance wraps on the ring") {
  VehicleState v;
  v.x = 9999;
  v.direction = 1;
  v.speed_ms = 38.889;
  const auto out = advance({v}, 0.1, 10000);
  CHECK(out[0].x == doctest::Approx(2.8889));
}

TEST_CASE("advance rejects non-positive dt") {
  VehicleState v;
  CHECK_THROWS_AS(advance({v}, 0.0, 10000), std::invalid_argument);
  CHECK_THROWS_AS(advance({v}, -1.0, 10000), std::invalid_argument);
}

TEST_CASE("advance keeps lane, speed and count; ordering within a lane") {
  ScenarioConfig cfg = base_cfg();
  Rng rng(11, rng_stream::kTopology);
  Topology topo = spawn_topology(cfg, rng);
  const size_t count = topo.vehicles.size();

  // Within a lane all vehicles share speed and direction, so pairwise ring
  // gaps are invariant under advance (no overtaking).
  auto gaps = [&](const std::vector<VehicleState>& vs) {
    std::vector<double> out;
    for (size_t i = 0; i + 1 < vs.size(); ++i)
      if (vs[i].lane == vs[i + 1].lane)
        out.push_back(ring_dx(vs[i].x, vs[i + 1].x, cfg.highway_length_m));
    return out;
  };
  const auto before = gaps(topo.vehicles);
  std::vector<VehicleState> moved = topo.vehicles;
  for (int step = 0; step < 1000; ++step)
    moved = advance(moved, 0.05, cfg.highway_length_m);
  const auto after = gaps(moved);

  CHECK(moved.size() == count);
  REQUIRE(before.size() == after.size());
  for (size_t i = 0; i < before.size(); ++i)
    CHECK(before[i] == doctest::Approx(after[i]).epsilon(1e-9));
  for (size_t i = 0; i < moved.size(); ++i) {
    CHECK(moved[i].lane == topo.vehicles[i].lane);
    CHECK(moved[i].speed_ms == topo.vehicles[i].speed_ms);
    CHECK(moved[i].y == topo.vehicles[i].y);
  }
}

TEST_CASE("spawn is deterministic per seed") {
  ScenarioConfig cfg = base_cfg();
  Rng a(9, rng_stream::kTopology), b(9, rng_stream::kTopology);
  const Topology ta = spawn_topology(cfg, a);
  const Topology tb = spawn_topology(cfg, b);
  REQUIRE(ta.vehicles.size() == tb.vehicles.size());
  for (size_t i = 0; i < ta.vehicles.size(); ++i)
    CHECK(ta.vehicles[i].x == tb.vehicles[i].x);
}

TEST_CASE("ring distance helpers") {
  CHECK(ring_dx(100, 9900, 10000) == doctest::Approx(200));
  CHECK(ring_dx(100, 300, 10000) == doctest::Approx(200));
  CHECK(ring_distance(0, 0, 0, 35, 10000) == doctest::Approx(35));
  // length 0 disables the wrap
  CHECK(ring_dx(100, 9900, 0) == doctest::Approx(9800));
}

TEST_CASE("nearest RSU picks the closest site in ring metric") {
  std::vector<RsuSite> rsus = {{0, 866, -35}, {1, 2598, 35}};
  CHECK(nearest_rsu(rsus, 900, 0, 10000) == 0);
  CHECK(nearest_rsu(rsus, 2400, 0, 10000) == 1);
}
