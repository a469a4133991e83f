#include <doctest.h>

#include <algorithm>

#include "slicesim/config_io.hpp"
#include "slicesim/model.hpp"

using namespace slicesim;

namespace {

bool has_error(const std::vector<std::string>& errs, const std::string& needle) {
  return std::any_of(errs.begin(), errs.end(), [&](const std::string& e) {
    return e.find(needle) != std::string::npos;
  });
}

VideoCatalog table_catalog() {
  VideoCatalog cat;
  cat.levels = {{"240p", 400e3}, {"360p", 800e3}, {"720p", 1200e3}};
  return cat;
}

}  // namespace

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watts(46.0) == doctest::Approx(39.8107170553));
  CHECK(dbm_to_watts(20.0) == doctest::Approx(0.1));
  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
  CHECK(kmh_to_mps(140.0) == doctest::Approx(38.888888889));
  CHECK(linear_to_db(db_to_linear(-7.3)) == doctest::Approx(-7.3));
}

TEST_CASE("default config with the reference radio settings is valid") {
  ScenarioConfig cfg;
  CHECK(validate_config(cfg, table_catalog()).empty());
  CHECK(cfg.rsu_tx_power_w == doctest::Approx(dbm_to_watts(46.0)));
  CHECK(cfg.sl_tx_power_w == doctest::Approx(dbm_to_watts(20.0)));
  CHECK(cfg.epsilon == doctest::Approx(0.1));
}

TEST_CASE("epsilon boundary is rejected") {
  ScenarioConfig cfg;
  cfg.epsilon = 0.0;
  const auto errs = validate_config(cfg, table_catalog());
  CHECK(has_error(errs, "epsilon out of (0,1)"));

  cfg.epsilon = 1.0;
  CHECK(has_error(validate_config(cfg, table_catalog()), "epsilon out of (0,1)"));
}

TEST_CASE("non-increasing rates are rejected") {
  ScenarioConfig cfg;
  VideoCatalog cat;
  cat.levels = {{"a", 800e3}, {"b", 400e3}, {"c", 1200e3}};
  CHECK(has_error(validate_config(cfg, cat), "rates not increasing"));
}

TEST_CASE("validation reports every violation at once") {
  ScenarioConfig cfg;
  cfg.epsilon = 0;
  cfg.gamma = 1.5;
  cfg.alpha = -1;
  VideoCatalog cat;
  cat.levels = {{"a", 800e3}, {"b", 400e3}};
  const auto errs = validate_config(cfg, cat);
  CHECK(errs.size() >= 4);
}

TEST_CASE("partition accepts a disjoint split") {
  // S={0}, F={0 -> {1,2}}, C={3}
  SlicePartition p;
  p.num_vehicles = 4;
  p.role = {Role::SliceLeader, Role::Free, Role::Free, Role::Compelled};
  p.serving_rsu = {0, 0, 0, 0};
  p.serving_sl = {-1, 0, 0, -1};
  p.leaders = {0};
  p.members = {{1, 2}};
  CHECK(check_partition(p, {0, 1, 2, 3}).empty());
}

TEST_CASE("vehicle in two sets violates 1a") {
  SlicePartition p;
  p.num_vehicles = 4;
  p.role = {Role::SliceLeader, Role::Free, Role::Free, Role::Compelled};
  p.serving_rsu = {0, 0, 0, 0};
  p.serving_sl = {-1, 0, 0, -1};
  p.leaders = {0};
  p.members = {{1, 2, 3}};  // 3 claimed free but carries the compelled role
  const auto errs = check_partition(p, {0, 1, 2, 3});
  CHECK(!errs.empty());
}

TEST_CASE("link indicators are exclusive (1e)") {
  SlicePartition p;
  p.num_vehicles = 2;
  p.role = {Role::Compelled, Role::Free};
  p.serving_rsu = {0, 0};
  p.serving_sl = {-1, -1};  // free vehicle without its SL link
  p.leaders = {};
  p.members = {};
  CHECK(has_error(check_partition(p, {0, 1}), "1e"));

  SlicePartition q;
  q.num_vehicles = 1;
  q.role = {Role::Compelled};
  q.serving_rsu = {0};
  q.serving_sl = {0};  // both indicators set
  CHECK(has_error(check_partition(q, {0}), "1e"));
}

TEST_CASE("cardinality identity |V| = |S|+|F|+|C| holds for all-compelled") {
  SlicePartition p = SlicePartition::all_compelled({0, 0, 0});
  CHECK(check_partition(p, {0, 1, 2}).empty());
}

TEST_CASE("random source reproduces draws per (seed, stream)") {
  Rng a(42, 7), b(42, 7), c(42, 8);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const double xa = a.uniform01();
    const double xb = b.uniform01();
    const double xc = c.uniform01();
    all_equal = all_equal && xa == xb;
    any_diff = any_diff || xa != xc;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("config file loads table values and converts units") {
  nlohmann::json j;
  j["rsu"]["tx_power_dbm"] = 46.0;
  j["control"]["epsilon"] = 0.1;
  auto [cfg, cat] = parse_config(j);
  CHECK(cfg.rsu_tx_power_w == doctest::Approx(39.8107170553));
  CHECK(cfg.sl_tx_power_w == doctest::Approx(0.1));
  CHECK(cfg.vehicle_speed_ms == doctest::Approx(38.888888889));
  CHECK(cat.num_levels() == 3);
  CHECK(cat.rate(0) == doctest::Approx(400e3));
  CHECK(cat.rate(2) == doctest::Approx(1200e3));
}

TEST_CASE("unknown config keys are a hard error") {
  nlohmann::json j;
  j["control"]["epsilonn"] = 0.1;
  CHECK_THROWS_AS(parse_config(j), ConfigError);

  nlohmann::json k;
  k["typo_section"] = nlohmann::json::object();
  CHECK_THROWS_AS(parse_config(k), ConfigError);
}

TEST_CASE("invalid values in a config file are rejected with the field name") {
  nlohmann::json j;
  j["control"]["epsilon"] = 0.0;
  try {
    parse_config(j);
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("epsilon out of (0,1)") != std::string::npos);
  }
}

TEST_CASE("every config field is addressable by dot path") {
  const nlohmann::json schema = default_config_json();
  CHECK(config_path_exists(schema, "control.eta"));
  CHECK(config_path_exists(schema, "highway.inter_vehicle_distance_m"));
  CHECK(config_path_exists(schema, "slicing.neighborhood_size_m"));
  CHECK(!config_path_exists(schema, "control.no_such_field"));

  nlohmann::json tree;
  set_config_value(tree, "control.eta", 123.0);
  CHECK(tree["control"]["eta"] == 123.0);
  CHECK_THROWS_AS(set_config_value(tree, "nope.nothing", 1), ConfigError);
}

TEST_CASE("config hash is stable and value-sensitive") {
  nlohmann::json a = default_config_json();
  nlohmann::json b = default_config_json();
  CHECK(config_hash(a) == config_hash(b));
  b["control"]["eta"] = 3.0;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("slot decision z is a cumulative prefix") {
  SlotDecision d = SlotDecision::empty(2, 1, 0, 3, 3);
  d.level[0] = 1;
  CHECK(d.z(0, 0));
  CHECK(d.z(0, 1));
  CHECK(!d.z(0, 2));
  CHECK(!d.z(1, 0));  // level -1: nothing selected
}
