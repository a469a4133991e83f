#include "slicesim/config_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace slicesim {

using nlohmann::json;

json default_config_json() {
  json j;
  j["highway"] = {
      {"length_m", 10000.0},
      {"num_lanes", 6},
      {"lane_width_m", 4.0},
      {"vehicle_speed_kmh", 140.0},
      {"inter_vehicle_distance_m", 800.0},
  };
  j["rsu"] = {
      {"count", 0},
      {"spacing_m", 1732.0},
      {"lateral_offset_m", 35.0},
      {"tx_power_dbm", 46.0},
  };
  j["sl"] = {
      {"tx_power_dbm", 20.0},
  };
  j["radio"] = {
      {"rb_bandwidth_khz", 180.0},
      {"num_rbs_rsu", 25},
      {"num_rbs_sl", 25},
      {"noise_power_dbm", -112.4},
      {"carrier_v2i_ghz", 2.0},
      {"carrier_v2v_ghz", 5.9},
      {"pathloss_exp_v2i", 3.68},
      {"pathloss_exp_v2v", 2.75},
      {"fading", true},
  };
  j["video"] = {
      {"levels", json::array({
                     json{{"label", "240p"}, {"rate_kbps", 400.0}},
                     json{{"label", "360p"}, {"rate_kbps", 800.0}},
                     json{{"label", "720p"}, {"rate_kbps", 1200.0}},
                 })},
      {"chunk_duration_s", 1.0},
      {"num_chunks", 0},
  };
  j["control"] = {
      {"epsilon", 0.1},
      {"playback_threshold_s", 0.5},
      {"gamma", 0.9},
      {"beta", 0.5},
      {"alpha", 10.0},
      {"eta", 1.0e9},
      {"ccp_max_iters", 20},
      {"ccp_tolerance", 1.0e-6},
      {"qoe_weight_descending", false},
  };
  j["slicing"] = {
      {"neighborhood_size_m", 100.0},
      {"reslicing_period_slots", 100},
      {"weak_sinr_threshold_db", 3.0},
      {"squared_kernel", false},
      {"kmeans_restarts", 50},
  };
  j["baseline2"] = {
      {"relay_range_m", 200.0},
      {"edge_fraction", 0.2},
  };
  j["sim"] = {
      {"slot_duration_s", 1.0e-3},
      {"duration_s", 30.0},
      {"seed", 1},
  };
  return j;
}

namespace {

// Every key present in `node` must exist in `schema` (same shape); collects
// full paths of unknown keys.
void collect_unknown_keys(const json& schema, const json& node,
                          const std::string& prefix,
                          std::vector<std::string>& unknown) {
  if (!node.is_object()) return;
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!schema.is_object() || !schema.contains(it.key())) {
      unknown.push_back(path);
      continue;
    }
    if (it.value().is_object())
      collect_unknown_keys(schema.at(it.key()), it.value(), path, unknown);
  }
}

void merge_overlay(json& base, const json& overlay) {
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) &&
        base.at(it.key()).is_object()) {
      merge_overlay(base.at(it.key()), it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

double num(const json& j, const char* section, const char* key) {
  const json& v = j.at(section).at(key);
  if (!v.is_number())
    throw ConfigError(std::string(section) + "." + key + ": expected a number");
  return v.get<double>();
}

int integer(const json& j, const char* section, const char* key) {
  const json& v = j.at(section).at(key);
  if (!v.is_number_integer())
    throw ConfigError(std::string(section) + "." + key + ": expected an integer");
  return v.get<int>();
}

bool boolean(const json& j, const char* section, const char* key) {
  const json& v = j.at(section).at(key);
  if (!v.is_boolean())
    throw ConfigError(std::string(section) + "." + key + ": expected a boolean");
  return v.get<bool>();
}

}  // namespace

std::pair<ScenarioConfig, VideoCatalog> parse_config(const json& overrides) {
  const json schema = default_config_json();
  std::vector<std::string> unknown;
  collect_unknown_keys(schema, overrides, "", unknown);
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }

  json j = schema;
  merge_overlay(j, overrides);

  ScenarioConfig cfg;
  cfg.highway_length_m = num(j, "highway", "length_m");
  cfg.num_lanes = integer(j, "highway", "num_lanes");
  cfg.lane_width_m = num(j, "highway", "lane_width_m");
  cfg.vehicle_speed_ms = kmh_to_mps(num(j, "highway", "vehicle_speed_kmh"));
  cfg.inter_vehicle_distance_m = num(j, "highway", "inter_vehicle_distance_m");

  cfg.num_rsus = integer(j, "rsu", "count");
  cfg.inter_rsu_distance_m = num(j, "rsu", "spacing_m");
  cfg.rsu_lateral_offset_m = num(j, "rsu", "lateral_offset_m");
  cfg.rsu_tx_power_w = dbm_to_watts(num(j, "rsu", "tx_power_dbm"));
  cfg.sl_tx_power_w = dbm_to_watts(num(j, "sl", "tx_power_dbm"));

  cfg.rb_bandwidth_hz = 1e3 * num(j, "radio", "rb_bandwidth_khz");
  cfg.num_rbs_rsu = integer(j, "radio", "num_rbs_rsu");
  cfg.num_rbs_sl = integer(j, "radio", "num_rbs_sl");
  cfg.noise_power_w = dbm_to_watts(num(j, "radio", "noise_power_dbm"));
  cfg.carrier_v2i_hz = 1e9 * num(j, "radio", "carrier_v2i_ghz");
  cfg.carrier_v2v_hz = 1e9 * num(j, "radio", "carrier_v2v_ghz");
  cfg.pathloss_exp_v2i = num(j, "radio", "pathloss_exp_v2i");
  cfg.pathloss_exp_v2v = num(j, "radio", "pathloss_exp_v2v");
  cfg.fading = boolean(j, "radio", "fading");

  cfg.epsilon = num(j, "control", "epsilon");
  cfg.playback_threshold_s = num(j, "control", "playback_threshold_s");
  cfg.gamma = num(j, "control", "gamma");
  cfg.beta = num(j, "control", "beta");
  cfg.alpha = num(j, "control", "alpha");
  cfg.eta = num(j, "control", "eta");
  cfg.ccp_max_iters = integer(j, "control", "ccp_max_iters");
  cfg.ccp_tolerance = num(j, "control", "ccp_tolerance");
  cfg.qoe_weight_descending = boolean(j, "control", "qoe_weight_descending");

  cfg.neighborhood_size_m = num(j, "slicing", "neighborhood_size_m");
  cfg.reslicing_period_slots = integer(j, "slicing", "reslicing_period_slots");
  cfg.weak_sinr_threshold_db = num(j, "slicing", "weak_sinr_threshold_db");
  cfg.squared_kernel = boolean(j, "slicing", "squared_kernel");
  cfg.kmeans_restarts = integer(j, "slicing", "kmeans_restarts");

  cfg.baseline2_relay_range_m = num(j, "baseline2", "relay_range_m");
  cfg.baseline2_edge_fraction = num(j, "baseline2", "edge_fraction");

  cfg.slot_duration_s = num(j, "sim", "slot_duration_s");
  cfg.duration_s = num(j, "sim", "duration_s");
  cfg.seed = j.at("sim").at("seed").get<std::uint64_t>();

  VideoCatalog catalog;
  catalog.chunk_duration_s = num(j, "video", "chunk_duration_s");
  catalog.num_chunks = integer(j, "video", "num_chunks");
  for (const json& lvl : j.at("video").at("levels")) {
    for (auto it = lvl.begin(); it != lvl.end(); ++it)
      if (it.key() != "label" && it.key() != "rate_kbps")
        throw ConfigError("unknown config keys: video.levels." + it.key());
    VideoLevel l;
    l.label = lvl.at("label").get<std::string>();
    l.rate_bps = 1e3 * lvl.at("rate_kbps").get<double>();
    catalog.levels.push_back(std::move(l));
  }

  const std::vector<std::string> errs = validate_config(cfg, catalog);
  if (!errs.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errs) msg += " [" + e + "]";
    throw ConfigError(msg);
  }
  return {cfg, catalog};
}

json load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return j;
}

std::pair<ScenarioConfig, VideoCatalog> load_config(const std::string& path) {
  return parse_config(load_config_json(path));
}

namespace {

const json* find_path(const json& tree, const std::string& path) {
  const json* node = &tree;
  size_t start = 0;
  while (start <= path.size()) {
    const size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos
                                                   ? std::string::npos
                                                   : dot - start);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &node->at(key);
    if (dot == std::string::npos) return node;
    start = dot + 1;
  }
  return nullptr;
}

}  // namespace

bool config_path_exists(const json& tree, const std::string& path) {
  const json* n = find_path(tree, path);
  return n != nullptr && !n->is_object();
}

void set_config_value(json& tree, const std::string& path, const json& value) {
  if (!config_path_exists(default_config_json(), path))
    throw ConfigError("no such config field: " + path);
  json* node = &tree;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    if (dot == std::string::npos) {
      (*node)[path.substr(start)] = value;
      return;
    }
    node = &(*node)[path.substr(start, dot - start)];
    start = dot + 1;
  }
}

std::string config_hash(const json& tree) {
  const std::string s = tree.dump();  // nlohmann objects serialize key-sorted
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace slicesim
