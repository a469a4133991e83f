#include "slicesim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "slicesim/channel.hpp"
#include "slicesim/checker.hpp"
#include "slicesim/config_io.hpp"
#include "slicesim/mobility.hpp"
#include "slicesim/slicing.hpp"

namespace slicesim {

namespace fs = std::filesystem;

const char* scheduler_name(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::Proposed: return "proposed";
    case SchedulerKind::Baseline1: return "baseline1";
    case SchedulerKind::Baseline2: return "baseline2";
  }
  return "?";
}

SchedulerKind scheduler_from_name(const std::string& name) {
  if (name == "proposed") return SchedulerKind::Proposed;
  if (name == "baseline1") return SchedulerKind::Baseline1;
  if (name == "baseline2") return SchedulerKind::Baseline2;
  throw std::invalid_argument("unknown scheduler: " + name);
}

nlohmann::json RunSummary::to_json() const {
  nlohmann::json j;
  j["scheduler"] = scheduler;
  j["slots"] = slots;
  j["vehicles"] = vehicles;
  j["rsus"] = rsus;
  j["network_qoe"] = network_qoe;
  j["mean_vehicle_qoe"] = mean_vehicle_qoe;
  j["violation_fraction"] = violation_fraction;
  j["playback_samples"] = playback_samples;
  j["latency_mean_s"] = latency_mean_s;
  j["latency_median_s"] = latency_median_s;
  j["latency_p99_s"] = latency_p99_s;
  j["latency_samples"] = latency_samples;
  j["mean_cluster_count"] = mean_cluster_count;
  j["level_fractions"] = level_fractions;
  j["idle_fraction"] = idle_fraction;
  j["constraint_violations"] = constraint_violations;
  j["backhaul_scaled_slots"] = backhaul_scaled_slots;
  j["backhaul_starved_slots"] = backhaul_starved_slots;
  j["mean_ccp_iterations"] = mean_ccp_iterations;
  j["config_hash"] = config_hash;
  return j;
}

namespace {

// Pipeline-order guard: the slot loop advances through these phases in
// order; a misordered call is a logic error, not a recoverable condition.
enum class Phase {
  Advance,
  Channel,
  Reslice,
  Coefficients,
  Solve,
  Backhaul,
  Queues,
  Metrics
};

struct PipelineGuard {
  Phase expected = Phase::Advance;
  void step(Phase p) {
    if (p != expected)
      throw std::logic_error("slot pipeline executed out of order");
    expected = p == Phase::Metrics ? Phase::Advance
                                   : static_cast<Phase>(static_cast<int>(p) + 1);
  }
};

std::vector<int> nearest_rsu_map(const std::vector<VehicleState>& vehicles,
                                 const std::vector<RsuSite>& rsus,
                                 double length) {
  std::vector<int> out(vehicles.size());
  for (const VehicleState& v : vehicles)
    out[static_cast<size_t>(v.id)] = nearest_rsu(rsus, v.x, v.y, length);
  return out;
}

}  // namespace

SlicePartition proposed_partition(const ChannelSnapshot& snap,
                                  const std::vector<VehicleState>& vehicles,
                                  const std::vector<RsuSite>& rsus,
                                  const ScenarioConfig& cfg, Rng& rng_kmeans) {
  const std::vector<int> weak =
      weak_vehicle_set(snap, vehicles, cfg.weak_sinr_threshold_db);
  if (weak.empty())
    return SlicePartition::all_compelled(
        nearest_rsu_map(vehicles, rsus, cfg.highway_length_m));

  std::vector<std::pair<double, double>> xy;
  xy.reserve(weak.size());
  for (int v : weak)
    xy.push_back({vehicles[static_cast<size_t>(v)].x,
                  vehicles[static_cast<size_t>(v)].y});
  const SimilarityMatrix sim =
      build_similarity(weak, xy, cfg.highway_length_m, cfg.neighborhood_size_m,
                       cfg.squared_kernel);
  const auto clusters = spectral_cluster(sim, rng_kmeans, cfg.kmeans_restarts);
  const LeaderElection election =
      elect_leaders(clusters, vehicles, cfg.highway_length_m);
  return make_partition(clusters, election, vehicles, rsus,
                        cfg.highway_length_m);
}

SlicePartition baseline2_partition(const std::vector<VehicleState>& vehicles,
                                   const std::vector<RsuSite>& rsus,
                                   const ScenarioConfig& cfg) {
  const int n = static_cast<int>(vehicles.size());
  const std::vector<int> nearest =
      nearest_rsu_map(vehicles, rsus, cfg.highway_length_m);
  const double edge_threshold =
      (0.5 - cfg.baseline2_edge_fraction / 2.0) * cfg.inter_rsu_distance_m;

  std::vector<bool> edge(static_cast<size_t>(n), false);
  for (const VehicleState& v : vehicles) {
    const RsuSite& r = rsus[static_cast<size_t>(nearest[static_cast<size_t>(v.id)])];
    edge[static_cast<size_t>(v.id)] =
        ring_dx(v.x, r.x, cfg.highway_length_m) > edge_threshold;
  }

  // Fixed relaying: each edge vehicle picks the nearest non-edge vehicle in
  // range; without a candidate it stays on its V2I link.
  std::vector<std::vector<int>> members_of(static_cast<size_t>(n));
  for (const VehicleState& v : vehicles) {
    if (!edge[static_cast<size_t>(v.id)]) continue;
    int relay = -1;
    double best = cfg.baseline2_relay_range_m;
    for (const VehicleState& c : vehicles) {
      if (c.id == v.id || edge[static_cast<size_t>(c.id)]) continue;
      const double d = ring_distance(v.x, v.y, c.x, c.y, cfg.highway_length_m);
      if (d < best) {
        best = d;
        relay = c.id;
      }
    }
    if (relay >= 0) members_of[static_cast<size_t>(relay)].push_back(v.id);
  }

  SlicePartition p;
  p.num_vehicles = n;
  p.role.assign(static_cast<size_t>(n), Role::Compelled);
  p.serving_rsu = nearest;
  p.serving_sl.assign(static_cast<size_t>(n), -1);
  for (int r = 0; r < n; ++r) {
    if (members_of[static_cast<size_t>(r)].empty()) continue;
    p.leaders.push_back(r);
    std::sort(members_of[static_cast<size_t>(r)].begin(),
              members_of[static_cast<size_t>(r)].end());
    p.members.push_back(members_of[static_cast<size_t>(r)]);
    p.role[static_cast<size_t>(r)] = Role::SliceLeader;
    for (int v : members_of[static_cast<size_t>(r)]) {
      p.role[static_cast<size_t>(v)] = Role::Free;
      p.serving_sl[static_cast<size_t>(v)] = r;
      p.serving_rsu[static_cast<size_t>(v)] = nearest[static_cast<size_t>(r)];
    }
  }
  return p;
}

namespace {

// Bits parked at a departed slice leader re-queue at the RSU; virtual queue
// values carry across role changes (U <-> Y keep their value).
void migrate_queue_roles(QueueState& qs, const SlicePartition& oldp,
                         const SlicePartition& newp) {
  for (int v = 0; v < newp.num_vehicles; ++v) {
    const bool was_free = oldp.role[static_cast<size_t>(v)] == Role::Free;
    const bool now_free = newp.role[static_cast<size_t>(v)] == Role::Free;
    if (was_free && (!now_free || oldp.serving_sl[static_cast<size_t>(v)] !=
                                      newp.serving_sl[static_cast<size_t>(v)])) {
      qs.q_b[static_cast<size_t>(v)] += qs.q_s[static_cast<size_t>(v)];
      qs.q_s[static_cast<size_t>(v)] = 0.0;
    }
  }
}

struct TraceFiles {
  std::ofstream topology, partition, queues, decisions, sinr, latency, chunks;
};

}  // namespace

RunResult run_slot_loop(const ScenarioConfig& cfg, const VideoCatalog& catalog,
                        SchedulerKind kind, const TraceOptions& opts,
                        const std::string& out_dir) {
  {
    const auto errs = validate_config(cfg, catalog);
    if (!errs.empty()) {
      std::string msg = "run_slot_loop: invalid config:";
      for (const auto& e : errs) msg += " [" + e + "]";
      throw std::invalid_argument(msg);
    }
  }

  Rng rng_topo(cfg.seed, rng_stream::kTopology);
  Rng rng_chan(cfg.seed, rng_stream::kChannel);
  Rng rng_kmeans(cfg.seed, rng_stream::kKmeans);

  Topology topo = spawn_topology(cfg, rng_topo);
  std::vector<VehicleState>& vehicles = topo.vehicles;
  const std::vector<RsuSite>& rsus = topo.rsus;
  const int num_v = static_cast<int>(vehicles.size());
  const int num_b = static_cast<int>(rsus.size());
  const int num_j = catalog.num_levels();
  const long total_slots = cfg.total_slots();
  const long spc = cfg.slots_per_chunk(catalog);
  const double slot_s = cfg.slot_duration_s;
  const double psi = cfg.playback_threshold_s;

  QueueState qs = QueueState::make(num_v, num_j, cfg.num_rbs_rsu, cfg.num_rbs_sl,
                                   initial_queue_bits(catalog, psi));
  PlaybackLedger ledger = PlaybackLedger::make(num_v);
  LatencyLedger latency(num_v, slot_s);
  for (int v = 0; v < num_v; ++v)
    latency.add_arrival(v, 0, qs.q_b0[static_cast<size_t>(v)], -1, false);

  SlicePartition partition = SlicePartition::all_compelled(
      nearest_rsu_map(vehicles, rsus, cfg.highway_length_m));
  ActivityMask prev_activity =
      ActivityMask::silent(num_b, 0, cfg.num_rbs_rsu, cfg.num_rbs_sl);
  BaselineScheduler baseline(num_v);

  const int stride = std::max(cfg.num_rbs_rsu, cfg.num_rbs_sl);
  std::vector<std::uint8_t> anchor_x(static_cast<size_t>(num_v) * stride, 0);
  std::vector<int> anchor_level(static_cast<size_t>(num_v), 0);
  std::vector<int> held_level(static_cast<size_t>(num_v), 0);

  RunResult result;
  result.chunk_levels.assign(static_cast<size_t>(num_v), {});
  std::vector<double> rreq(static_cast<size_t>(num_v), 0.0);
  std::vector<double> share(static_cast<size_t>(num_v), 0.0);
  std::vector<double> delivered(static_cast<size_t>(num_v), 0.0);

  long ccp_iter_sum = 0, ccp_slots = 0;

  TraceFiles files;
  const bool writing = !out_dir.empty();
  if (writing) {
    fs::create_directories(out_dir);
    const auto open = [&](std::ofstream& f, const char* name, const char* header) {
      f.open(fs::path(out_dir) / name);
      if (!f) throw std::runtime_error(std::string("cannot write ") + name);
      f << header << "\n";
    };
    if (opts.topology) {
      open(files.topology, "topology.csv", "id,x,y,lane,direction");
      for (const VehicleState& v : vehicles)
        files.topology << v.id << "," << format_double(v.x) << ","
                       << format_double(v.y) << "," << v.lane << ","
                       << v.direction << "\n";
    }
    if (opts.partition)
      open(files.partition, "partition.csv", "epoch,vehicle,role,serving");
    if (opts.queues)
      open(files.queues, "queues.csv", "slot,vehicle,q_bv,q_sv,virt,buffered_s");
    if (opts.decisions)
      open(files.decisions, "decisions.csv",
           "slot,vehicle,serving,rbs_held,level,surrogate,ccp_iterations");
    if (opts.sinr) open(files.sinr, "sinr.csv", "slot,tx_kind,tx,vehicle,rb,sinr_db");
    open(files.latency, "latency_samples.csv", "vehicle,chunk,seconds");
    open(files.chunks, "chunks.csv", "vehicle,chunk,level");
  }

  PipelineGuard guard;
  int epoch = -1;

  for (long t = 0; t < total_slots; ++t) {
    guard.step(Phase::Advance);
    vehicles = advance(vehicles, slot_s, cfg.highway_length_m);

    guard.step(Phase::Channel);
    ChannelSnapshot snap;
    sample_v2i(snap, vehicles, rsus, cfg, rng_chan);
    snap.activity = prev_activity;

    guard.step(Phase::Reslice);
    if (t % cfg.reslicing_period_slots == 0) {
      ++epoch;
      SlicePartition next;
      switch (kind) {
        case SchedulerKind::Proposed:
          next = proposed_partition(snap, vehicles, rsus, cfg, rng_kmeans);
          break;
        case SchedulerKind::Baseline1:
          next = SlicePartition::all_compelled(
              nearest_rsu_map(vehicles, rsus, cfg.highway_length_m));
          break;
        case SchedulerKind::Baseline2:
          next = baseline2_partition(vehicles, rsus, cfg);
          break;
      }
      migrate_queue_roles(qs, partition, next);
      partition = next;
      std::fill(anchor_x.begin(), anchor_x.end(), 0);
      anchor_level = held_level;
      result.epoch_cluster_counts.push_back(partition.num_sls());
      if (files.partition.is_open()) {
        for (int v = 0; v < num_v; ++v) {
          const Role r = partition.role[static_cast<size_t>(v)];
          const int serving = r == Role::Free
                                  ? partition.serving_sl[static_cast<size_t>(v)]
                                  : partition.serving_rsu[static_cast<size_t>(v)];
          files.partition << epoch << "," << v << "," << role_name(r) << ","
                          << serving << "\n";
        }
      }
    }
    sample_v2v(snap, vehicles, partition.leaders, cfg, rng_chan);

    const bool boundary = (t % spc == 0);
    const int chunk_idx = static_cast<int>(t / spc);
    const bool session_over =
        catalog.num_chunks > 0 && chunk_idx >= catalog.num_chunks;

    SlotProblem prob;
    prob.partition = &partition;
    prob.catalog = &catalog;
    prob.cfg = &cfg;
    prob.num_rsus = num_b;
    prob.chunk_boundary = boundary;
    prob.held_level = held_level;
    prob.min_level = 0;  // active sessions stream at least the lowest level

    guard.step(Phase::Coefficients);
    SchedulerOutcome outcome;
    if (kind == SchedulerKind::Proposed) {
      DppCoefficients coeffs =
          compute_coefficients(qs, snap, partition, catalog, cfg);
      coeffs.anchor_x = anchor_x;
      coeffs.anchor_level = anchor_level;
      guard.step(Phase::Solve);
      outcome = ccp_solve(coeffs, prob);
      if (boundary) {
        ccp_iter_sum += outcome.ccp_iterations;
        ++ccp_slots;
      }
    } else {
      guard.step(Phase::Solve);
      outcome = baseline.schedule(prob, snap, qs);
    }
    SlotDecision& dec = outcome.decision;
    if (session_over) std::fill(dec.level.begin(), dec.level.end(), -1);

    guard.step(Phase::Backhaul);
    const BackhaulReport bh = enforce_backhaul(dec, snap, partition, catalog, cfg);
    if (bh.scaled_links > 0) ++result.summary.backhaul_scaled_slots;
    if (bh.starved_sls > 0) ++result.summary.backhaul_starved_slots;

    if (opts.check_every_slot) {
      const auto errs = check_decision(dec, partition, snap, catalog);
      result.summary.constraint_violations += static_cast<long>(errs.size());
      if (!errs.empty() && result.first_violation.empty())
        result.first_violation =
            "slot " + std::to_string(t) + ": " + errs.front();
    }

    if (boundary)
      for (int v = 0; v < num_v; ++v)
        result.chunk_levels[static_cast<size_t>(v)].push_back(
            dec.level[static_cast<size_t>(v)]);
    held_level = dec.level;

    guard.step(Phase::Queues);
    for (int v = 0; v < num_v; ++v) {
      rreq[static_cast<size_t>(v)] =
          required_rate_bps(catalog, dec.level[static_cast<size_t>(v)]);
      share[static_cast<size_t>(v)] = 0.0;
      delivered[static_cast<size_t>(v)] = 0.0;
    }

    // V2I side: compelled vehicles are served directly; a slice leader's V2I
    // bits split between its own queue and the cluster's backhaul shares.
    for (int v = 0; v < num_v; ++v) {
      const Role role = partition.role[static_cast<size_t>(v)];
      if (role == Role::Free) continue;
      const double arrival = rreq[static_cast<size_t>(v)] * slot_s;
      if (role == Role::Compelled) {
        const int b = partition.serving_rsu[static_cast<size_t>(v)];
        const auto held = dec.held_rbs_rsu(b, v);
        const double service = link_rate(snap, {TxRef::Rsu, b}, v, held) * slot_s;
        delivered[static_cast<size_t>(v)] =
            std::min(service, qs.q_b[static_cast<size_t>(v)]);
        qs.q_b[static_cast<size_t>(v)] =
            step_rsu_queue(qs.q_b[static_cast<size_t>(v)], service, arrival);
      } else {
        const int s = partition.leader_index(v);
        const double total = dec.backhaul_bps[static_cast<size_t>(s)] * slot_s;
        const double own = std::min(qs.q_b[static_cast<size_t>(v)], total);
        delivered[static_cast<size_t>(v)] = own;
        qs.q_b[static_cast<size_t>(v)] =
            step_rsu_queue(qs.q_b[static_cast<size_t>(v)], own, arrival);
        double rem = total - own;
        double backlog = 0.0;
        for (int f : partition.members[static_cast<size_t>(s)])
          backlog += qs.q_b[static_cast<size_t>(f)];
        if (rem > 0 && backlog > 0) {
          const double frac = std::min(1.0, rem / backlog);
          for (int f : partition.members[static_cast<size_t>(s)])
            share[static_cast<size_t>(f)] = frac * qs.q_b[static_cast<size_t>(f)];
        }
      }
    }
    // V2V side: backhaul shares flow into the SL queues, relays drain them.
    for (int v = 0; v < num_v; ++v) {
      if (partition.role[static_cast<size_t>(v)] != Role::Free) continue;
      const double arrival = rreq[static_cast<size_t>(v)] * slot_s;
      const double sl_service = dec.relay_bps[static_cast<size_t>(v)] * slot_s;
      delivered[static_cast<size_t>(v)] =
          std::min(sl_service, qs.q_s[static_cast<size_t>(v)]);
      const FreeQueueStep st = step_free_queues(
          qs.q_b[static_cast<size_t>(v)], qs.q_s[static_cast<size_t>(v)],
          share[static_cast<size_t>(v)], sl_service, arrival);
      qs.q_b[static_cast<size_t>(v)] = st.q_b;
      qs.q_s[static_cast<size_t>(v)] = st.q_s;
    }
    // Virtual queues step on the post-update backlogs.
    for (int v = 0; v < num_v; ++v) {
      const double psi_rreq = psi * rreq[static_cast<size_t>(v)];
      if (partition.role[static_cast<size_t>(v)] == Role::Free) {
        qs.virt[static_cast<size_t>(v)] = step_virtual_queue_y(
            qs.virt[static_cast<size_t>(v)], qs.q_b[static_cast<size_t>(v)],
            qs.q_s[static_cast<size_t>(v)], cfg.epsilon,
            qs.q_b0[static_cast<size_t>(v)], qs.q_s0[static_cast<size_t>(v)],
            psi_rreq);
      } else {
        qs.virt[static_cast<size_t>(v)] = step_virtual_queue_u(
            qs.virt[static_cast<size_t>(v)], qs.q_b[static_cast<size_t>(v)],
            cfg.epsilon, qs.q_b0[static_cast<size_t>(v)], psi_rreq);
      }
    }

    guard.step(Phase::Metrics);
    const double elapsed = static_cast<double>(t + 1) * slot_s;
    ledger.elapsed_s = elapsed;
    for (int v = 0; v < num_v; ++v) {
      ledger.demanded_bps[static_cast<size_t>(v)] = rreq[static_cast<size_t>(v)];
      ledger.add_delivery(v, delivered[static_cast<size_t>(v)]);
      latency.deliver(v, delivered[static_cast<size_t>(v)], t,
                      result.latency_samples);
      latency.add_arrival(v, t, rreq[static_cast<size_t>(v)] * slot_s, chunk_idx,
                          t % spc == spc - 1);
    }
    update_running_averages(qs, dec, partition);
    ++qs.slot;

    if (elapsed > psi) {
      for (int v = 0; v < num_v; ++v) {
        if (rreq[static_cast<size_t>(v)] <= 0) continue;
        result.playback_samples.push_back(ledger.buffered_playback_s(v));
      }
    }
    if (t == total_slots / 2) result.virt_mid = qs.virt;

    if (files.queues.is_open()) {
      for (int v = 0; v < num_v; ++v)
        files.queues << t << "," << v << ","
                     << format_double(qs.q_b[static_cast<size_t>(v)]) << ","
                     << format_double(qs.q_s[static_cast<size_t>(v)]) << ","
                     << format_double(qs.virt[static_cast<size_t>(v)]) << ","
                     << format_double(ledger.buffered_playback_s(v)) << "\n";
    }
    if (files.decisions.is_open()) {
      for (int v = 0; v < num_v; ++v) {
        const Role r = partition.role[static_cast<size_t>(v)];
        const int serving = r == Role::Free
                                ? partition.serving_sl[static_cast<size_t>(v)]
                                : partition.serving_rsu[static_cast<size_t>(v)];
        size_t held = 0;
        if (r == Role::Free) {
          const int s = partition.leader_index(partition.serving_sl[static_cast<size_t>(v)]);
          held = dec.held_rbs_sl(s, v).size();
        } else {
          held = dec.held_rbs_rsu(partition.serving_rsu[static_cast<size_t>(v)], v).size();
        }
        files.decisions << t << "," << v << "," << serving << "," << held << ","
                        << dec.level[static_cast<size_t>(v)] << ","
                        << format_double(outcome.surrogate_value) << ","
                        << outcome.ccp_iterations << "\n";
      }
    }
    if (files.sinr.is_open()) {
      for (int v = 0; v < num_v; ++v) {
        const Role r = partition.role[static_cast<size_t>(v)];
        TxRef tx = r == Role::Free
                       ? TxRef{TxRef::Sl, partition.leader_index(
                                              partition.serving_sl[static_cast<size_t>(v)])}
                       : TxRef{TxRef::Rsu, partition.serving_rsu[static_cast<size_t>(v)]};
        const int pool = r == Role::Free ? snap.rbs_sl : snap.rbs_rsu;
        for (int m = 0; m < pool; ++m)
          files.sinr << t << "," << (tx.kind == TxRef::Rsu ? "rsu" : "sl") << ","
                     << tx.index << "," << v << "," << m << ","
                     << format_double(linear_to_db(sinr(snap, tx, v, m))) << "\n";
      }
    }

    prev_activity = ActivityMask::from_decision(dec, partition.leaders);
    std::fill(anchor_x.begin(), anchor_x.end(), 0);
    for (int v = 0; v < num_v; ++v) {
      const Role r = partition.role[static_cast<size_t>(v)];
      if (r == Role::Free) {
        const int s = partition.leader_index(partition.serving_sl[static_cast<size_t>(v)]);
        for (int m : dec.held_rbs_sl(s, v))
          anchor_x[static_cast<size_t>(v) * stride + m] = 1;
      } else {
        const int b = partition.serving_rsu[static_cast<size_t>(v)];
        for (int m : dec.held_rbs_rsu(b, v))
          anchor_x[static_cast<size_t>(v) * stride + m] = 1;
      }
    }
    anchor_level = dec.level;
  }
  result.virt_final = qs.virt;

  // ---- summary ----
  RunSummary& s = result.summary;
  s.scheduler = scheduler_name(kind);
  s.slots = total_slots;
  s.vehicles = num_v;
  s.rsus = num_b;

  const QoeResult qoe = qoe_objective(result.chunk_levels, cfg, catalog, false);
  s.network_qoe = qoe.network;
  s.mean_vehicle_qoe = num_v > 0 ? qoe.network / num_v : 0.0;

  s.playback_samples = static_cast<long>(result.playback_samples.size());
  s.violation_fraction = reliability_estimate(result.playback_samples, psi);

  s.latency_samples = static_cast<long>(result.latency_samples.size());
  if (!result.latency_samples.empty()) {
    std::vector<double> secs;
    secs.reserve(result.latency_samples.size());
    double mean = 0;
    for (const LatencySample& l : result.latency_samples) {
      secs.push_back(l.seconds);
      mean += l.seconds;
    }
    s.latency_mean_s = mean / secs.size();
    EmpiricalDistribution dist(std::move(secs));
    s.latency_median_s = dist.quantile(0.5);
    s.latency_p99_s = dist.quantile(0.99);
  }

  if (!result.epoch_cluster_counts.empty()) {
    double acc = 0;
    for (int c : result.epoch_cluster_counts) acc += c;
    s.mean_cluster_count = acc / result.epoch_cluster_counts.size();
  }

  const QualityHistogram hist = quality_distribution(result.chunk_levels, num_j);
  s.level_fractions = hist.level_fraction;
  s.idle_fraction = hist.idle_fraction;
  s.mean_ccp_iterations =
      ccp_slots > 0 ? static_cast<double>(ccp_iter_sum) / ccp_slots : 0.0;

  if (writing) {
    for (const LatencySample& l : result.latency_samples)
      files.latency << l.vehicle << "," << l.chunk << ","
                    << format_double(l.seconds) << "\n";
    for (int v = 0; v < num_v; ++v)
      for (size_t i = 0; i < result.chunk_levels[static_cast<size_t>(v)].size(); ++i)
        files.chunks << v << "," << i << ","
                     << result.chunk_levels[static_cast<size_t>(v)][i] << "\n";
    if (!result.playback_samples.empty())
      write_cdf_csv((fs::path(out_dir) / "fig3_cdf.csv").string(),
                    EmpiricalDistribution(result.playback_samples));
    if (!result.latency_samples.empty()) {
      std::vector<double> secs;
      for (const LatencySample& l : result.latency_samples)
        secs.push_back(l.seconds);
      write_ccdf_csv((fs::path(out_dir) / "fig4_ccdf.csv").string(),
                     EmpiricalDistribution(std::move(secs)));
    }
    std::ofstream summary(fs::path(out_dir) / "summary.json");
    summary << s.to_json().dump(2) << "\n";
  }
  return result;
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

ExperimentPlan load_plan(const nlohmann::json& plan_json,
                         const nlohmann::json& base_config,
                         const std::string& out_dir) {
  ExperimentPlan plan;
  plan.base_config = base_config;
  plan.out_dir = out_dir;

  for (auto it = plan_json.begin(); it != plan_json.end(); ++it) {
    const std::string& key = it.key();
    if (key != "sweeps" && key != "replications" && key != "schedulers" &&
        key != "workers")
      throw ConfigError("unknown plan key: " + key);
  }

  const nlohmann::json schema = default_config_json();
  if (plan_json.contains("sweeps")) {
    for (const auto& sw : plan_json.at("sweeps")) {
      SweepSpec spec;
      spec.path = sw.at("path").get<std::string>();
      if (!config_path_exists(schema, spec.path))
        throw ConfigError("sweep over nonexistent field: " + spec.path);
      for (const auto& v : sw.at("values")) spec.values.push_back(v);
      if (spec.values.empty())
        throw ConfigError("sweep without values: " + spec.path);
      plan.sweeps.push_back(std::move(spec));
    }
  }
  plan.replications = plan_json.value("replications", 1);
  if (plan.replications < 1) throw ConfigError("replications must be >= 1");
  if (plan_json.contains("schedulers")) {
    for (const auto& s : plan_json.at("schedulers"))
      plan.schedulers.push_back(scheduler_from_name(s.get<std::string>()));
  }
  if (plan.schedulers.empty())
    plan.schedulers.push_back(SchedulerKind::Proposed);
  plan.workers = plan_json.value("workers", 1);
  if (plan.workers < 1) plan.workers = 1;
  return plan;
}

namespace {

struct CellSpec {
  std::string id;
  int sweep_index = 0;
  int replication = 0;
  SchedulerKind scheduler = SchedulerKind::Proposed;
  std::vector<std::pair<std::string, nlohmann::json>> params;
  nlohmann::json config;
  std::uint64_t seed = 0;
};

struct CellResult {
  bool ok = false;
  std::string error;
  RunSummary summary;
  std::string config_hash;
  long wall_ms = 0;
};

}  // namespace

PlanOutcome run_plan(const ExperimentPlan& plan) {
  // Materialize the cell grid.
  std::vector<long> dims;
  long sweep_cells = 1;
  for (const auto& sw : plan.sweeps) {
    dims.push_back(static_cast<long>(sw.values.size()));
    sweep_cells *= static_cast<long>(sw.values.size());
  }

  std::vector<CellSpec> cells;
  for (long sidx = 0; sidx < sweep_cells; ++sidx) {
    std::vector<std::pair<std::string, nlohmann::json>> params;
    nlohmann::json cfg_json = plan.base_config;
    long rem = sidx;
    for (size_t d = 0; d < plan.sweeps.size(); ++d) {
      const long vi = rem % dims[d];
      rem /= dims[d];
      params.push_back({plan.sweeps[d].path, plan.sweeps[d].values[static_cast<size_t>(vi)]});
      set_config_value(cfg_json, plan.sweeps[d].path,
                       plan.sweeps[d].values[static_cast<size_t>(vi)]);
    }
    const std::uint64_t base_seed =
        parse_config(cfg_json).first.seed;  // also validates early
    for (SchedulerKind sched : plan.schedulers) {
      for (int rep = 0; rep < plan.replications; ++rep) {
        CellSpec cell;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "s%03ld_%s_r%02d", sidx,
                      scheduler_name(sched), rep);
        cell.id = buf;
        cell.sweep_index = static_cast<int>(sidx);
        cell.replication = rep;
        cell.scheduler = sched;
        cell.params = params;
        cell.config = cfg_json;
        cell.seed = Rng::mix(base_seed, static_cast<std::uint64_t>(sidx),
                             static_cast<std::uint64_t>(rep));
        cells.push_back(std::move(cell));
      }
    }
  }

  fs::create_directories(plan.out_dir);
  std::vector<CellResult> results(cells.size());

  std::atomic<size_t> next{0};
  const int workers = std::max(1, plan.workers);
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      const CellSpec& cell = cells[i];
      CellResult& res = results[i];
      const auto start = std::chrono::steady_clock::now();
      try {
        auto [cfg, catalog] = parse_config(cell.config);
        cfg.seed = cell.seed;
        res.config_hash = config_hash(cell.config);
        const RunResult run =
            run_slot_loop(cfg, catalog, cell.scheduler, plan.traces,
                          (fs::path(plan.out_dir) / cell.id).string());
        res.summary = run.summary;
        res.summary.config_hash = res.config_hash;
        res.ok = true;
      } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
      }
      res.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Manifest (cell order is already deterministic).
  nlohmann::json manifest = nlohmann::json::array();
  PlanOutcome outcome;
  outcome.cells = static_cast<int>(cells.size());
  for (size_t i = 0; i < cells.size(); ++i) {
    nlohmann::json entry;
    entry["cell"] = cells[i].id;
    entry["scheduler"] = scheduler_name(cells[i].scheduler);
    entry["replication"] = cells[i].replication;
    nlohmann::json params;
    for (const auto& [path, value] : cells[i].params) params[path] = value;
    entry["params"] = params;
    entry["seed"] = cells[i].seed;
    entry["config_hash"] = results[i].config_hash;
    entry["status"] = results[i].ok ? "ok" : "failed";
    if (!results[i].ok) {
      entry["error"] = results[i].error;
      ++outcome.failures;
    }
    entry["wall_ms"] = results[i].wall_ms;
    manifest.push_back(entry);
  }
  {
    std::ofstream out(fs::path(plan.out_dir) / "manifest.json");
    out << manifest.dump(2) << "\n";
  }

  // Flat per-cell results table.
  {
    std::ofstream out(fs::path(plan.out_dir) / "results.csv");
    out << "cell,scheduler,replication";
    for (const auto& sw : plan.sweeps) out << "," << sw.path;
    out << ",network_qoe,mean_vehicle_qoe,violation_fraction,latency_mean_s,"
           "latency_median_s,latency_p99_s,mean_cluster_count,idle_fraction";
    int num_levels = 0;
    for (size_t i = 0; i < cells.size(); ++i)
      if (results[i].ok)
        num_levels = std::max(num_levels,
                              static_cast<int>(results[i].summary.level_fractions.size()));
    for (int j = 0; j < num_levels; ++j) out << ",level" << j << "_fraction";
    out << ",constraint_violations,status\n";
    for (size_t i = 0; i < cells.size(); ++i) {
      const RunSummary& s = results[i].summary;
      out << cells[i].id << "," << scheduler_name(cells[i].scheduler) << ","
          << cells[i].replication;
      for (const auto& [path, value] : cells[i].params)
        out << "," << value.dump();
      out << "," << format_double(s.network_qoe) << ","
          << format_double(s.mean_vehicle_qoe) << ","
          << format_double(s.violation_fraction) << ","
          << format_double(s.latency_mean_s) << ","
          << format_double(s.latency_median_s) << ","
          << format_double(s.latency_p99_s) << ","
          << format_double(s.mean_cluster_count) << ","
          << format_double(s.idle_fraction);
      for (int j = 0; j < num_levels; ++j)
        out << ","
            << format_double(j < static_cast<int>(s.level_fractions.size())
                                 ? s.level_fractions[static_cast<size_t>(j)]
                                 : 0.0);
      out << "," << s.constraint_violations << ","
          << (results[i].ok ? "ok" : "failed") << "\n";
    }
  }

  // Figure-analogue aggregations over recognized sweep axes.
  const auto aggregate = [&](const std::string& axis, const std::string& file,
                             bool quality_columns) {
    size_t axis_idx = plan.sweeps.size();
    for (size_t d = 0; d < plan.sweeps.size(); ++d)
      if (plan.sweeps[d].path == axis) axis_idx = d;
    if (axis_idx == plan.sweeps.size()) return;

    std::ofstream out(fs::path(plan.out_dir) / file);
    out << axis << ",scheduler";
    int num_levels = 0;
    for (size_t i = 0; i < cells.size(); ++i)
      if (results[i].ok)
        num_levels = std::max(num_levels,
                              static_cast<int>(results[i].summary.level_fractions.size()));
    if (quality_columns) {
      for (int j = 0; j < num_levels; ++j) out << ",level" << j << "_fraction";
      out << ",idle_fraction\n";
    } else {
      out << ",mean_network_qoe,mean_cluster_count\n";
    }

    for (size_t vi = 0; vi < plan.sweeps[axis_idx].values.size(); ++vi) {
      for (SchedulerKind sched : plan.schedulers) {
        double qoe = 0, clusters = 0;
        std::vector<double> lf(static_cast<size_t>(num_levels), 0.0);
        double idle = 0;
        int count = 0;
        for (size_t i = 0; i < cells.size(); ++i) {
          if (!results[i].ok || cells[i].scheduler != sched) continue;
          if (cells[i].params[axis_idx].second !=
              plan.sweeps[axis_idx].values[vi])
            continue;
          ++count;
          qoe += results[i].summary.network_qoe;
          clusters += results[i].summary.mean_cluster_count;
          idle += results[i].summary.idle_fraction;
          for (int j = 0; j < num_levels &&
                          j < static_cast<int>(results[i].summary.level_fractions.size());
               ++j)
            lf[static_cast<size_t>(j)] +=
                results[i].summary.level_fractions[static_cast<size_t>(j)];
        }
        if (count == 0) continue;
        out << plan.sweeps[axis_idx].values[vi].dump() << ","
            << scheduler_name(sched);
        if (quality_columns) {
          for (int j = 0; j < num_levels; ++j)
            out << "," << format_double(lf[static_cast<size_t>(j)] / count);
          out << "," << format_double(idle / count) << "\n";
        } else {
          out << "," << format_double(qoe / count) << ","
              << format_double(clusters / count) << "\n";
        }
      }
    }
  };
  aggregate("slicing.neighborhood_size_m", "fig5_qoe.csv", false);
  aggregate("highway.inter_vehicle_distance_m", "fig6_quality.csv", true);

  return outcome;
}

// ---------------------------------------------------------------------------
// Oracle equivalence suite
// ---------------------------------------------------------------------------

OracleSuiteResult run_oracle_suite(int instances, std::uint64_t seed) {
  Rng rng(seed, 77);
  OracleSuiteResult res;
  res.instances = instances;

  for (int i = 0; i < instances; ++i) {
    const int num_v = 1 + rng.uniform_int(3);
    const int num_m = 1 + rng.uniform_int(3);
    const int num_j = 1 + rng.uniform_int(3);

    VideoCatalog catalog;
    double rate = 0;
    for (int j = 0; j < num_j; ++j) {
      rate += rng.uniform(2e5, 6e5);
      catalog.levels.push_back({"L" + std::to_string(j), rate});
    }

    ScenarioConfig cfg;
    cfg.num_rbs_rsu = num_m;
    cfg.num_rbs_sl = num_m;
    cfg.ccp_max_iters = 20;
    cfg.ccp_tolerance = 1e-9;

    SlicePartition part =
        SlicePartition::all_compelled(std::vector<int>(static_cast<size_t>(num_v), 0));

    DppCoefficients coeffs;
    coeffs.num_vehicles = num_v;
    coeffs.num_levels = num_j;
    coeffs.rbs_rsu = num_m;
    coeffs.rbs_sl = num_m;
    coeffs.one_plus_eps_psi = 1.0 + cfg.epsilon * cfg.playback_threshold_s;
    for (int j = 0; j < num_j; ++j) coeffs.level_rate.push_back(catalog.rate(j));
    const int stride = coeffs.stride();
    coeffs.rate_coef.assign(static_cast<size_t>(num_v) * stride, 0.0);
    coeffs.theta.assign(static_cast<size_t>(num_v) * stride, 0.0);
    coeffs.phi.assign(static_cast<size_t>(num_v), 0.0);
    coeffs.pressure_theta.assign(static_cast<size_t>(num_v), 0.0);
    coeffs.pressure_phi.assign(static_cast<size_t>(num_v), 0.0);
    coeffs.anchor_x.assign(static_cast<size_t>(num_v) * stride, 0);
    coeffs.anchor_level.assign(static_cast<size_t>(num_v), 0);

    for (int v = 0; v < num_v; ++v) {
      const double pressure = rng.uniform(-1e5, 1e6);
      coeffs.pressure_theta[static_cast<size_t>(v)] = pressure;
      coeffs.pressure_phi[static_cast<size_t>(v)] = pressure;
      for (int m = 0; m < num_m; ++m) {
        const double c = rng.uniform01() < 0.1 ? 0.0 : rng.uniform(0.0, 2e6);
        coeffs.rate_coef[static_cast<size_t>(v) * stride + m] = c;
        coeffs.theta[static_cast<size_t>(v) * stride + m] = -c * pressure;
      }
      coeffs.phi[static_cast<size_t>(v)] = rng.uniform(-5e11, 5e11);
    }

    SlotProblem prob;
    prob.partition = &part;
    prob.catalog = &catalog;
    prob.cfg = &cfg;
    prob.num_rsus = 1;
    prob.chunk_boundary = true;
    prob.min_level = 0;

    const SchedulerOutcome opt = oracle_solve(coeffs, prob);
    const SchedulerOutcome ccp = ccp_solve(coeffs, prob);
    const double val_opt = true_dpp_value(coeffs, prob, opt.decision);
    const double val_ccp = true_dpp_value(coeffs, prob, ccp.decision);
    const double gap =
        (val_ccp - val_opt) / std::max(1.0, std::fabs(val_opt));
    res.mean_gap += gap / instances;
    res.worst_gap = std::max(res.worst_gap, gap);
    if (gap <= 1e-9) ++res.exact_matches;
    if (gap <= 0.05) ++res.within_tolerance;
  }
  return res;
}

}  // namespace slicesim
