#include "slicesim/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slicesim {

double step_rsu_queue(double q, double service_bits, double arrival_bits) {
  return std::max(q - service_bits, 0.0) + arrival_bits;
}

FreeQueueStep step_free_queues(double q_b, double q_s, double backhaul_bits,
                               double sl_service_bits, double arrival_bits) {
  FreeQueueStep out;
  out.relayed_bits = std::min(backhaul_bits, q_b);
  out.q_b = std::max(q_b - backhaul_bits, 0.0) + arrival_bits;
  out.q_s = std::max(q_s - sl_service_bits, 0.0) + out.relayed_bits;
  return out;
}

double step_virtual_queue_u(double u, double q_b_next, double eps, double q_b0,
                            double psi_rreq_bits) {
  return std::max(u + q_b_next - eps * (q_b0 - psi_rreq_bits), 0.0);
}

double step_virtual_queue_y(double y, double q_b_next, double q_s_next,
                            double eps, double q_b0, double q_s0,
                            double psi_rreq_bits) {
  return std::max(
      y + q_b_next + q_s_next - eps * (q_b0 + q_s0 - psi_rreq_bits), 0.0);
}

QueueState QueueState::make(int vehicles, int levels, int rbs_rsu, int rbs_sl,
                            double q_b0_bits) {
  QueueState s;
  s.num_vehicles = vehicles;
  s.num_levels = levels;
  s.rbs_rsu = rbs_rsu;
  s.rbs_sl = rbs_sl;
  s.q_b.assign(static_cast<size_t>(vehicles), q_b0_bits);
  s.q_s.assign(static_cast<size_t>(vehicles), 0.0);
  s.virt.assign(static_cast<size_t>(vehicles), 0.0);
  s.q_b0.assign(static_cast<size_t>(vehicles), q_b0_bits);
  s.q_s0.assign(static_cast<size_t>(vehicles), 0.0);
  s.x_av.assign(static_cast<size_t>(vehicles) * (rbs_rsu + rbs_sl), 0.0);
  s.z_av.assign(static_cast<size_t>(vehicles) * levels, 0.0);
  return s;
}

void update_running_averages(QueueState& state, const SlotDecision& decision,
                             const SlicePartition& partition) {
  const double t = static_cast<double>(state.slot + 1);
  const int stride = state.rbs_rsu + state.rbs_sl;
  for (int v = 0; v < state.num_vehicles; ++v) {
    // Current x vector: RSU-pool block then SL-pool block.
    for (int idx = 0; idx < stride; ++idx) {
      double cur = 0.0;
      if (partition.role[static_cast<size_t>(v)] == Role::Free) {
        const int s = partition.leader_index(partition.serving_sl[static_cast<size_t>(v)]);
        if (idx >= state.rbs_rsu && s >= 0 &&
            decision.sl_owner_at(s, idx - state.rbs_rsu) == v)
          cur = 1.0;
      } else {
        const int b = partition.serving_rsu[static_cast<size_t>(v)];
        if (idx < state.rbs_rsu && b >= 0 && decision.rsu_owner_at(b, idx) == v)
          cur = 1.0;
      }
      double& av = state.x_av[static_cast<size_t>(v) * stride + idx];
      av += (cur - av) / t;
    }
    for (int j = 0; j < state.num_levels; ++j) {
      const double cur = decision.z(v, j) ? 1.0 : 0.0;
      double& av = state.z_av[static_cast<size_t>(v) * state.num_levels + j];
      av += (cur - av) / t;
    }
  }
}

double initial_queue_bits(const VideoCatalog& catalog, double psi_s) {
  const double lowest = catalog.rate(0);
  return psi_s * lowest + lowest * catalog.chunk_duration_s;
}

PlaybackLedger PlaybackLedger::make(int vehicles) {
  PlaybackLedger l;
  l.delivered_bits.assign(static_cast<size_t>(vehicles), 0.0);
  l.demanded_bps.assign(static_cast<size_t>(vehicles), 0.0);
  return l;
}

double PlaybackLedger::buffered_playback_s(int v) const {
  const double demand = demanded_bps[static_cast<size_t>(v)];
  if (demand <= 0) return std::numeric_limits<double>::infinity();
  return delivered_bits[static_cast<size_t>(v)] / demand - elapsed_s;
}

double reliability_estimate(const std::vector<double>& buffered_samples,
                            double psi_s) {
  if (buffered_samples.empty()) return 0.0;
  long bad = 0;
  for (double s : buffered_samples)
    if (s <= psi_s) ++bad;
  return static_cast<double>(bad) / static_cast<double>(buffered_samples.size());
}

void LatencyLedger::add_arrival(int v, long slot, double bits, int chunk,
                                bool tail) {
  if (bits <= 0 && !tail) return;
  queues_[static_cast<size_t>(v)].push_back({slot, bits, chunk, tail});
}

void LatencyLedger::deliver(int v, double bits, long now_slot,
                            std::vector<LatencySample>& out) {
  auto& q = queues_[static_cast<size_t>(v)];
  while (bits > 0 && !q.empty()) {
    Entry& e = q.front();
    const double take = std::min(bits, e.bits_left);
    e.bits_left -= take;
    bits -= take;
    if (e.bits_left <= 1e-9) {
      if (e.tail && e.chunk >= 0)
        out.push_back({v, e.chunk,
                       static_cast<double>(now_slot - e.arrival_slot) * slot_s_});
      q.pop_front();
    }
  }
}

}  // namespace slicesim
